#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "tpbc/core.hpp"

namespace tpbc {

enum class QpStatus { optimal, max_iter, infeasible };

inline const char* to_string(QpStatus s) {
  switch (s) {
    case QpStatus::optimal: return "optimal";
    case QpStatus::max_iter: return "max_iter";
    case QpStatus::infeasible: return "infeasible";
  }
  return "?";
}

// Offsets of the control blocks inside the decision vector z = [qdd; tau; ur].
// Any block may be empty for generic problems.
struct QpVariableLayout {
  int n_qdd = 0;
  int n_tau = 0;
  int n_ur = 0;
};

// min 1/2 z'Hz + g'z  s.t.  Aeq z = beq,  Aineq z >= bineq.
struct QpProblem {
  MatX H;
  VecX g;
  MatX Aeq;
  VecX beq;
  MatX Aineq;
  VecX bineq;
  QpVariableLayout layout;

  int dim() const { return static_cast<int>(H.rows()); }
};

struct QpSolution {
  VecX z;
  VecX qdd, tau, ur;
  QpStatus status = QpStatus::max_iter;
  double kkt_residual = std::numeric_limits<double>::infinity();
  VecX lambda_eq;    // multipliers of Aeq rows (free sign)
  VecX lambda_ineq;  // multipliers of Aineq rows (>= 0; 0 when inactive)
  int iterations = 0;
};

// Acceptance thresholds for reporting a solution as optimal.
constexpr double kQpEqTol = 1e-6;
constexpr double kQpIneqTol = 1e-6;
constexpr double kQpStatTol = 1e-5;
constexpr double kQpCompTol = 1e-5;

struct KktResidual {
  double eq = 0.0;
  double ineq = 0.0;
  double stationarity = 0.0;
  double complementarity = 0.0;
  double dual = 0.0;

  double max() const {
    return std::max({eq, ineq, stationarity, complementarity, dual});
  }
};

// Direct KKT evaluation from problem data; independent of solver internals.
inline KktResidual kkt_check(const QpProblem& p, const VecX& z, const VecX& lambda_eq,
                             const VecX& lambda_ineq) {
  KktResidual r;
  VecX grad = p.H * z + p.g;
  if (p.Aeq.rows() > 0) {
    r.eq = (p.Aeq * z - p.beq).cwiseAbs().maxCoeff();
    grad -= p.Aeq.transpose() * lambda_eq;
  }
  if (p.Aineq.rows() > 0) {
    const VecX slack = p.Aineq * z - p.bineq;
    r.ineq = std::max(0.0, (-slack).maxCoeff());
    grad -= p.Aineq.transpose() * lambda_ineq;
    r.complementarity = (lambda_ineq.array() * slack.array()).abs().maxCoeff();
    r.dual = std::max(0.0, (-lambda_ineq).maxCoeff());
  }
  r.stationarity = grad.cwiseAbs().maxCoeff();
  return r;
}

// Dense dual active-set solve (Goldfarb–Idnani scheme): start at the
// unconstrained minimum, repeatedly activate the most violated constraint,
// taking dual steps (dropping blocking rows) as needed. Equality rows are
// activated first, with a sign flip toward feasibility, and are never
// dropped. Requires H positive definite (builders regularize); each step
// refactorizes the active-set Schur complement against H's Cholesky factor.
// Deterministic: ties resolve to the lowest row index.
inline QpSolution solve_qp(const QpProblem& p, double tol = 1e-8, int max_iter = 200) {
  const int d = p.dim();
  const int neq = static_cast<int>(p.Aeq.rows());
  const int nin = static_cast<int>(p.Aineq.rows());
  const double inf = std::numeric_limits<double>::infinity();

  if (p.g.size() != d || (neq > 0 && p.Aeq.cols() != d) || (nin > 0 && p.Aineq.cols() != d)) {
    throw ValidationError("solve_qp: inconsistent problem dimensions");
  }

  MatX h = 0.5 * (p.H + p.H.transpose());
  const double hscale = 1.0 + h.diagonal().cwiseAbs().maxCoeff();
  Eigen::LLT<MatX> llt(h);
  double ridge = 0.0;
  while (llt.info() != Eigen::Success) {
    ridge = (ridge == 0.0) ? 1e-12 * hscale : ridge * 100.0;
    if (ridge > 1e-4 * hscale) {
      throw ValidationError("solve_qp: H is not positive semidefinite");
    }
    llt.compute(h + ridge * MatX::Identity(d, d));
  }

  QpSolution sol;
  sol.z = -llt.solve(p.g);

  struct ActiveRow {
    int id;       // < neq: equality; >= neq: inequality id - neq
    double sign;  // equality rows may be activated as -(a z >= b)
  };
  std::vector<ActiveRow> active;
  std::vector<double> lam;

  auto row_vec = [&](int id) -> VecX {
    return id < neq ? VecX(p.Aeq.row(id)) : VecX(p.Aineq.row(id - neq));
  };
  auto row_rhs = [&](int id) { return id < neq ? p.beq[id] : p.bineq[id - neq]; };
  auto is_active = [&](int id) {
    for (const ActiveRow& r : active) {
      if (r.id == id) return true;
    }
    return false;
  };

  bool done = false;
  while (!done) {
    // Most violated inactive constraint; equalities take priority in order.
    int pick = -1;
    double sign = 1.0;
    double worst = tol;
    for (int e = 0; e < neq && pick < 0; ++e) {
      if (is_active(e)) continue;
      const double v = p.beq[e] - p.Aeq.row(e).dot(sol.z);
      if (std::abs(v) > tol) {
        pick = e;
        sign = (v > 0.0) ? 1.0 : -1.0;
      }
    }
    if (pick < 0) {
      for (int i = 0; i < nin; ++i) {
        if (is_active(neq + i)) continue;
        const double v = p.bineq[i] - p.Aineq.row(i).dot(sol.z);
        if (v > worst) {
          worst = v;
          pick = neq + i;
          sign = 1.0;
        }
      }
    }
    if (pick < 0) {
      sol.status = QpStatus::optimal;
      break;
    }

    const VecX a_bar = sign * row_vec(pick);
    const double b_bar = sign * row_rhs(pick);
    double lam_new = 0.0;

    while (true) {
      if (++sol.iterations > max_iter) {
        sol.status = QpStatus::max_iter;
        done = true;
        break;
      }
      // Step direction from the bordered KKT system
      //   H pdir + At' mu = a_bar,  At pdir = 0,
      // which stays well conditioned even when the objective ridge makes H
      // itself nearly singular.
      const int na = static_cast<int>(active.size());
      VecX pdir(d);
      VecX mu = VecX::Zero(na);
      if (na > 0) {
        MatX kkt = MatX::Zero(d + na, d + na);
        kkt.topLeftCorner(d, d) = h;
        for (int j = 0; j < na; ++j) {
          const VecX aj = active[j].sign * row_vec(active[j].id);
          kkt.block(0, d + j, d, 1) = aj;
          kkt.block(d + j, 0, 1, d) = aj.transpose();
        }
        VecX rhs = VecX::Zero(d + na);
        rhs.head(d) = a_bar;
        const VecX step = Eigen::FullPivLU<MatX>(kkt).solve(rhs);
        pdir = step.head(d);
        mu = step.tail(na);
      } else {
        pdir = llt.solve(a_bar);
      }

      const double denom = a_bar.dot(pdir);  // = pdir' H pdir >= 0
      const double viol = b_bar - a_bar.dot(sol.z);
      const double denom_floor = 1e-13 * (1.0 + a_bar.squaredNorm()) / hscale;

      double t_block = inf;
      int blocker = -1;
      for (int j = 0; j < na; ++j) {
        if (active[j].id >= neq && mu[j] > 1e-14) {
          const double tb = std::max(lam[j], 0.0) / mu[j];
          if (tb < t_block) {
            t_block = tb;
            blocker = j;
          }
        }
      }
      const double t_full = (denom > denom_floor) ? viol / denom : inf;
      const double t = std::min(t_full, t_block);

      if (!std::isfinite(t)) {
        sol.status = QpStatus::infeasible;
        done = true;
        break;
      }
      if (t > 0.0) {
        sol.z += t * pdir;
        for (int j = 0; j < na; ++j) lam[j] -= t * mu[j];
        lam_new += t;
      }
      if (t_full <= t_block) {
        active.push_back({pick, sign});
        lam.push_back(lam_new);
        break;
      }
      active.erase(active.begin() + blocker);
      lam.erase(lam.begin() + blocker);
    }
  }

  // Polish: re-solve the equality-constrained problem on the final active
  // set in one shot. The incremental updates above accumulate round-off
  // through ridge-dominated directions; the direct solve removes it. Kept
  // only if it is consistent with the active set (duals nonnegative,
  // inactive rows still feasible).
  if (sol.status == QpStatus::optimal) {
    const int na = static_cast<int>(active.size());
    MatX kkt = MatX::Zero(d + na, d + na);
    kkt.topLeftCorner(d, d) = h;
    VecX rhs(d + na);
    rhs.head(d) = -p.g;
    for (int j = 0; j < na; ++j) {
      const VecX aj = active[j].sign * row_vec(active[j].id);
      kkt.block(0, d + j, d, 1) = -aj;
      kkt.block(d + j, 0, 1, d) = aj.transpose();
      rhs[d + j] = active[j].sign * row_rhs(active[j].id);
    }
    Eigen::FullPivLU<MatX> lu(kkt);
    if (lu.isInvertible()) {
      const VecX refined = lu.solve(rhs);
      bool ok = true;
      for (int j = 0; j < na && ok; ++j) {
        if (active[j].id >= neq && refined[d + j] < -1e-9) ok = false;
      }
      for (int i = 0; i < nin && ok; ++i) {
        if (is_active(neq + i)) continue;
        if (p.Aineq.row(i).dot(refined.head(d)) < p.bineq[i] - tol) ok = false;
      }
      if (ok) {
        sol.z = refined.head(d);
        for (int j = 0; j < na; ++j) {
          lam[j] = active[j].id < neq ? refined[d + j] : std::max(refined[d + j], 0.0);
        }
      }
    }
  }

  sol.lambda_eq = VecX::Zero(neq);
  sol.lambda_ineq = VecX::Zero(nin);
  for (size_t j = 0; j < active.size(); ++j) {
    if (active[j].id < neq) {
      sol.lambda_eq[active[j].id] = active[j].sign * lam[j];
    } else {
      sol.lambda_ineq[active[j].id - neq] = lam[j];
    }
  }

  const KktResidual kkt = kkt_check(p, sol.z, sol.lambda_eq, sol.lambda_ineq);
  sol.kkt_residual = kkt.max();
  if (sol.status == QpStatus::optimal &&
      (kkt.eq > kQpEqTol || kkt.ineq > kQpIneqTol || kkt.stationarity > kQpStatTol ||
       kkt.complementarity > kQpCompTol)) {
    sol.status = QpStatus::max_iter;
  }

  const auto& lay = p.layout;
  if (lay.n_qdd + lay.n_tau + lay.n_ur > 0) {
    sol.qdd = sol.z.segment(0, lay.n_qdd);
    sol.tau = sol.z.segment(lay.n_qdd, lay.n_tau);
    sol.ur = sol.z.segment(lay.n_qdd + lay.n_tau, lay.n_ur);
  }
  return sol;
}

}  // namespace tpbc
