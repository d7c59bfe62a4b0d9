#pragma once

#include <utility>

#include "tpbc/core.hpp"
#include "tpbc/dynamics.hpp"
#include "tpbc/task_map.hpp"

namespace tpbc {

struct ReferenceState {
  VecX xr;
  VecX xrd;
};

// x_tilde = x - xr, xd_tilde = xd - xrd.
struct TaskError {
  VecX xt;
  VecX xtd;
};

inline TaskError task_error(const TaskState& ts, const ReferenceState& ref) {
  return {ts.x - ref.xr, ts.xd - ref.xrd};
}

// Condition-number limit on J M^-1 J^T beyond which the exact task-space
// inertia is refused; callers must fall back to the damped controller.
constexpr double kTaskConditionLimit = 1e12;

struct TaskSpaceQuantities {
  MatX Lambda;  // (J M^-1 J^T)^-1
  MatX Jbar;    // M^-1 J^T Lambda, dynamically consistent pseudoinverse
  MatX Q;       // J M^-1 C - Jdot
};

struct ControllerGains {
  MatX Kp;      // task stiffness
  MatX Kd;      // task damping
  double delta = 1e-3;  // damped-pseudoinverse constant
  double w1 = 1.0;      // reference-input tracking weight
  double w2 = 10.0;     // task-force tracking weight
  MatX Kp_ref;  // reference PD gains
  MatX Kd_ref;
};

inline void validate_gains(const ControllerGains& g, int m) {
  auto check_spd = [m](const MatX& k, const char* name) {
    if (k.rows() != m || k.cols() != m) {
      throw ValidationError(std::string("gains.") + name + ": wrong dimension");
    }
    if ((k - k.transpose()).norm() > 1e-9 * (1.0 + k.norm())) {
      throw ValidationError(std::string("gains.") + name + ": not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<MatX> es(k);
    if (es.eigenvalues().minCoeff() <= 0.0) {
      throw ValidationError(std::string("gains.") + name + ": not positive definite");
    }
  };
  check_spd(g.Kp, "Kp");
  check_spd(g.Kd, "Kd");
  check_spd(g.Kp_ref, "Kp_ref");
  check_spd(g.Kd_ref, "Kd_ref");
  if (g.delta <= 0.0) throw ValidationError("gains.delta: must be > 0");
  if (g.w1 <= 0.0) throw ValidationError("gains.w1: must be > 0");
  if (g.w2 <= 0.0) throw ValidationError("gains.w2: must be > 0");
}

// Lambda, Jbar, Q at a nonsingular state. Throws SingularityError when
// J M^-1 J^T is indefinite to working precision or its condition number
// exceeds kTaskConditionLimit.
inline TaskSpaceQuantities operational_quantities(const DynamicsTerms& dyn,
                                                  const TaskJacobians& jac) {
  const Eigen::LLT<MatX> mllt(dyn.M);
  const MatX minv_jt = mllt.solve(jac.J.transpose());
  MatX a = jac.J * minv_jt;
  a = 0.5 * (a + a.transpose());

  Eigen::SelfAdjointEigenSolver<MatX> es(a);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (lo <= 0.0 || hi / lo >= kTaskConditionLimit) {
    throw SingularityError("operational_quantities: J M^-1 J^T condition number above limit");
  }

  TaskSpaceQuantities ts;
  ts.Lambda = a.llt().solve(MatX::Identity(a.rows(), a.cols()));
  ts.Lambda = 0.5 * (ts.Lambda + ts.Lambda.transpose());
  ts.Jbar = minv_jt * ts.Lambda;
  ts.Q = jac.J * mllt.solve(dyn.C) - jac.Jdot;
  return ts;
}

// Storage function V = 1/2 xtd' Lambda xtd + 1/2 xt' Kp xt and the exact
// affine decomposition of its derivative,
//   Vdot(qdd, ur) = Vdot_const + Vdot_qdd . qdd + Vdot_ur . ur,
// where ur stands in for the reference acceleration.
struct StorageEval {
  double V = 0.0;
  double Vdot_const = 0.0;
  VecX Vdot_qdd;
  VecX Vdot_ur;

  double vdot(const VecX& qdd, const VecX& ur) const {
    return Vdot_const + Vdot_qdd.dot(qdd) + Vdot_ur.dot(ur);
  }
};

inline StorageEval storage_eval(const TaskSpaceQuantities& ts, const TaskError& err,
                                const TaskJacobians& jac, const ControllerGains& gains,
                                const VecX& qd) {
  StorageEval s;
  s.V = 0.5 * err.xtd.dot(ts.Lambda * err.xtd) + 0.5 * err.xt.dot(gains.Kp * err.xt);
  s.Vdot_const =
      err.xtd.dot(ts.Lambda * (ts.Q * (ts.Jbar * err.xtd)) + ts.Lambda * (jac.Jdot * qd) +
                  gains.Kp * err.xt);
  s.Vdot_qdd = (ts.Lambda * jac.J).transpose() * err.xtd;
  s.Vdot_ur = -ts.Lambda.transpose() * err.xtd;
  return s;
}

// Closed-form task-space PBC. Returns the task force f and a torque
// realization tau with J̄' tau = f; the torque null space carries gravity
// compensation only.
inline std::pair<VecX, VecX> pbc_controller(const TaskSpaceQuantities& ts,
                                            const TaskError& err, const DynamicsTerms& dyn,
                                            const TaskJacobians& jac,
                                            const ControllerGains& gains, const VecX& qd,
                                            const VecX& ur) {
  const VecX f = ts.Lambda * ur + ts.Jbar.transpose() * dyn.tau_g +
                 ts.Lambda * (ts.Q * (qd - ts.Jbar * err.xtd)) - gains.Kp * err.xt -
                 gains.Kd * err.xtd;
  const VecX tau =
      jac.J.transpose() * f + dyn.tau_g - jac.J.transpose() * (ts.Jbar.transpose() * dyn.tau_g);
  return {f, tau};
}

// Same control law with damped inverses: Jbar -> J'(JJ' + delta I)^-1 and
// Lambda -> (J M^-1 J' + delta I)^-1, so every quantity stays finite at
// (and across) singular configurations. Passivity is no longer guaranteed.
inline std::pair<VecX, VecX> pbc_damped_controller(const TaskError& err,
                                                   const DynamicsTerms& dyn,
                                                   const TaskJacobians& jac,
                                                   const ControllerGains& gains,
                                                   const VecX& qd, const VecX& ur,
                                                   double delta) {
  const int m = static_cast<int>(jac.J.rows());
  const MatX eye = MatX::Identity(m, m);

  const MatX jjt = jac.J * jac.J.transpose() + delta * eye;
  const MatX jbar_d = (jjt.llt().solve(jac.J)).transpose();  // J'(JJ'+dI)^-1

  const Eigen::LLT<MatX> mllt(dyn.M);
  MatX a = jac.J * mllt.solve(jac.J.transpose()) + delta * eye;
  a = 0.5 * (a + a.transpose());
  const MatX lambda_d = a.llt().solve(eye);

  const MatX q_mat = jac.J * mllt.solve(dyn.C) - jac.Jdot;

  const VecX f = lambda_d * ur + jbar_d.transpose() * dyn.tau_g +
                 lambda_d * (q_mat * (qd - jbar_d * err.xtd)) - gains.Kp * err.xt -
                 gains.Kd * err.xtd;
  const VecX tau =
      jac.J.transpose() * f + dyn.tau_g - jac.J.transpose() * (jbar_d.transpose() * dyn.tau_g);
  return {f, tau};
}

}  // namespace tpbc
