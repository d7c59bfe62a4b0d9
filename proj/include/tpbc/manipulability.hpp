#pragma once

#include <cmath>

#include "tpbc/core.hpp"
#include "tpbc/dynamics.hpp"
#include "tpbc/task_map.hpp"

namespace tpbc {

// Barrier h(q) = mu(q) - epsilon with ECBF gains (alpha1, alpha2):
//   Jmu qdd >= -Jmu_dot qd - alpha1 h - alpha2 hdot.
struct BarrierConfig {
  double epsilon = 0.03;
  double alpha1 = 100.0;
  double alpha2 = 20.0;
};

inline void validate_barrier(const BarrierConfig& b) {
  if (b.epsilon <= 0.0) throw ValidationError("barrier.epsilon: must be > 0");
  if (b.alpha1 <= 0.0 || b.alpha2 <= 0.0) {
    throw ValidationError("barrier.k_alpha: gains must be > 0");
  }
  // s^2 + alpha2 s + alpha1 must have real (hence negative) roots.
  if (b.alpha2 * b.alpha2 - 4.0 * b.alpha1 < 0.0) {
    throw ValidationError("barrier.k_alpha: complex barrier poles (alpha2^2 < 4 alpha1)");
  }
}

struct BarrierEval {
  double mu = 0.0;
  VecX Jmu;                // dmu/dq
  double Jmu_dot_qd = 0.0; // (d/dt Jmu) . qd
  double h = 0.0;
  double hdot = 0.0;
  VecX a;                  // constraint row: a . qdd >= b
  double b = 0.0;
  bool inside_safe_set = true;
  VecX singular_values;    // diagnostic
};

// mu = sqrt(det(J J')) = product of singular values of J. Computed from the
// singular values, which stay accurate (and nonneg) at rank deficiency where
// the determinant route only resolves to sqrt(machine epsilon).
inline double manipulability(const MatX& j) {
  Eigen::JacobiSVD<MatX> svd(j);
  return svd.singularValues().prod();
}

constexpr double kManipulabilityFloor = 1e-10;

// dmu/dq_i = mu * trace(dJ/dq_i * Jdagger), with dJ/dq_i by central
// differences and Jdagger the Moore-Penrose pseudoinverse.
inline VecX manipulability_gradient(const RobotModel& model, const VecX& q,
                                    const TaskMapConfig& task) {
  const MatX j = task_jacobian(model, q, task);
  const double mu = manipulability(j);
  if (mu <= kManipulabilityFloor) {
    throw SingularityError("manipulability_gradient: mu below " +
                           std::to_string(kManipulabilityFloor));
  }
  const MatX jjt = j * j.transpose();
  const MatX jdag = jjt.llt().solve(j).transpose();  // J'(JJ')^-1

  const int n = model.dof();
  VecX grad(n);
  VecX qp = q;
  for (int i = 0; i < n; ++i) {
    qp[i] = q[i] + kFdStep;
    const MatX jp = task_jacobian(model, qp, task);
    qp[i] = q[i] - kFdStep;
    const MatX jm = task_jacobian(model, qp, task);
    qp[i] = q[i];
    const MatX dj = (jp - jm) / (2.0 * kFdStep);
    grad[i] = mu * (dj * jdag).trace();
  }
  return grad;
}

// Linear ECBF row at the current state. When h < 0 (discretization
// overshoot) the row is still returned, flagged, so the barrier dynamics can
// drive h back toward zero.
inline BarrierEval ecbf_row(const RobotModel& model, const RobotState& state,
                            const TaskMapConfig& task, const BarrierConfig& cfg) {
  BarrierEval out;
  const MatX j = task_jacobian(model, state.q, task);
  out.mu = manipulability(j);

  Eigen::JacobiSVD<MatX> svd(j);
  out.singular_values = svd.singularValues();

  out.Jmu = manipulability_gradient(model, state.q, task);
  const VecX jmu_p = manipulability_gradient(model, state.q + kFdStep * state.qd, task);
  const VecX jmu_m = manipulability_gradient(model, state.q - kFdStep * state.qd, task);
  out.Jmu_dot_qd = ((jmu_p - jmu_m) / (2.0 * kFdStep)).dot(state.qd);

  out.h = out.mu - cfg.epsilon;
  out.hdot = out.Jmu.dot(state.qd);
  out.a = out.Jmu;
  out.b = -out.Jmu_dot_qd - cfg.alpha1 * out.h - cfg.alpha2 * out.hdot;
  out.inside_safe_set = out.h >= 0.0;
  return out;
}

}  // namespace tpbc
