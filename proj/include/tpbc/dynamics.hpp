#pragma once

#include <vector>

#include "tpbc/core.hpp"
#include "tpbc/robot_model.hpp"
#include "tpbc/rotation.hpp"
#include "tpbc/task_map.hpp"

namespace tpbc {

// Central finite-difference step used for every numerical derivative in the
// library (dM/dq, Jdot, Jmu_dot). Balances truncation and round-off at double
// precision for the magnitudes involved.
constexpr double kFdStep = 1e-6;

struct DynamicsTerms {
  MatX M;      // n x n mass matrix
  MatX C;      // n x n Coriolis matrix (Christoffel factorization)
  VecX tau_g;  // gravity torques
};

struct TaskJacobians {
  MatX J;     // m x n
  MatX Jdot;  // m x n, directional derivative of J along the current qd
};

// Spatial (Plucker) 6D algebra, Featherstone conventions: motion vectors are
// [angular; linear].
namespace spatial {

// Motion transform into child coordinates. R_child/p_child place the child
// frame in parent coordinates.
inline Mat6 motion_transform(const Mat3& R_child, const Vec3& p_child) {
  const Mat3 e = R_child.transpose();
  Mat6 x = Mat6::Zero();
  x.topLeftCorner<3, 3>() = e;
  x.bottomRightCorner<3, 3>() = e;
  x.bottomLeftCorner<3, 3>() = -e * skew(p_child);
  return x;
}

// Spatial inertia of a body with mass m, com c, and rotational inertia about
// the com Ic, all in body coordinates.
inline Mat6 body_inertia(double m, const Vec3& c, const Mat3& ic) {
  const Mat3 cx = skew(c);
  Mat6 i;
  i.topLeftCorner<3, 3>() = ic + m * cx * cx.transpose();
  i.topRightCorner<3, 3>() = m * cx;
  i.bottomLeftCorner<3, 3>() = m * cx.transpose();
  i.bottomRightCorner<3, 3>() = m * Mat3::Identity();
  return i;
}

inline Mat6 cross_motion(const Vec6& v) {
  Mat6 x = Mat6::Zero();
  const Mat3 wx = skew(v.head<3>());
  x.topLeftCorner<3, 3>() = wx;
  x.bottomRightCorner<3, 3>() = wx;
  x.bottomLeftCorner<3, 3>() = skew(v.tail<3>());
  return x;
}

inline Mat6 cross_force(const Vec6& v) { return -cross_motion(v).transpose(); }

// Per-joint transform (parent link coords -> link i coords) and the joint
// motion subspace in link coords.
struct ChainGeometry {
  std::vector<Mat6> X;
  std::vector<Vec6> S;
};

inline ChainGeometry chain_geometry(const RobotModel& model, const VecX& q) {
  const int n = model.dof();
  ChainGeometry g;
  g.X.resize(n);
  g.S.resize(n);
  for (int i = 0; i < n; ++i) {
    const JointSpec& j = model.joints[i];
    const Mat3 r = j.origin_rotation * axis_rotation(j.axis, q[i]);
    g.X[i] = motion_transform(r, j.origin_translation);
    g.S[i] = Vec6::Zero();
    g.S[i].head<3>() = j.axis;  // axis is invariant under its own rotation
  }
  return g;
}

}  // namespace spatial

// M(q) by the composite-rigid-body algorithm.
inline MatX mass_matrix(const RobotModel& model, const VecX& q) {
  detail::check_dims(model, q, "mass_matrix");
  const int n = model.dof();
  const spatial::ChainGeometry g = spatial::chain_geometry(model, q);

  std::vector<Mat6> ic(n);
  for (int i = 0; i < n; ++i) {
    ic[i] = spatial::body_inertia(model.links[i].mass, model.links[i].com,
                                  model.links[i].inertia);
  }

  MatX m = MatX::Zero(n, n);
  for (int i = n - 1; i >= 0; --i) {
    Vec6 f = ic[i] * g.S[i];
    m(i, i) = g.S[i].dot(f);
    for (int j = i; j > 0;) {
      f = g.X[j].transpose() * f;
      --j;
      m(i, j) = m(j, i) = g.S[j].dot(f);
    }
    if (i > 0) {
      ic[i - 1] += g.X[i].transpose() * ic[i] * g.X[i];
    }
  }
  return m;
}

// Recursive Newton-Euler: tau = M(q) qdd + C(q,qd) qd + tau_g(q), with
// gravity entering as a fictitious base acceleration.
inline VecX inverse_dynamics(const RobotModel& model, const VecX& q, const VecX& qd,
                             const VecX& qdd, const Vec3& gravity) {
  detail::check_dims(model, q, "inverse_dynamics");
  const int n = model.dof();
  const spatial::ChainGeometry g = spatial::chain_geometry(model, q);

  Vec6 a_base = Vec6::Zero();
  a_base.tail<3>() = -gravity;

  std::vector<Vec6> v(n), a(n), f(n);
  for (int i = 0; i < n; ++i) {
    const Vec6 vj = g.S[i] * qd[i];
    v[i] = (i == 0 ? vj : Vec6(g.X[i] * v[i - 1] + vj));
    a[i] = g.X[i] * (i == 0 ? a_base : a[i - 1]) + g.S[i] * qdd[i] +
           spatial::cross_motion(v[i]) * vj;
    const Mat6 ib = spatial::body_inertia(model.links[i].mass, model.links[i].com,
                                          model.links[i].inertia);
    f[i] = ib * a[i] + spatial::cross_force(v[i]) * (ib * v[i]);
  }

  VecX tau(n);
  for (int i = n - 1; i >= 0; --i) {
    tau[i] = g.S[i].dot(f[i]);
    if (i > 0) {
      f[i - 1] += g.X[i].transpose() * f[i];
    }
  }
  return tau;
}

inline VecX gravity_torques(const RobotModel& model, const VecX& q) {
  const VecX zero = VecX::Zero(model.dof());
  return inverse_dynamics(model, q, zero, zero, model.gravity);
}

// C(q,qd) from Christoffel symbols of the first kind, with dM/dq by central
// finite differences. This factorization makes Mdot - 2C skew-symmetric,
// which the storage-function derivative relies on.
inline MatX coriolis_matrix(const RobotModel& model, const VecX& q, const VecX& qd) {
  detail::check_dims(model, q, "coriolis_matrix");
  detail::check_dims(model, qd, "coriolis_matrix");
  const int n = model.dof();

  std::vector<MatX> dm(n);
  VecX qp = q;
  for (int k = 0; k < n; ++k) {
    qp[k] = q[k] + kFdStep;
    const MatX mp = mass_matrix(model, qp);
    qp[k] = q[k] - kFdStep;
    const MatX mm = mass_matrix(model, qp);
    qp[k] = q[k];
    dm[k] = (mp - mm) / (2.0 * kFdStep);
  }

  MatX c = MatX::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double cij = 0.0;
      for (int k = 0; k < n; ++k) {
        cij += (dm[k](i, j) + dm[j](i, k) - dm[i](j, k)) * qd[k];
      }
      c(i, j) = 0.5 * cij;
    }
  }
  return c;
}

inline DynamicsTerms dynamics_terms(const RobotModel& model, const RobotState& state) {
  return {mass_matrix(model, state.q), coriolis_matrix(model, state.q, state.qd),
          gravity_torques(model, state.q)};
}

// J and its time derivative along qd (central difference of the analytic J).
inline TaskJacobians task_jacobians(const RobotModel& model, const RobotState& state,
                                    const TaskMapConfig& task) {
  detail::check_dims(model, state.q, "task_jacobians");
  detail::check_dims(model, state.qd, "task_jacobians");
  TaskJacobians out;
  out.J = task_jacobian(model, state.q, task);
  const MatX jp = task_jacobian(model, state.q + kFdStep * state.qd, task);
  const MatX jm = task_jacobian(model, state.q - kFdStep * state.qd, task);
  out.Jdot = (jp - jm) / (2.0 * kFdStep);
  return out;
}

// qdd = M^-1 (tau + tau_ext - C qd - tau_g).
inline VecX forward_dynamics(const RobotModel& model, const RobotState& state,
                             const VecX& tau, const VecX& tau_ext) {
  const MatX m = mass_matrix(model, state.q);
  const VecX bias = inverse_dynamics(model, state.q, state.qd,
                                     VecX::Zero(model.dof()), model.gravity);
  return m.llt().solve(tau + tau_ext - bias);
}

}  // namespace tpbc
