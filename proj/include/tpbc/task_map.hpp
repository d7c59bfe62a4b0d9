#pragma once

#include "tpbc/core.hpp"
#include "tpbc/robot_model.hpp"
#include "tpbc/rotation.hpp"

namespace tpbc {

// End-effector task space. pose6 appends extrinsic x-y-z roll-pitch-yaw to
// the position, so its velocity rows are Euler-angle rates, not angular
// velocity.
enum class TaskMode { planar2, position3, pose6 };

struct TaskMapConfig {
  TaskMode mode = TaskMode::pose6;

  int m() const {
    switch (mode) {
      case TaskMode::planar2: return 2;
      case TaskMode::position3: return 3;
      case TaskMode::pose6: return 6;
    }
    return 0;
  }
};

struct TaskState {
  VecX x;
  VecX xd;
};

// x(q): task coordinates of the end-effector.
inline VecX task_position(const RobotModel& model, const VecX& q, const TaskMapConfig& cfg) {
  const LinkPoses fk = forward_kinematics(model, q);
  switch (cfg.mode) {
    case TaskMode::planar2:
      return fk.p_ee.head<2>();
    case TaskMode::position3:
      return fk.p_ee;
    case TaskMode::pose6: {
      VecX x(6);
      x.head<3>() = fk.p_ee;
      x.tail<3>() = matrix_to_rpy(fk.R_ee);
      return x;
    }
  }
  return {};
}

// Analytic J = dx/dq. Position rows are the geometric Jacobian
// (axis x moment arm per revolute joint); pose6 orientation rows map through
// the inverse Euler-rate matrix so that xd = J qd holds for rpy rates.
inline MatX task_jacobian(const RobotModel& model, const VecX& q, const TaskMapConfig& cfg) {
  detail::check_dims(model, q, "task_jacobian");
  const int n = model.dof();
  const LinkPoses fk = forward_kinematics(model, q);

  MatX jp(3, n), jw(3, n);
  for (int i = 0; i < n; ++i) {
    const Vec3 axis_w = fk.R[i] * model.joints[i].axis;
    jw.col(i) = axis_w;
    jp.col(i) = axis_w.cross(fk.p_ee - fk.p[i]);
  }

  switch (cfg.mode) {
    case TaskMode::planar2:
      return jp.topRows<2>();
    case TaskMode::position3:
      return jp;
    case TaskMode::pose6: {
      MatX j(6, n);
      j.topRows<3>() = jp;
      j.bottomRows<3>() = rpy_rate_matrix_inverse(matrix_to_rpy(fk.R_ee)) * jw;
      return j;
    }
  }
  return {};
}

// Task pose and velocity at a state; xd = J qd by construction.
inline TaskState task_map(const RobotModel& model, const RobotState& state,
                          const TaskMapConfig& cfg) {
  TaskState ts;
  ts.x = task_position(model, state.q, cfg);
  ts.xd = task_jacobian(model, state.q, cfg) * state.qd;
  return ts;
}

}  // namespace tpbc
