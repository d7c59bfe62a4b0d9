#pragma once

#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "tpbc/core.hpp"
#include "tpbc/dynamics.hpp"
#include "tpbc/manipulability.hpp"
#include "tpbc/qp.hpp"
#include "tpbc/qp_control.hpp"
#include "tpbc/robot_model.hpp"
#include "tpbc/task_map.hpp"
#include "tpbc/task_space.hpp"

namespace tpbc {

enum class ControllerKind { unconstrained, damped, standard_qp, proposed_qp, zero_torque };

inline const char* to_string(ControllerKind k) {
  switch (k) {
    case ControllerKind::unconstrained: return "unconstrained";
    case ControllerKind::damped: return "damped";
    case ControllerKind::standard_qp: return "standard_qp";
    case ControllerKind::proposed_qp: return "proposed_qp";
    case ControllerKind::zero_torque: return "zero_torque";
  }
  return "?";
}

inline ControllerKind parse_controller(const std::string& s) {
  if (s == "unconstrained") return ControllerKind::unconstrained;
  if (s == "damped") return ControllerKind::damped;
  if (s == "standard_qp") return ControllerKind::standard_qp;
  if (s == "proposed_qp") return ControllerKind::proposed_qp;
  if (s == "zero_torque") return ControllerKind::zero_torque;
  throw ParseError("scenario: unknown controller `" + s + "`");
}

struct DisturbancePulse {
  double t_start = 0.0;
  double t_end = 0.0;
  VecX tau_ext;
};

struct Scenario {
  std::string name;
  std::string model_path;
  RobotModel model;
  TaskMapConfig task;
  ControllerKind controller = ControllerKind::proposed_qp;
  VecX q0, qd0;
  VecX xr0, xrd0, xr_des;
  ControllerGains gains;
  BarrierConfig barrier;
  double duration = 5.0;
  double dt_sim = 1e-3;
  double dt_ctrl = 3e-3;  // ~300 Hz, an exact multiple of dt_sim
  std::vector<DisturbancePulse> disturbances;
  double torque_cap = 1e4;  // unconstrained-controller clamp near singularity
  bool abort_on_controller_error = false;
};

struct TraceRow {
  double t = 0.0;
  VecX q, qd, x, xr;
  double V = 0.0;
  double Vdot = 0.0;
  double mu = 0.0;
  VecX tau, ur;
  std::string solver_status = "none";
  double solve_time = 0.0;  // measured wall time; not part of the stable CSV bytes
};

struct Summary {
  double min_mu = std::numeric_limits<double>::infinity();
  double max_Vdot = -std::numeric_limits<double>::infinity();
  double final_error = std::numeric_limits<double>::quiet_NaN();
  int violation_count = 0;  // rows where the controller failed or the QP was non-optimal
  int rows = 0;
  bool aborted = false;
  int abort_row = -1;
};

struct SimResult {
  std::vector<TraceRow> trace;
  Summary summary;
};

// u_r^nom = -Kp_ref (xr - xr_des) - Kd_ref xrd.
inline VecX reference_pd(const VecX& xr, const VecX& xrd, const VecX& xr_des,
                         const ControllerGains& gains) {
  return -gains.Kp_ref * (xr - xr_des) - gains.Kd_ref * xrd;
}

inline void validate_scenario(const Scenario& s) {
  const int n = s.model.dof();
  const int m = s.task.m();
  validate_model(s.model);
  auto dim = [](const VecX& v, int want, const char* name) {
    if (v.size() != want) {
      throw ValidationError(std::string("scenario.") + name + ": wrong dimension");
    }
  };
  dim(s.q0, n, "q0");
  dim(s.qd0, n, "qd0");
  dim(s.xr0, m, "xr0");
  dim(s.xrd0, m, "xrd0");
  dim(s.xr_des, m, "xr_des");
  validate_gains(s.gains, m);
  validate_barrier(s.barrier);
  if (s.duration <= 0.0) throw ValidationError("scenario.duration: must be > 0");
  if (s.dt_sim <= 0.0) throw ValidationError("scenario.dt_sim: must be > 0");
  const double ratio = s.dt_ctrl / s.dt_sim;
  if (s.dt_ctrl < s.dt_sim || std::abs(ratio - std::round(ratio)) > 1e-9) {
    throw ValidationError("scenario.dt_ctrl: must be an integer multiple of dt_sim");
  }
  for (const DisturbancePulse& pulse : s.disturbances) {
    dim(pulse.tau_ext, n, "disturbance.tau_ext");
  }
}

namespace detail {

struct SimAbort {
  long step;
};

inline VecX clamp_torque(const VecX& tau, double cap) {
  return tau.cwiseMax(-cap).cwiseMin(cap);
}

}  // namespace detail

// Closed-loop run: the robot integrates with semi-implicit Euler at dt_sim
// under zero-order-hold torques; the controller and the reference double
// integrator update every dt_ctrl. One trace row per control step.
inline SimResult run_scenario(const Scenario& s) {
  validate_scenario(s);
  const RobotModel& model = s.model;
  const int n = model.dof();
  const int m = s.task.m();

  VecX q = s.q0, qd = s.qd0, xr = s.xr0, xrd = s.xrd0;
  const long total_steps = std::lround(s.duration / s.dt_sim);
  const long ctrl_every = std::lround(s.dt_ctrl / s.dt_sim);

  VecX tau_cmd = VecX::Zero(n);
  VecX ur_applied = VecX::Zero(m);

  auto tau_ext_at = [&s, n](double t) {
    VecX e = VecX::Zero(n);
    for (const DisturbancePulse& pulse : s.disturbances) {
      if (t >= pulse.t_start && t < pulse.t_end) e += pulse.tau_ext;
    }
    return e;
  };

  SimResult out;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  for (long step = 0; step < total_steps; ++step) {
    const double t = static_cast<double>(step) * s.dt_sim;

    if (step % ctrl_every == 0) {
      const RobotState st{q, qd};
      TraceRow row;
      row.t = t;
      row.q = q;
      row.qd = qd;
      row.xr = xr;
      row.x = VecX::Constant(m, nan);
      row.V = nan;
      row.Vdot = nan;
      row.mu = nan;

      bool failed = false;
      const VecX ur_nom = reference_pd(xr, xrd, s.xr_des, s.gains);

      try {
        const TaskState task_state = task_map(model, st, s.task);
        const ReferenceState ref{xr, xrd};
        const TaskError err = task_error(task_state, ref);
        const TaskJacobians jac = task_jacobians(model, st, s.task);
        row.x = task_state.x;
        row.mu = manipulability(jac.J);
        const DynamicsTerms dyn = dynamics_terms(model, st);

        const auto t0 = std::chrono::steady_clock::now();
        switch (s.controller) {
          case ControllerKind::zero_torque:
            tau_cmd.setZero();
            ur_applied = ur_nom;
            break;
          case ControllerKind::unconstrained: {
            const TaskSpaceQuantities ops = operational_quantities(dyn, jac);
            tau_cmd = detail::clamp_torque(
                pbc_controller(ops, err, dyn, jac, s.gains, qd, ur_nom).second, s.torque_cap);
            ur_applied = ur_nom;
            break;
          }
          case ControllerKind::damped: {
            tau_cmd =
                pbc_damped_controller(err, dyn, jac, s.gains, qd, ur_nom, s.gains.delta).second;
            ur_applied = ur_nom;
            break;
          }
          case ControllerKind::standard_qp: {
            const TaskSpaceQuantities ops = operational_quantities(dyn, jac);
            const BarrierEval barrier = ecbf_row(model, st, s.task, s.barrier);
            const VecX f_des = pbc_controller(ops, err, dyn, jac, s.gains, qd, ur_nom).first;
            const QpSolution qsol = solve_qp(build_standard_qp(dyn, ops, barrier, f_des, qd));
            row.solver_status = to_string(qsol.status);
            if (qsol.status == QpStatus::optimal) {
              tau_cmd = qsol.tau;
            } else {
              failed = true;  // hold previous torque
            }
            ur_applied = ur_nom;
            break;
          }
          case ControllerKind::proposed_qp: {
            const TaskSpaceQuantities ops = operational_quantities(dyn, jac);
            const BarrierEval barrier = ecbf_row(model, st, s.task, s.barrier);
            const StorageEval storage = storage_eval(ops, err, jac, s.gains, qd);
            const VecX f_des = pbc_controller(ops, err, dyn, jac, s.gains, qd, ur_nom).first;
            const QpSolution qsol = solve_qp(
                build_proposed_qp(dyn, ops, storage, barrier, f_des, ur_nom, s.gains, qd));
            row.solver_status = to_string(qsol.status);
            if (qsol.status == QpStatus::optimal) {
              tau_cmd = qsol.tau;
              ur_applied = qsol.ur;
            } else {
              failed = true;  // hold previous torque and reference input
            }
            break;
          }
        }
        row.solve_time =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        // Log the storage function and its derivative at the realized
        // acceleration (including any active disturbance).
        const TaskSpaceQuantities ops = operational_quantities(dyn, jac);
        const StorageEval storage = storage_eval(ops, err, jac, s.gains, qd);
        const VecX qdd_real = forward_dynamics(model, st, tau_cmd, tau_ext_at(t));
        row.V = storage.V;
        row.Vdot = storage.vdot(qdd_real, ur_applied);
      } catch (const SingularityError&) {
        failed = true;
        if (row.solver_status == "none") row.solver_status = "error";
        if (s.controller != ControllerKind::proposed_qp) ur_applied = ur_nom;
      } catch (const EulerSingularityError&) {
        failed = true;
        if (row.solver_status == "none") row.solver_status = "error";
        if (s.controller != ControllerKind::proposed_qp) ur_applied = ur_nom;
      }

      if (failed) {
        if (s.abort_on_controller_error) {
          out.summary.aborted = true;
          out.summary.abort_row = static_cast<int>(out.trace.size());
          break;
        }
        ++out.summary.violation_count;
      }

      row.tau = tau_cmd;
      row.ur = ur_applied;
      out.trace.push_back(std::move(row));
    }

    const VecX qdd = forward_dynamics(model, {q, qd}, tau_cmd, tau_ext_at(t));
    qd += s.dt_sim * qdd;
    q += s.dt_sim * qd;
    xrd += s.dt_sim * ur_applied;
    xr += s.dt_sim * xrd;

    if (!q.allFinite() || !qd.allFinite() || qd.cwiseAbs().maxCoeff() > 1e9) {
      out.summary.aborted = true;
      out.summary.abort_row = static_cast<int>(out.trace.size()) - 1;
      break;
    }
  }

  Summary& sum = out.summary;
  sum.rows = static_cast<int>(out.trace.size());
  for (const TraceRow& row : out.trace) {
    if (std::isfinite(row.mu)) sum.min_mu = std::min(sum.min_mu, row.mu);
    if (std::isfinite(row.Vdot)) sum.max_Vdot = std::max(sum.max_Vdot, row.Vdot);
  }
  if (!out.trace.empty()) {
    const TraceRow& last = out.trace.back();
    if (last.x.allFinite()) {
      sum.final_error = (last.x - last.xr).norm();
    }
  }
  return out;
}

}  // namespace tpbc
