#pragma once

#include "tpbc/core.hpp"
#include "tpbc/dynamics.hpp"
#include "tpbc/manipulability.hpp"
#include "tpbc/qp.hpp"
#include "tpbc/task_space.hpp"

namespace tpbc {

struct TorqueCommand {
  VecX tau;
  VecX ur_applied;
};

// Rank-deficient directions in the objective (the torque null space, and qdd
// wherever only the equality pins it) get a small ridge so the active-set
// solve is deterministic and picks the minimum-norm completion.
constexpr double kQpObjectiveRidge = 1e-9;

// Standard constrained PBC: min ||Jbar' tau - f_des||^2 subject to the
// dynamics equality and the ECBF row. Variables [qdd; tau].
inline QpProblem build_standard_qp(const DynamicsTerms& dyn, const TaskSpaceQuantities& ts,
                                   const BarrierEval& barrier, const VecX& f_des,
                                   const VecX& qd) {
  const int n = static_cast<int>(dyn.M.rows());
  const int d = 2 * n;

  QpProblem p;
  p.layout = {n, n, 0};
  p.H = MatX::Zero(d, d);
  p.H.block(n, n, n, n) = 2.0 * ts.Jbar * ts.Jbar.transpose();
  p.H += kQpObjectiveRidge * MatX::Identity(d, d);
  p.g = VecX::Zero(d);
  p.g.segment(n, n) = -2.0 * ts.Jbar * f_des;

  p.Aeq = MatX::Zero(n, d);
  p.Aeq.block(0, 0, n, n) = dyn.M;
  p.Aeq.block(0, n, n, n) = -MatX::Identity(n, n);
  p.beq = -(dyn.C * qd + dyn.tau_g);

  p.Aineq = MatX::Zero(1, d);
  p.Aineq.block(0, 0, 1, n) = barrier.a.transpose();
  p.bineq = VecX::Constant(1, barrier.b);
  return p;
}

// Proposed controller: min w1 ||ur - ur_nom||^2 + w2 ||Jbar' tau - f_des||^2
// subject to dynamics, Vdot(qdd, ur) <= 0, and the ECBF row.
// Variables [qdd; tau; ur].
inline QpProblem build_proposed_qp(const DynamicsTerms& dyn, const TaskSpaceQuantities& ts,
                                   const StorageEval& storage, const BarrierEval& barrier,
                                   const VecX& f_des, const VecX& ur_nom,
                                   const ControllerGains& gains, const VecX& qd) {
  const int n = static_cast<int>(dyn.M.rows());
  const int m = static_cast<int>(ur_nom.size());
  const int d = 2 * n + m;

  QpProblem p;
  p.layout = {n, n, m};
  p.H = MatX::Zero(d, d);
  p.H.block(n, n, n, n) = 2.0 * gains.w2 * ts.Jbar * ts.Jbar.transpose();
  p.H.block(2 * n, 2 * n, m, m) = 2.0 * gains.w1 * MatX::Identity(m, m);
  p.H += kQpObjectiveRidge * MatX::Identity(d, d);
  p.g = VecX::Zero(d);
  p.g.segment(n, n) = -2.0 * gains.w2 * ts.Jbar * f_des;
  p.g.segment(2 * n, m) = -2.0 * gains.w1 * ur_nom;

  p.Aeq = MatX::Zero(n, d);
  p.Aeq.block(0, 0, n, n) = dyn.M;
  p.Aeq.block(0, n, n, n) = -MatX::Identity(n, n);
  p.beq = -(dyn.C * qd + dyn.tau_g);

  // Row 0: ECBF a.qdd >= b. Row 1: Vdot <= 0, i.e.
  // -Vdot_qdd.qdd - Vdot_ur.ur >= Vdot_const.
  p.Aineq = MatX::Zero(2, d);
  p.bineq = VecX::Zero(2);
  p.Aineq.block(0, 0, 1, n) = barrier.a.transpose();
  p.bineq[0] = barrier.b;
  p.Aineq.block(1, 0, 1, n) = -storage.Vdot_qdd.transpose();
  p.Aineq.block(1, 2 * n, 1, m) = -storage.Vdot_ur.transpose();
  p.bineq[1] = storage.Vdot_const;
  return p;
}

}  // namespace tpbc
