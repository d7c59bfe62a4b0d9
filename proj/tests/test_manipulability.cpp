#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"
#include "tpbc/manipulability.hpp"
#include "tpbc/model_zoo.hpp"

using namespace tpbc;

TEST_CASE("manipulability: planar values and singular configuration") {
  const RobotModel m = make_planar2();
  const TaskMapConfig cfg{TaskMode::planar2};
  VecX q(2);

  q << 0.3, M_PI / 2.0;
  CHECK(manipulability(task_jacobian(m, q, cfg)) == Catch::Approx(1.0).margin(1e-12));

  q << 0.3, 0.0;
  CHECK(manipulability(task_jacobian(m, q, cfg)) == Catch::Approx(0.0).margin(1e-12));

  const oracles::Planar2 sym;
  std::mt19937_64 rng(87);
  for (int k = 0; k < 100; ++k) {
    const VecX qq = oracles::random_vec(rng, 2, M_PI);
    CHECK(manipulability(task_jacobian(m, qq, cfg)) ==
          Catch::Approx(sym.manipulability(qq)).margin(1e-10));
  }
}

TEST_CASE("manipulability: agrees with the Gram-determinant route") {
  std::mt19937_64 rng(89);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 200; ++k) {
    const int mrows = 1 + static_cast<int>(rng() % 6);
    const int ncols = mrows + static_cast<int>(rng() % 3);
    MatX j(mrows, ncols);
    for (int r = 0; r < mrows; ++r) {
      for (int c = 0; c < ncols; ++c) j(r, c) = u(rng);
    }
    const double det_route = std::sqrt(std::max((j * j.transpose()).determinant(), 0.0));
    CHECK(manipulability(j) == Catch::Approx(det_route).epsilon(1e-10).margin(1e-12));
  }
}

TEST_CASE("manipulability_gradient: planar analytic oracle") {
  const RobotModel m = make_planar2();
  const TaskMapConfig cfg{TaskMode::planar2};
  const oracles::Planar2 sym;
  VecX q(2);

  q << 0.2, M_PI / 2.0;
  VecX g = manipulability_gradient(m, q, cfg);
  CHECK(std::abs(g[0]) < 1e-9);
  CHECK(std::abs(g[1]) < 1e-9);  // cos(pi/2) = 0

  q << 0.2, M_PI / 4.0;
  g = manipulability_gradient(m, q, cfg);
  CHECK(std::abs(g[0]) < 1e-9);
  CHECK(g[1] == Catch::Approx(std::cos(M_PI / 4.0)).margin(1e-6));

  std::mt19937_64 rng(91);
  for (int k = 0; k < 100; ++k) {
    VecX qq = oracles::random_vec(rng, 2, M_PI);
    if (std::abs(std::sin(qq[1])) < 0.05) continue;
    g = manipulability_gradient(m, qq, cfg);
    CHECK(std::abs(g[1] - sym.manipulability_gradient_2(qq)) < 1e-6);
  }
}

TEST_CASE("manipulability_gradient: matches finite differences of mu") {
  std::mt19937_64 rng(93);
  const RobotModel m = make_gen7();
  const TaskMapConfig cfg{TaskMode::position3};
  int checked = 0;
  while (checked < 500) {
    const VecX q = oracles::random_vec(rng, 7, 1.6);
    if (manipulability(task_jacobian(m, q, cfg)) < 1e-3) continue;
    const VecX grad = manipulability_gradient(m, q, cfg);
    const VecX fd = oracles::fd_gradient(
        [&](const VecX& qq) { return manipulability(task_jacobian(m, qq, cfg)); }, q, 1e-5);
    CHECK((grad - fd).cwiseAbs().maxCoeff() <= 1e-5);
    ++checked;
  }
}

TEST_CASE("manipulability_gradient: smoothness probe") {
  std::mt19937_64 rng(97);
  const RobotModel m = make_gen7();
  const TaskMapConfig cfg{TaskMode::position3};
  int checked = 0;
  while (checked < 100) {
    const VecX q = oracles::random_vec(rng, 7, 1.6);
    if (manipulability(task_jacobian(m, q, cfg)) < 1e-2) continue;
    const VecX grad = manipulability_gradient(m, q, cfg);
    VecX dq = oracles::random_vec(rng, 7, 1.0);
    dq *= 1e-4 / dq.norm();
    const double mu0 = manipulability(task_jacobian(m, q, cfg));
    const double mu1 = manipulability(task_jacobian(m, q + dq, cfg));
    CHECK(std::abs(mu1 - mu0 - grad.dot(dq)) <= 1e-6);
    ++checked;
  }
}

TEST_CASE("manipulability_gradient: refuses singular input") {
  const RobotModel m = make_planar2();
  const TaskMapConfig cfg{TaskMode::planar2};
  VecX q(2);
  q << 0.4, 0.0;
  CHECK_THROWS_AS(manipulability_gradient(m, q, cfg), SingularityError);
}

TEST_CASE("ecbf_row: boundary at rest and deep interior") {
  const RobotModel m = make_planar2();
  const TaskMapConfig cfg{TaskMode::planar2};
  VecX q(2), qd(2);
  q << 0.1, M_PI / 4.0;
  qd.setZero();

  // epsilon = current mu puts the state exactly on the boundary
  BarrierConfig on_boundary;
  on_boundary.epsilon = manipulability(task_jacobian(m, q, cfg));
  BarrierEval eval = ecbf_row(m, {q, qd}, cfg, on_boundary);
  CHECK(eval.h == Catch::Approx(0.0).margin(1e-15));
  CHECK(eval.b == Catch::Approx(0.0).margin(1e-12));
  CHECK(eval.inside_safe_set);

  // deep interior: the row is slack (b < 0)
  BarrierConfig interior;
  interior.epsilon = 0.03;
  eval = ecbf_row(m, {q, qd}, cfg, interior);
  CHECK(eval.h > 0.0);
  CHECK(eval.b == Catch::Approx(-interior.alpha1 * eval.h).margin(1e-12));
  CHECK(eval.b < 0.0);

  // h and hdot bookkeeping
  qd << 0.3, -0.2;
  eval = ecbf_row(m, {q, qd}, cfg, interior);
  CHECK(eval.h == eval.mu - interior.epsilon);
  CHECK(eval.hdot == Catch::Approx(eval.Jmu.dot(qd)).margin(1e-15));
}

TEST_CASE("ecbf_row: outside the safe set is flagged, row still returned") {
  const RobotModel m = make_planar2();
  const TaskMapConfig cfg{TaskMode::planar2};
  VecX q(2), qd(2);
  q << 0.1, 0.05;  // mu ~ 0.05
  qd << 0.0, 0.1;
  BarrierConfig b;
  b.epsilon = 0.5;  // unreachable bound: h < 0
  const BarrierEval eval = ecbf_row(m, {q, qd}, cfg, b);
  CHECK_FALSE(eval.inside_safe_set);
  CHECK(eval.a.size() == 2);
  CHECK(std::isfinite(eval.b));
}

TEST_CASE("ecbf_row: nonzero row at random safe states (feasibility)") {
  std::mt19937_64 rng(101);
  const RobotModel gen7 = make_gen7();
  const TaskMapConfig pose{TaskMode::pose6};
  BarrierConfig cfg;
  cfg.epsilon = 0.03;
  int checked = 0;
  while (checked < 500) {
    const VecX q = oracles::random_vec(rng, 7, 1.8);
    const VecX qd = oracles::random_vec(rng, 7, 1.0);
    double mu;
    try {
      mu = manipulability(task_jacobian(gen7, q, pose));
    } catch (const EulerSingularityError&) {
      continue;
    }
    if (mu < cfg.epsilon) continue;
    const BarrierEval eval = ecbf_row(gen7, {q, qd}, pose, cfg);
    CHECK(eval.a.norm() > 1e-12);
    ++checked;
  }

  const RobotModel planar = make_planar2();
  const TaskMapConfig planar_cfg{TaskMode::planar2};
  checked = 0;
  while (checked < 500) {
    const VecX q = oracles::random_vec(rng, 2, M_PI);
    const VecX qd = oracles::random_vec(rng, 2, 1.0);
    if (manipulability(task_jacobian(planar, q, planar_cfg)) < cfg.epsilon) continue;
    const BarrierEval eval = ecbf_row(planar, {q, qd}, planar_cfg, cfg);
    CHECK(eval.a.norm() > 1e-12);
    ++checked;
  }
}

TEST_CASE("validate_barrier: pole conditions") {
  BarrierConfig ok;
  CHECK_NOTHROW(validate_barrier(ok));

  BarrierConfig complex_poles;
  complex_poles.alpha1 = 100.0;
  complex_poles.alpha2 = 2.0;  // discriminant < 0
  CHECK_THROWS_AS(validate_barrier(complex_poles), ValidationError);

  BarrierConfig bad_eps;
  bad_eps.epsilon = 0.0;
  CHECK_THROWS_AS(validate_barrier(bad_eps), ValidationError);
}
