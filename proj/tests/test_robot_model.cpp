#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "tpbc/model_zoo.hpp"
#include "tpbc/robot_model.hpp"

using namespace tpbc;

namespace {

std::string repo_path(const std::string& rel) { return std::string(TPBC_REPO_DIR) + "/" + rel; }

const char* kPendulumDoc = R"({
  "gravity": [0.0, 0.0, -9.81],
  "ee_offset": { "translation": [1.0, 0.0, 0.0], "rpy": [0, 0, 0] },
  "joints": [
    { "name": "hinge", "axis": [0, 1, 0],
      "origin_translation": [0, 0, 0], "origin_rpy": [0, 0, 0],
      "link": { "mass": 1.0, "com": [1, 0, 0], "inertia": [0, 0, 0, 0, 0, 0] } }
  ]
})";

}  // namespace

TEST_CASE("load_model: minimal single-pendulum document") {
  const RobotModel m = load_model(kPendulumDoc);
  REQUIRE(m.dof() == 1);
  CHECK(m.links[0].mass == 1.0);
  CHECK(m.gravity.z() == Catch::Approx(-9.81));
}

TEST_CASE("load_model: bundled planar two-link geometry") {
  const RobotModel m = load_model_file(repo_path("models/planar2.json"));
  REQUIRE(m.dof() == 2);
  const LinkPoses fk = forward_kinematics(m, VecX::Zero(2));
  CHECK(fk.p_ee.isApprox(Vec3(2.0, 0.0, 0.0), 1e-12));
}

TEST_CASE("load_model: non-unit axis is rejected by name") {
  std::string doc = kPendulumDoc;
  const auto pos = doc.find("[0, 1, 0]");
  doc.replace(pos, 9, "[1, 1, 0]");
  try {
    load_model(doc);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("axis") != std::string::npos);
  }
}

TEST_CASE("load_model: malformed document") {
  CHECK_THROWS_AS(load_model("{ not json"), ParseError);
  CHECK_THROWS_AS(load_model("{}"), ParseError);
  CHECK_THROWS_AS(load_model(R"({"gravity": [0, 0]})"), ParseError);
}

TEST_CASE("validate_model: joint/link length mismatch and bad inertia") {
  RobotModel m = make_pendulum();
  m.links.push_back(m.links[0]);
  try {
    validate_model(m);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("links") != std::string::npos);
  }

  RobotModel bad = make_pendulum();
  bad.links[0].inertia(0, 1) = 1.0;  // asymmetric
  try {
    validate_model(bad);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("inertia") != std::string::npos);
  }

  RobotModel indef = make_pendulum();
  indef.links[0].inertia = -Mat3::Identity();
  CHECK_THROWS_AS(validate_model(indef), ValidationError);

  RobotModel negative_mass = make_pendulum();
  negative_mass.links[0].mass = -0.1;
  CHECK_THROWS_AS(validate_model(negative_mass), ValidationError);
}

TEST_CASE("forward_kinematics: planar arm poses") {
  const RobotModel m = make_planar2();
  VecX q(2);

  q << 0.0, 0.0;
  CHECK(forward_kinematics(m, q).p_ee.isApprox(Vec3(2.0, 0.0, 0.0), 1e-12));

  q << M_PI / 2.0, 0.0;
  // two planar rotations by hand: both links along +y
  CHECK(forward_kinematics(m, q).p_ee.isApprox(Vec3(0.0, 2.0, 0.0), 1e-12));

  q << M_PI / 2.0, M_PI / 2.0;
  CHECK(forward_kinematics(m, q).p_ee.isApprox(Vec3(-1.0, 1.0, 0.0), 1e-12));
}

TEST_CASE("forward_kinematics: pendulum half turn") {
  const RobotModel m = make_pendulum();
  VecX q(1);
  q << M_PI;
  CHECK(forward_kinematics(m, q).p_ee.isApprox(Vec3(-1.0, 0.0, 0.0), 1e-9));
}

TEST_CASE("forward_kinematics: rotations stay orthonormal over random chains") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const RobotModel m = oracles::random_chain(rng, 1 + static_cast<int>(rng() % 7));
    for (int k = 0; k < 20; ++k) {
      const VecX q = oracles::random_vec(rng, m.dof(), M_PI);
      const LinkPoses fk = forward_kinematics(m, q);
      for (const Mat3& r : fk.R) {
        CHECK((r * r.transpose() - Mat3::Identity()).norm() < 1e-9);
        CHECK(r.determinant() == Catch::Approx(1.0).margin(1e-9));
      }
      CHECK((fk.R_ee * fk.R_ee.transpose() - Mat3::Identity()).norm() < 1e-9);
    }
  }
}

TEST_CASE("forward_kinematics: chain composition") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const RobotModel m = oracles::random_chain(rng, 2 + static_cast<int>(rng() % 5));
    const VecX q = oracles::random_vec(rng, m.dof(), M_PI);
    const LinkPoses fk = forward_kinematics(m, q);
    for (int k = 1; k < m.dof(); ++k) {
      const JointSpec& j = m.joints[k];
      const Vec3 p = fk.p[k - 1] + fk.R[k - 1] * j.origin_translation;
      const Mat3 r = fk.R[k - 1] * j.origin_rotation * axis_rotation(j.axis, q[k]);
      CHECK((fk.p[k] - p).norm() < 1e-12);
      CHECK((fk.R[k] - r).norm() < 1e-12);
    }
  }
}

TEST_CASE("bundled model files agree with the programmatic builders") {
  const RobotModel file7 = load_model_file(repo_path("models/gen7.json"));
  const RobotModel gen7 = make_gen7();
  REQUIRE(file7.dof() == gen7.dof());
  for (int i = 0; i < gen7.dof(); ++i) {
    CHECK((file7.joints[i].axis - gen7.joints[i].axis).norm() < 1e-12);
    CHECK((file7.joints[i].origin_translation - gen7.joints[i].origin_translation).norm() <
          1e-12);
    CHECK(file7.links[i].mass == Catch::Approx(gen7.links[i].mass));
    CHECK((file7.links[i].inertia - gen7.links[i].inertia).norm() < 1e-12);
    CHECK((file7.links[i].com - gen7.links[i].com).norm() < 1e-12);
  }

  const RobotModel file2 = load_model_file(repo_path("models/planar2.json"));
  const RobotModel planar = make_planar2();
  REQUIRE(file2.dof() == planar.dof());
  for (int i = 0; i < planar.dof(); ++i) {
    CHECK((file2.joints[i].origin_translation - planar.joints[i].origin_translation).norm() <
          1e-12);
  }

  const RobotModel file1 = load_model_file(repo_path("models/pendulum.json"));
  CHECK(file1.dof() == make_pendulum().dof());
}
