#pragma once

#include "tpbc/core.hpp"
#include "tpbc/robot_model.hpp"

namespace tpbc {

// Point-mass pendulum: axis y, link along +x, com at the link end.
// q = 0 is horizontal; gravity acts along -z.
inline RobotModel make_pendulum(double length = 1.0, double mass = 1.0) {
  RobotModel m;
  JointSpec j;
  j.name = "hinge";
  j.axis = Vec3::UnitY();
  m.joints.push_back(j);
  LinkSpec l;
  l.mass = mass;
  l.com = {length, 0.0, 0.0};
  l.inertia = Mat3::Zero();
  m.links.push_back(l);
  m.gravity = {0.0, 0.0, -9.81};
  m.ee_translation = {length, 0.0, 0.0};
  validate_model(m);
  return m;
}

// Two-link planar arm in the x-y plane (both joints about +z), point masses
// at the link ends, in-plane gravity along -y.
inline RobotModel make_planar2(double l1 = 1.0, double l2 = 1.0, double m1 = 1.0,
                               double m2 = 1.0) {
  RobotModel m;
  JointSpec j1;
  j1.name = "shoulder";
  j1.axis = Vec3::UnitZ();
  m.joints.push_back(j1);
  JointSpec j2;
  j2.name = "elbow";
  j2.axis = Vec3::UnitZ();
  j2.origin_translation = {l1, 0.0, 0.0};
  m.joints.push_back(j2);

  LinkSpec a;
  a.mass = m1;
  a.com = {l1, 0.0, 0.0};
  a.inertia = Mat3::Zero();
  m.links.push_back(a);
  LinkSpec b;
  b.mass = m2;
  b.com = {l2, 0.0, 0.0};
  b.inertia = Mat3::Zero();
  m.links.push_back(b);

  m.gravity = {0.0, -9.81, 0.0};
  m.ee_translation = {l2, 0.0, 0.0};
  validate_model(m);
  return m;
}

// Generic 7-DoF arm with alternating z/y axes and plausible (not
// vendor-exact) masses and inertias; roughly 1 m reach.
inline RobotModel make_gen7() {
  RobotModel m;
  const Vec3 axes[7] = {Vec3::UnitZ(), Vec3::UnitY(), Vec3::UnitZ(), Vec3::UnitY(),
                        Vec3::UnitZ(), Vec3::UnitY(), Vec3::UnitZ()};
  const double offsets[7] = {0.1565, 0.1285, 0.2105, 0.2105, 0.2085, 0.1059, 0.1059};
  const double masses[7] = {1.6, 1.2, 1.2, 0.9, 0.7, 0.7, 0.5};
  const double next_offset[7] = {0.1285, 0.2105, 0.2105, 0.2085, 0.1059, 0.1059, 0.0615};
  const char* names[7] = {"j1", "j2", "j3", "j4", "j5", "j6", "j7"};

  for (int i = 0; i < 7; ++i) {
    JointSpec j;
    j.name = names[i];
    j.axis = axes[i];
    j.origin_translation = {0.0, 0.0, offsets[i]};
    m.joints.push_back(j);

    LinkSpec l;
    l.mass = masses[i];
    l.com = {0.0, 0.0, 0.5 * next_offset[i]};
    const double len = next_offset[i];
    const double i_bend = masses[i] * len * len / 12.0 + 1e-3;
    l.inertia = Vec3(i_bend, i_bend, 8e-4).asDiagonal();
    m.links.push_back(l);
  }
  m.gravity = {0.0, 0.0, -9.81};
  m.ee_translation = {0.0, 0.0, 0.0615};
  validate_model(m);
  return m;
}

}  // namespace tpbc
