#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tpbc/core.hpp"
#include "tpbc/rotation.hpp"

namespace tpbc {

// One revolute joint plus the fixed transform from the parent link frame to
// the joint frame. The joint rotates about `axis`, expressed in the joint
// frame (i.e. after the origin transform is applied).
struct JointSpec {
  std::string name;
  Vec3 axis = Vec3::UnitZ();
  Vec3 origin_translation = Vec3::Zero();
  Mat3 origin_rotation = Mat3::Identity();
};

// Rigid body attached to (and rotating with) its joint frame.
struct LinkSpec {
  double mass = 0.0;          // kg
  Vec3 com = Vec3::Zero();    // m, in link frame
  Mat3 inertia = Mat3::Zero();  // kg m^2, about com, in link frame
};

struct RobotModel {
  std::vector<JointSpec> joints;
  std::vector<LinkSpec> links;
  Vec3 gravity = {0.0, 0.0, -9.81};  // m/s^2, world frame
  Vec3 ee_translation = Vec3::Zero();  // end-effector frame in last link frame
  Mat3 ee_rotation = Mat3::Identity();

  int dof() const { return static_cast<int>(joints.size()); }
};

struct RobotState {
  VecX q;
  VecX qd;
};

namespace detail {

inline void check_dims(const RobotModel& model, const VecX& q, const char* who) {
  if (q.size() != model.dof()) {
    throw ValidationError(std::string(who) + ": dimension mismatch (expected " +
                          std::to_string(model.dof()) + ", got " + std::to_string(q.size()) + ")");
  }
}

}  // namespace detail

// Validates all type invariants; throws ValidationError naming the first
// offending field.
inline void validate_model(const RobotModel& model) {
  if (model.joints.empty()) {
    throw ValidationError("joints: model must have at least one joint");
  }
  if (model.joints.size() != model.links.size()) {
    throw ValidationError("links: joints and links must have equal length");
  }
  for (size_t i = 0; i < model.joints.size(); ++i) {
    const JointSpec& j = model.joints[i];
    const std::string where = "joints[" + std::to_string(i) + "] (" + j.name + ")";
    if (std::abs(j.axis.norm() - 1.0) > 1e-9) {
      throw ValidationError(where + ".axis: not a unit vector (norm " +
                            std::to_string(j.axis.norm()) + ")");
    }
    const Mat3& r = j.origin_rotation;
    if ((r * r.transpose() - Mat3::Identity()).norm() > 1e-9 ||
        std::abs(r.determinant() - 1.0) > 1e-9) {
      throw ValidationError(where + ".origin_rotation: not a proper rotation");
    }
    const LinkSpec& l = model.links[i];
    if (l.mass < 0.0) {
      throw ValidationError(where + ".link.mass: negative");
    }
    if ((l.inertia - l.inertia.transpose()).norm() > 1e-12) {
      throw ValidationError(where + ".link.inertia: not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Mat3> es(l.inertia);
    if (es.eigenvalues().minCoeff() < -1e-12) {
      throw ValidationError(where + ".link.inertia: not positive semidefinite");
    }
  }
  const Mat3& re = model.ee_rotation;
  if ((re * re.transpose() - Mat3::Identity()).norm() > 1e-9 ||
      std::abs(re.determinant() - 1.0) > 1e-9) {
    throw ValidationError("ee_offset.rotation: not a proper rotation");
  }
}

namespace detail {

inline Vec3 read_vec3(const nlohmann::json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_array() || j[key].size() != 3) {
    throw ParseError("model: key `" + key + "` must be an array of 3 numbers");
  }
  Vec3 v;
  for (int k = 0; k < 3; ++k) v[k] = j[key][k].get<double>();
  return v;
}

inline double read_num(const nlohmann::json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_number()) {
    throw ParseError("model: key `" + key + "` must be a number");
  }
  return j[key].get<double>();
}

}  // namespace detail

// Parses a model document. Schema (JSON):
//   gravity: [gx, gy, gz]
//   ee_offset: { translation: [x,y,z], rpy: [r,p,y] }
//   joints: [ { name, axis: [3], origin_translation: [3], origin_rpy: [3],
//               link: { mass, com: [3], inertia: [xx,yy,zz,xy,xz,yz] } }, ... ]
// Angles in radians, lengths in meters.
inline RobotModel load_model(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("model: ") + e.what());
  }

  RobotModel model;
  model.gravity = detail::read_vec3(doc, "gravity");

  if (!doc.contains("ee_offset") || !doc["ee_offset"].is_object()) {
    throw ParseError("model: key `ee_offset` must be an object");
  }
  model.ee_translation = detail::read_vec3(doc["ee_offset"], "translation");
  model.ee_rotation = rpy_to_matrix(detail::read_vec3(doc["ee_offset"], "rpy"));

  if (!doc.contains("joints") || !doc["joints"].is_array() || doc["joints"].empty()) {
    throw ParseError("model: key `joints` must be a non-empty array");
  }
  for (const auto& jj : doc["joints"]) {
    JointSpec joint;
    joint.name = jj.contains("name") ? jj["name"].get<std::string>() : "";
    joint.axis = detail::read_vec3(jj, "axis");
    joint.origin_translation = detail::read_vec3(jj, "origin_translation");
    joint.origin_rotation = rpy_to_matrix(detail::read_vec3(jj, "origin_rpy"));

    if (!jj.contains("link") || !jj["link"].is_object()) {
      throw ParseError("model: joint `" + joint.name + "`: key `link` must be an object");
    }
    const auto& lj = jj["link"];
    LinkSpec link;
    link.mass = detail::read_num(lj, "mass");
    link.com = detail::read_vec3(lj, "com");
    if (!lj.contains("inertia") || !lj["inertia"].is_array() || lj["inertia"].size() != 6) {
      throw ParseError("model: joint `" + joint.name +
                       "`: key `inertia` must be an array of 6 numbers (xx,yy,zz,xy,xz,yz)");
    }
    const double xx = lj["inertia"][0].get<double>(), yy = lj["inertia"][1].get<double>(),
                 zz = lj["inertia"][2].get<double>(), xy = lj["inertia"][3].get<double>(),
                 xz = lj["inertia"][4].get<double>(), yz = lj["inertia"][5].get<double>();
    link.inertia << xx, xy, xz, xy, yy, yz, xz, yz, zz;

    model.joints.push_back(std::move(joint));
    model.links.push_back(link);
  }

  validate_model(model);
  return model;
}

inline RobotModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("model: cannot open file `" + path + "`");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_model(ss.str());
}

// World-frame pose of every link frame and the end-effector frame.
struct LinkPoses {
  std::vector<Mat3> R;  // link frame orientations
  std::vector<Vec3> p;  // link frame origins (= joint origins)
  Mat3 R_ee;
  Vec3 p_ee;
};

inline LinkPoses forward_kinematics(const RobotModel& model, const VecX& q) {
  detail::check_dims(model, q, "forward_kinematics");
  const int n = model.dof();
  LinkPoses out;
  out.R.resize(n);
  out.p.resize(n);
  Mat3 R = Mat3::Identity();
  Vec3 p = Vec3::Zero();
  for (int i = 0; i < n; ++i) {
    const JointSpec& j = model.joints[i];
    p = p + R * j.origin_translation;
    R = R * j.origin_rotation * axis_rotation(j.axis, q[i]);
    out.R[i] = R;
    out.p[i] = p;
  }
  out.p_ee = p + R * model.ee_translation;
  out.R_ee = R * model.ee_rotation;
  return out;
}

}  // namespace tpbc
