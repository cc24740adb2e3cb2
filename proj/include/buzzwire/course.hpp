// Copyright 2026 The Buzzwire Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "buzzwire/errors.hpp"
#include "buzzwire/geometry.hpp"

namespace buzzwire {

inline constexpr int kCourseSchemaVersion = 1;

/// Wire centerline as a polyline with a constant radius, plus the
/// arc-length window [start_s, end_s] that bounds the game.
class WireCourse {
 public:
  WireCourse() = default;

  WireCourse(std::string name, std::vector<Vector3d> centerline, double wire_radius, double start_s,
             double end_s)
      : name_(std::move(name)),
        centerline_(std::move(centerline)),
        wire_radius_(wire_radius),
        start_s_(start_s),
        end_s_(end_s) {
    if (centerline_.size() < 2) throw ParseError("points", "need at least two centerline points");
    if (!(wire_radius_ > 0.0)) throw ParseError("wire_radius", "must be positive");
    arc_.resize(centerline_.size());
    arc_[0] = 0.0;
    for (std::size_t i = 1; i < centerline_.size(); ++i) {
      const double len = (centerline_[i] - centerline_[i - 1]).norm();
      if (!(len > 0.0)) throw ParseError("points", "consecutive points " + std::to_string(i - 1) + " and " +
                                                      std::to_string(i) + " coincide");
      arc_[i] = arc_[i - 1] + len;
    }
    if (!(start_s_ >= 0.0)) throw ParseError("start_s", "must be >= 0");
    if (!(end_s_ <= total_length() + 1e-12)) throw ParseError("end_s", "exceeds total arc length");
    if (!(start_s_ < end_s_)) throw ParseError("end_s", "must be greater than start_s");
  }

  const std::string& name() const { return name_; }
  const std::vector<Vector3d>& centerline() const { return centerline_; }
  double wire_radius() const { return wire_radius_; }
  double start_s() const { return start_s_; }
  double end_s() const { return end_s_; }
  double total_length() const { return arc_.back(); }
  std::size_t segment_count() const { return centerline_.size() - 1; }
  double arc_at_vertex(std::size_t i) const { return arc_[i]; }

  Vector3d point_at(double s) const {
    const auto [seg, u] = locate(s);
    return centerline_[seg] + u * (centerline_[seg + 1] - centerline_[seg]);
  }

  Vector3d tangent_at(double s) const {
    const auto [seg, u] = locate(s);
    return (centerline_[seg + 1] - centerline_[seg]).normalized();
  }

  struct Projection {
    double s = 0.0;
    Vector3d point = Vector3d::Zero();
    double distance = std::numeric_limits<double>::infinity();
  };

  /// Nearest point on the centerline (exact, over all segments).
  Projection project(const Vector3d& q) const { return project_window(q, 0.0, total_length()); }

  /// Nearest point restricted to segments overlapping [s_lo, s_hi].
  Projection project_window(const Vector3d& q, double s_lo, double s_hi) const {
    Projection best;
    for (std::size_t i = 0; i + 1 < centerline_.size(); ++i) {
      if (arc_[i + 1] < s_lo || arc_[i] > s_hi) continue;
      const Vector3d a = centerline_[i];
      const Vector3d ab = centerline_[i + 1] - a;
      const double u = std::clamp((q - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
      const Vector3d p = a + u * ab;
      const double d = (q - p).norm();
      if (d < best.distance) {
        best.distance = d;
        best.point = p;
        best.s = arc_[i] + u * (arc_[i + 1] - arc_[i]);
      }
    }
    return best;
  }

  /// Points at arc-length steps no larger than `spacing`, endpoints included.
  std::vector<std::pair<double, Vector3d>> resample(double spacing) const {
    const auto n = static_cast<std::size_t>(std::ceil(total_length() / spacing));
    std::vector<std::pair<double, Vector3d>> out;
    out.reserve(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
      const double s = std::min(total_length(), total_length() * static_cast<double>(j) / static_cast<double>(n));
      out.emplace_back(s, point_at(s));
    }
    return out;
  }

 private:
  std::pair<std::size_t, double> locate(double s) const {
    s = std::clamp(s, 0.0, total_length());
    auto it = std::upper_bound(arc_.begin(), arc_.end(), s);
    std::size_t seg = (it == arc_.begin()) ? 0 : static_cast<std::size_t>(it - arc_.begin()) - 1;
    seg = std::min(seg, centerline_.size() - 2);
    const double len = arc_[seg + 1] - arc_[seg];
    return {seg, (s - arc_[seg]) / len};
  }

  std::string name_;
  std::vector<Vector3d> centerline_;
  std::vector<double> arc_;
  double wire_radius_ = 0.0;
  double start_s_ = 0.0;
  double end_s_ = 0.0;
};

struct LoopHandle {
  Pose pose;
  double ring_radius = 0.05;
  double tube_radius = 0.004;
  Vector3d com_offset = Vector3d::Zero();  // handle-local

  Vector3d center() const { return pose.position; }
  Vector3d normal() const { return pose.orientation * Vector3d::UnitZ(); }
  Vector3d com() const { return pose.transform(com_offset); }
};

enum class PointClass { Attractive, Repulsive };

struct EnvironmentPoint {
  Vector3d position = Vector3d::Zero();
  PointClass cls = PointClass::Attractive;
  double arc_s = 0.0;
};

struct NeighborhoodSet {
  std::vector<EnvironmentPoint> attractive;
  std::vector<EnvironmentPoint> repulsive;

  std::size_t size() const { return attractive.size() + repulsive.size(); }
  bool empty() const { return attractive.empty() && repulsive.empty(); }
};

struct ContactReport {
  bool in_contact = false;
  double penetration = 0.0;
  double proxy_force = 0.0;
  bool fatal = false;
};

/// Distance from `q` to the handle's ring circle (the tube centerline).
inline double distance_to_ring(const LoopHandle& handle, const Vector3d& q) {
  const Vector3d v = q - handle.center();
  const Vector3d n = handle.normal();
  const double h = v.dot(n);
  const double r = (v - h * n).norm();
  return std::hypot(h, r - handle.ring_radius);
}

/// Keeps centerline samples within `range` of any control point. A sample whose
/// nearest handle feature is the ring tube is repulsive; one nearer the ring
/// center is attractive.
inline NeighborhoodSet classify_neighborhood(std::span<const std::pair<double, Vector3d>> samples,
                                             const LoopHandle& handle, double range) {
  NeighborhoodSet out;
  const auto cps = octagon_points(handle.pose, handle.ring_radius);
  const double range2 = range * range;
  // Cheap reject: every control point lies at ring_radius from the center.
  const double reach = handle.ring_radius + range;
  const double reach2 = reach * reach;
  for (const auto& [s, p] : samples) {
    if ((p - handle.center()).squaredNorm() > reach2) continue;
    bool near = false;
    for (const auto& c : cps) {
      if ((p - c).squaredNorm() <= range2) {
        near = true;
        break;
      }
    }
    if (!near) continue;
    const double to_ring = distance_to_ring(handle, p);
    const double to_center = (p - handle.center()).norm();
    if (to_ring < to_center) {
      out.repulsive.push_back({p, PointClass::Repulsive, s});
    } else {
      out.attractive.push_back({p, PointClass::Attractive, s});
    }
  }
  return out;
}

inline NeighborhoodSet sample_environment(const WireCourse& course, const LoopHandle& handle, double spacing,
                                          double range) {
  if (!(spacing > 0.0)) throw std::invalid_argument("sample_environment: spacing must be positive");
  if (!(range > 0.0)) throw std::invalid_argument("sample_environment: range must be positive");
  const auto samples = course.resample(spacing);
  return classify_neighborhood(samples, handle, range);
}

inline double point_segment_distance(const Vector3d& q, const Vector3d& a, const Vector3d& b) {
  const Vector3d ab = b - a;
  const double u = std::clamp((q - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
  return (q - (a + u * ab)).norm();
}

/// Minimum distance between the ring circle and the wire centerline. The ring
/// is sampled at <= `resolution` arc spacing; wire segments are exact.
/// Segments farther than a few centimeters from the ring are skipped, so the
/// result is +inf when the wire is nowhere near the handle.
inline double ring_wire_distance(const WireCourse& course, const LoopHandle& handle, double resolution = 1e-3) {
  const auto n = static_cast<int>(std::ceil(2.0 * M_PI * handle.ring_radius / resolution));
  const Vector3d c = handle.center();
  const double far = course.wire_radius() + handle.tube_radius + 0.02;
  const auto& pts = course.centerline();

  std::vector<Vector3d> ring(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double a = 2.0 * M_PI * j / n;
    ring[static_cast<std::size_t>(j)] =
        handle.pose.transform(Vector3d(handle.ring_radius * std::cos(a), handle.ring_radius * std::sin(a), 0.0));
  }

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double dc = point_segment_distance(c, pts[i], pts[i + 1]);
    const double lower = dc - handle.ring_radius;
    if (lower > far || lower > best) continue;
    for (const auto& q : ring) best = std::min(best, point_segment_distance(q, pts[i], pts[i + 1]));
  }
  return best;
}

inline ContactReport check_contact(const WireCourse& course, const LoopHandle& handle, double k_wire,
                                   double fatal_force) {
  if (!(k_wire > 0.0) || !(fatal_force > 0.0))
    throw std::invalid_argument("check_contact: k_wire and fatal_force must be positive");
  ContactReport r;
  const double d = ring_wire_distance(course, handle);
  r.penetration = std::max(0.0, course.wire_radius() + handle.tube_radius - d);
  r.in_contact = r.penetration > 0.0;
  r.proxy_force = k_wire * r.penetration;
  r.fatal = r.proxy_force > fatal_force;
  return r;
}

inline double progress_at_arc(const WireCourse& course, double s) {
  return std::clamp((s - course.start_s()) / (course.end_s() - course.start_s()), 0.0, 1.0);
}

inline double progress(const WireCourse& course, const LoopHandle& handle) {
  return progress_at_arc(course, course.project(handle.center()).s);
}

/// Counts rising edges of contact; an edge within `debounce` seconds of the
/// previously counted edge merges into it.
inline int buzz_events(std::span<const ContactReport> stream, double dt, double debounce) {
  int count = 0;
  bool prev = false;
  double last_edge = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const bool now = stream[i].in_contact;
    if (now && !prev) {
      const double t = static_cast<double>(i) * dt;
      if (t - last_edge >= debounce - 1e-12) {
        ++count;
        last_edge = t;
      }
    }
    prev = now;
  }
  return count;
}

// ---------------------------------------------------------------------------
// Descriptors

inline WireCourse load_course(const nlohmann::json& doc) {
  auto need = [&](const char* key) -> const nlohmann::json& {
    if (!doc.is_object() || !doc.contains(key)) throw ParseError(key, "missing");
    return doc.at(key);
  };
  auto number = [&](const char* key) {
    const auto& v = need(key);
    if (!v.is_number()) throw ParseError(key, "expected a number");
    return v.get<double>();
  };
  if (!doc.is_object()) throw ParseError("document", "expected a JSON object");
  const auto& ver = need("version");
  if (!ver.is_number_integer() || ver.get<int>() != kCourseSchemaVersion)
    throw ParseError("version", "unsupported course schema version");
  const auto& name = need("name");
  if (!name.is_string()) throw ParseError("name", "expected a string");
  const auto& pts = need("points");
  if (!pts.is_array()) throw ParseError("points", "expected an array of [x,y,z]");
  std::vector<Vector3d> centerline;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& p = pts[i];
    if (!p.is_array() || p.size() != 3 || !p[0].is_number() || !p[1].is_number() || !p[2].is_number())
      throw ParseError("points[" + std::to_string(i) + "]", "expected [x,y,z]");
    centerline.emplace_back(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
  }
  const double wire_radius = number("wire_radius");
  if (!(wire_radius > 0.0)) throw ParseError("wire_radius", "must be positive");
  return WireCourse(name.get<std::string>(), std::move(centerline), wire_radius, number("start_s"),
                    number("end_s"));
}

inline WireCourse load_course(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("document", e.what());
  }
  return load_course(doc);
}

inline WireCourse load_course(const char* text) { return load_course(std::string_view(text)); }
inline WireCourse load_course(const std::string& text) { return load_course(std::string_view(text)); }

inline nlohmann::json course_descriptor(const WireCourse& course) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : course.centerline()) pts.push_back({p.x(), p.y(), p.z()});
  return {{"version", kCourseSchemaVersion}, {"name", course.name()},          {"points", pts},
          {"wire_radius", course.wire_radius()}, {"start_s", course.start_s()}, {"end_s", course.end_s()}};
}

namespace detail {

/// Polyline through `waypoints` with every interior corner replaced by a
/// circular arc of radius `fillet` sampled every `step` meters.
inline std::vector<Vector3d> filleted_polyline(const std::vector<Vector3d>& waypoints, double fillet, double step) {
  std::vector<Vector3d> out{waypoints.front()};
  for (std::size_t i = 1; i + 1 < waypoints.size(); ++i) {
    const Vector3d a = (waypoints[i] - waypoints[i - 1]).normalized();
    const Vector3d b = (waypoints[i + 1] - waypoints[i]).normalized();
    const double turn = std::acos(std::clamp(a.dot(b), -1.0, 1.0));
    if (turn < 1e-6) {
      out.push_back(waypoints[i]);
      continue;
    }
    const double room = 0.45 * std::min((waypoints[i] - waypoints[i - 1]).norm(),
                                        (waypoints[i + 1] - waypoints[i]).norm());
    const double t = std::min(fillet * std::tan(0.5 * turn), room);
    const double r = t / std::tan(0.5 * turn);
    const Vector3d t1 = waypoints[i] - a * t;
    const Vector3d inward = (b - a.dot(b) * a).normalized();
    const Vector3d center = t1 + r * inward;
    const Vector3d axis = a.cross(b).normalized();
    const int n = std::max(2, static_cast<int>(std::ceil(r * turn / step)));
    for (int j = 0; j <= n; ++j) {
      const Eigen::AngleAxisd rot(turn * j / n, axis);
      out.push_back(center + rot * (t1 - center));
    }
  }
  out.push_back(waypoints.back());
  return out;
}

}  // namespace detail

inline std::vector<std::string> builtin_course_ids() { return {"training", "transfer", "straight"}; }

/// Built-in fixtures. "training" is the main bent wire; "transfer" is a
/// thicker wire with a different shape; "straight" is a 0.6 m wire along x.
/// The finish sits a full sensing range (0.1 m) before the wire end; closer
/// in, the one-sided field pulls the ring back and can hold it short of it.
inline WireCourse builtin_course(const std::string& id) {
  const double margin = 0.05;
  const double tail = 0.10;
  if (id == "training") {
    const std::vector<Vector3d> wp{{0.00, 0.00, 0.00},  {0.20, 0.00, 0.00},  {0.36, 0.00, 0.10},
                                   {0.56, 0.05, 0.10},  {0.72, 0.05, -0.02}, {0.90, 0.00, -0.02},
                                   {1.08, 0.00, 0.05},  {1.25, 0.00, 0.05}};
    auto pts = detail::filleted_polyline(wp, 0.08, 0.005);
    WireCourse probe("training", pts, 0.002, 0.0, 1e-3);
    return WireCourse("training", std::move(pts), 0.002, margin, probe.total_length() - tail);
  }
  if (id == "transfer") {
    const std::vector<Vector3d> wp{{0.00, 0.00, 0.00},  {0.15, 0.00, 0.00},   {0.30, 0.07, 0.03},
                                   {0.48, 0.07, -0.06}, {0.64, -0.03, -0.06}, {0.80, -0.03, 0.04},
                                   {0.98, 0.00, 0.04},  {1.12, 0.00, 0.00}};
    auto pts = detail::filleted_polyline(wp, 0.08, 0.005);
    WireCourse probe("transfer", pts, 0.004, 0.0, 1e-3);
    return WireCourse("transfer", std::move(pts), 0.004, margin, probe.total_length() - tail);
  }
  if (id == "straight") {
    return WireCourse("straight", {{0.0, 0.0, 0.0}, {0.6, 0.0, 0.0}}, 0.002, margin, 0.6 - tail);
  }
  throw ParseError("course", "unknown built-in course '" + id + "'");
}

}  // namespace buzzwire
