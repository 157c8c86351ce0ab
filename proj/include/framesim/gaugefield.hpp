// Copyright 2026 The framesim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <vector>

#include "framesim/frames.hpp"
#include "framesim/qmath.hpp"
#include "json.hpp"

namespace framesim {

/// Piecewise-constant su(2) connection over one path segment.
struct PathSegment {
  Vec3 coeffs = Vec3::Zero();  // A^a, units 1/length
  double length = 1.0;         // ds > 0
  double charge = 1.0;         // q

  void validate() const {
    if (!coeffs.allFinite()) throw InputError("segment coefficients must be finite");
    if (!(length > 0.0) || !std::isfinite(length)) throw InputError("segment length must be positive");
    if (!std::isfinite(charge)) throw InputError("segment charge must be finite");
  }
};

struct GaugePath {
  std::vector<PathSegment> segments;
  bool closed = false;

  void validate() const {
    if (segments.empty()) throw InputError("gauge path has no segments");
    for (const auto& s : segments) s.validate();
  }
  std::size_t node_count() const { return segments.size() + 1; }
};

/// One SU(2) element per node; for closed paths the last node is the first.
struct LatticeGaugeTransform {
  std::vector<SU2Matrix> g;
};

/// exp(i q ds A^a sigma_a / 2).
inline SU2Matrix segment_transport(const PathSegment& seg) {
  seg.validate();
  return su2_from_rotation_vector(seg.charge * seg.length * seg.coeffs);
}

/// Ordered product of links; later links multiply on the left.
inline SU2Matrix product_of_links(const std::vector<SU2Matrix>& links) {
  SU2Matrix u;
  for (const auto& l : links) u = l * u;
  return u;
}

inline std::vector<SU2Matrix> path_links(const GaugePath& path) {
  path.validate();
  std::vector<SU2Matrix> links;
  links.reserve(path.segments.size());
  for (const auto& s : path.segments) links.push_back(segment_transport(s));
  return links;
}

inline SU2Matrix path_transport(const GaugePath& path) { return product_of_links(path_links(path)); }

inline Complex wilson_loop(const GaugePath& path) {
  if (!path.closed) throw InputError("Wilson loop needs a closed path");
  return path_transport(path).trace();
}

struct TransformedLinks {
  std::vector<SU2Matrix> links;
  SU2Matrix transport;
};

/// Link map L_i -> g_{i+1} L_i g_i^dag.
inline TransformedLinks gauge_transform(const GaugePath& path, const LatticeGaugeTransform& lgt) {
  path.validate();
  if (lgt.g.size() != path.node_count())
    throw InputError("gauge transform needs " + std::to_string(path.node_count()) + " nodes, got " +
                     std::to_string(lgt.g.size()));
  if (path.closed && distance(lgt.g.front(), lgt.g.back()) > kTol)
    throw InputError("closed path needs matching first and last gauge elements");
  TransformedLinks out;
  const auto links = path_links(path);
  for (std::size_t i = 0; i < links.size(); ++i) out.links.push_back(lgt.g[i + 1] * links[i] * lgt.g[i].adjoint());
  out.transport = product_of_links(out.links);
  return out;
}

namespace detail {

/// Rotation matrix of the adjoint action: L (a.sigma) L^dag = (R a).sigma.
inline Eigen::Matrix3d adjoint_rotation(const SU2Matrix& l) {
  Eigen::Matrix3d r;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      r(a, b) = 0.5 * (pauli::sigma(a) * l.matrix() * pauli::sigma(b) * l.matrix().adjoint()).trace().real();
  return r;
}

inline Eigen::Matrix3d cross_matrix(const Vec3& x) {
  Eigen::Matrix3d m;
  m << 0, -x(2), x(1), x(2), 0, -x(0), -x(1), x(0), 0;
  return m;
}

/// sum_k M^k / (k+1)!
inline Eigen::Matrix3d phi_series(const Eigen::Matrix3d& m) {
  Eigen::Matrix3d sum = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d term = Eigen::Matrix3d::Identity();
  for (int k = 1; k < 200; ++k) {
    term = term * m / static_cast<double>(k + 1);
    sum += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18) break;
  }
  return sum;
}

}  // namespace detail

/// Connection after the gauge transformation g_i = exp(i eps alpha_i.sigma/2),
/// kept to first order in eps and exact in the link length: the segment's
/// rotation vector x = q ds A moves by eps y with phi(-[x]_x) y = alpha_{i+1} -
/// Ad_{L_i} alpha_i. For short segments this is
/// delta A = eps ((1/q) d alpha/ds + A x alpha).
inline GaugePath infinitesimal_gauge_delta(const GaugePath& path, const std::vector<Vec3>& alpha, double eps) {
  path.validate();
  if (alpha.size() != path.node_count())
    throw InputError("alpha needs one vector per node (" + std::to_string(path.node_count()) + ")");
  if (path.closed && (alpha.front() - alpha.back()).cwiseAbs().maxCoeff() > kTol)
    throw InputError("closed path needs matching first and last alpha");
  GaugePath out = path;
  for (std::size_t i = 0; i < path.segments.size(); ++i) {
    const auto& seg = path.segments[i];
    const Vec3 x = seg.charge * seg.length * seg.coeffs;
    const SU2Matrix link = su2_from_rotation_vector(x);
    const Vec3 w = alpha[i + 1] - detail::adjoint_rotation(link) * alpha[i];
    const Eigen::Matrix3d phi = detail::phi_series(-detail::cross_matrix(x));
    const Vec3 y = phi.fullPivLu().solve(w);
    out.segments[i].coeffs = seg.coeffs + eps * y / (seg.charge * seg.length);
  }
  return out;
}

/// Constant field per hop of the cycle, each hop split into equal segments of
/// length 1/segments_per_hop with unit charge, so the path transport equals the
/// holonomy of the cycle in its base party's basis.
inline GaugePath channels_to_path(const Network& net, const std::vector<PartyId>& cycle, int segments_per_hop) {
  if (segments_per_hop < 1) throw InputError("segments_per_hop must be at least 1");
  const auto route = detail::close_route(net, cycle);
  GaugePath path;
  path.closed = true;
  const double ds = 1.0 / segments_per_hop;
  for (std::size_t i = 1; i < route.size(); ++i) {
    const Vec3 v = su2_rotation_vector(detail::GroundTruth::link(net, route[i], route[i - 1]));
    for (int s = 0; s < segments_per_hop; ++s) path.segments.push_back({v, ds, 1.0});
  }
  return path;
}

inline GaugePath random_gauge_path(Rng& rng, int segments, bool closed, double scale = 2.0) {
  if (segments < 1) throw InputError("need at least one segment");
  std::normal_distribution<double> g(0.0, scale);
  std::uniform_real_distribution<double> len(0.2, 1.5);
  std::uniform_real_distribution<double> charge(0.5, 2.0);
  GaugePath p;
  p.closed = closed;
  for (int i = 0; i < segments; ++i) p.segments.push_back({Vec3(g(rng), g(rng), g(rng)), len(rng), charge(rng)});
  return p;
}

inline LatticeGaugeTransform random_lattice_transform(Rng& rng, const GaugePath& path) {
  LatticeGaugeTransform t;
  for (std::size_t i = 0; i < path.node_count(); ++i) t.g.push_back(haar_random_su2(rng));
  if (path.closed) t.g.back() = t.g.front();
  return t;
}

inline nlohmann::json path_to_json(const GaugePath& p) {
  nlohmann::json segs = nlohmann::json::array();
  for (const auto& s : p.segments)
    segs.push_back({{"A", {s.coeffs(0), s.coeffs(1), s.coeffs(2)}}, {"ds", s.length}, {"q", s.charge}});
  return {{"segments", segs}, {"closed", p.closed}};
}

inline GaugePath path_from_json(const nlohmann::json& j) {
  GaugePath p;
  p.closed = j.value("closed", false);
  for (const auto& s : j.at("segments")) {
    const auto& a = s.at("A");
    if (!a.is_array() || a.size() != 3) throw InputError("segment A must have 3 entries");
    p.segments.push_back({Vec3(a[0].get<double>(), a[1].get<double>(), a[2].get<double>()),
                          s.at("ds").get<double>(), s.value("q", 1.0)});
  }
  p.validate();
  return p;
}

}  // namespace framesim
