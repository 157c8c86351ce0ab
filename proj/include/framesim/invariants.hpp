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

#include <algorithm>
#include <array>
#include <map>
#include <string>
#include <vector>

#include "framesim/frames.hpp"
#include "framesim/qmath.hpp"

namespace framesim {

// ---------------------------------------------------------------------------
// Bell basis
// ---------------------------------------------------------------------------

enum BellIndex { kBell0 = 0, kBellX = 1, kBellY = 2, kBellZ = 3 };

/// beta_0 = (|01> - |10>)/sqrt2, beta_x = (|00> - |11>)/sqrt2,
/// beta_y = (|00> + |11>)/sqrt2, beta_z = (|01> + |10>)/sqrt2.
/// With these labels (sigma_j (x) I) beta_0 is proportional to beta_j.
struct BellBasis {
  std::array<PureState, 4> states;
  const PureState& operator[](int j) const { return states.at(static_cast<std::size_t>(j)); }
};

inline BellBasis bell_basis() {
  const double s = 1.0 / std::sqrt(2.0);
  auto make = [&](double a00, double a01, double a10, double a11) {
    Amplitudes a(4);
    a << a00 * s, a01 * s, a10 * s, a11 * s;
    return PureState(2, a);
  };
  return {{make(0, 1, -1, 0), make(1, 0, 0, -1), make(1, 0, 0, 1), make(0, 1, 1, 0)}};
}

inline Operator projector(const PureState& s) { return s.amplitudes() * s.amplitudes().adjoint(); }

/// ||(U (x) U) beta_j - (I (x) U sigma_j U^dag sigma_j) beta_j||
inline double ubell_conjugation(const SU2Matrix& u, int j) {
  if (j < 0 || j > 3) throw InputError("Bell index must be 0..3");
  const Mat2& m = u.matrix();
  const Mat2 sj = pauli::sigma0xyz(j);
  const Amplitudes b = bell_basis()[j].amplitudes();
  Amplitudes lhs = kron(m, m) * b;
  Amplitudes rhs = kron(Mat2::Identity(), (m * sj * m.adjoint() * sj).eval()) * b;
  return (lhs - rhs).norm();
}

// ---------------------------------------------------------------------------
// POVMs
// ---------------------------------------------------------------------------

/// Finite set of positive operators on n qubits summing to the identity.
class Povm {
 public:
  Povm(int qubits, std::vector<Operator> elements, std::vector<std::string> labels)
      : qubits_(qubits), elements_(std::move(elements)), labels_(std::move(labels)) {
    if (qubits_ < 1 || qubits_ > kMaxQubits) throw InputError("POVM qubit count out of range");
    if (elements_.empty() || elements_.size() != labels_.size()) throw InputError("one label per POVM element");
    const Eigen::Index d = Eigen::Index{1} << qubits_;
    Operator sum = Operator::Zero(d, d);
    for (const auto& e : elements_) {
      if (e.rows() != d || e.cols() != d) throw InputError("POVM element dimension mismatch");
      if (max_abs(e - e.adjoint()) > kTol) throw InputError("POVM element is not Hermitian");
      Eigen::SelfAdjointEigenSolver<Operator> es(e, Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() < -kPsdTol) throw InputError("POVM element is not positive");
      sum += e;
    }
    if (max_abs(sum - Operator::Identity(d, d)) > kTol) throw InputError("POVM elements do not sum to identity");
  }

  int qubits() const { return qubits_; }
  std::size_t size() const { return elements_.size(); }
  const Operator& element(std::size_t i) const { return elements_.at(i); }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  const std::vector<Operator>& elements() const { return elements_; }
  const std::vector<std::string>& labels() const { return labels_; }

  std::size_t index_of(const std::string& label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) throw InputError("no POVM outcome labelled '" + label + "'");
    return static_cast<std::size_t>(it - labels_.begin());
  }

  /// Largest ||[E, U^(x)n]|| over the elements.
  double commutator_residual(const Mat2& u) const {
    Operator un = Operator::Identity(1, 1);
    for (int i = 0; i < qubits_; ++i) un = kron(un, Operator(u));
    double r = 0.0;
    for (const auto& e : elements_) r = std::max(r, max_abs(e * un - un * e));
    return r;
  }

 private:
  int qubits_;
  std::vector<Operator> elements_;
  std::vector<std::string> labels_;
};

inline Povm povm2_singlet_triplet() {
  Operator es = projector(bell_basis()[kBell0]);
  return Povm(2, {es, Operator::Identity(4, 4) - es}, {"singlet", "triplet"});
}

/// The only collectively invariant measurement on one qubit.
inline Povm povm1_trivial() { return Povm(1, {Operator::Identity(2, 2)}, {"any"}); }

// ---------------------------------------------------------------------------
// Total spin
// ---------------------------------------------------------------------------

/// J^2 of the first m of n qubits, with J_a = sum_i sigma_a^(i) / 2.
inline Operator total_spin_squared(int n, int m) {
  if (m < 1 || m > n) throw InputError("spin block size out of range");
  const Eigen::Index d = Eigen::Index{1} << n;
  Operator j2 = Operator::Zero(d, d);
  for (int a = 0; a < 3; ++a) {
    Operator ja = Operator::Zero(d, d);
    for (int i = 0; i < m; ++i) ja += 0.5 * embed(Operator(pauli::sigma(a)), {i}, n);
    j2 += ja * ja;
  }
  return j2;
}

struct IrrepProjector {
  int qubits;
  double j;                   // total spin J
  int lambda;                 // copy index within J, 0-based
  std::vector<double> chain;  // J of the first 2, 3, ..., n-1 qubits
  Operator projector;
  int rank() const { return static_cast<int>(std::lround(projector.trace().real())); }
};

namespace detail {

/// Spin j from the Casimir eigenvalue j(j+1), snapped to a half-integer.
inline double spin_from_casimir(double c) {
  return 0.5 * std::round(std::sqrt(1.0 + 4.0 * std::max(c, 0.0)) - 1.0);
}

/// Splits the column span of `basis` (orthonormal columns) into eigenspaces of
/// the Hermitian `op`, clustering eigenvalues with gap threshold 1e-8.
inline std::vector<std::pair<double, Operator>> split_by(const Operator& op, const Operator& basis) {
  Operator restricted = basis.adjoint() * op * basis;
  Eigen::SelfAdjointEigenSolver<Operator> es(0.5 * (restricted + restricted.adjoint()));
  std::vector<std::pair<double, Operator>> out;
  const auto& ev = es.eigenvalues();
  Eigen::Index start = 0;
  for (Eigen::Index i = 1; i <= ev.size(); ++i) {
    if (i == ev.size() || ev(i) - ev(i - 1) > 1e-8) {
      out.emplace_back(ev.segment(start, i - start).mean(), basis * es.eigenvectors().middleCols(start, i - start));
      start = i;
    }
  }
  return out;
}

}  // namespace detail

/// Projectors onto the (J, lambda) sectors of n collective spins. Copies of
/// the same J are told apart by the intermediate couplings J_12, J_123, ...
/// and numbered in ascending lexicographic order of that chain.
inline std::vector<IrrepProjector> total_spin_projectors(int n) {
  if (n < 2 || n > 4) throw InputError("total_spin_projectors supports 2 to 4 qubits");
  const Eigen::Index d = Eigen::Index{1} << n;
  std::vector<IrrepProjector> out;
  std::vector<Operator> chain_ops;
  for (int m = 2; m < n; ++m) chain_ops.push_back(total_spin_squared(n, m));
  for (auto& [c, sector] : detail::split_by(total_spin_squared(n, n), Operator::Identity(d, d))) {
    const double j = detail::spin_from_casimir(c);
    std::vector<std::pair<std::vector<double>, Operator>> pieces{{{}, sector}};
    for (const auto& op : chain_ops) {
      std::vector<std::pair<std::vector<double>, Operator>> next;
      for (auto& [labels, basis] : pieces)
        for (auto& [cc, sub] : detail::split_by(op, basis)) {
          auto l = labels;
          l.push_back(detail::spin_from_casimir(cc));
          next.emplace_back(std::move(l), std::move(sub));
        }
      pieces = std::move(next);
    }
    std::sort(pieces.begin(), pieces.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    int lambda = 0;
    for (auto& [labels, basis] : pieces)
      out.push_back({n, j, lambda++, labels, basis * basis.adjoint()});
  }
  return out;
}

/// Sum of the projectors with total spin j.
inline Operator spin_sector_projector(const std::vector<IrrepProjector>& ps, double j) {
  Operator p;
  for (const auto& x : ps) {
    if (std::abs(x.j - j) > 1e-9) continue;
    if (p.size() == 0) p = x.projector;
    else p += x.projector;
  }
  if (p.size() == 0) throw InputError("no sector with that total spin");
  return p;
}

inline std::string spin_label(double j) {
  const int twice = static_cast<int>(std::lround(2 * j));
  return twice % 2 == 0 ? std::to_string(twice / 2) : std::to_string(twice) + "/2";
}

/// One element per (J, lambda) sector.
inline Povm povm_from_sectors(int n) {
  std::vector<Operator> e;
  std::vector<std::string> l;
  for (const auto& p : total_spin_projectors(n)) {
    e.push_back(p.projector);
    l.push_back("J=" + spin_label(p.j) + ",lambda=" + std::to_string(p.lambda));
  }
  return Povm(n, std::move(e), std::move(l));
}

// ---------------------------------------------------------------------------
// J = 1 generators on {beta_x, beta_y, beta_z}
// ---------------------------------------------------------------------------

using Mat3c = Eigen::Matrix3cd;

/// Generators t_a defined by U (x) U = exp(2 i eps_a t_a) on the triplet, with
/// U = exp(i eps_a sigma_a). Obtained from the action of U (x) U on
/// {beta_x, beta_y, beta_z} by central differences in eps, refined by two
/// Richardson steps.
inline std::array<Mat3c, 3> j1_generators() {
  const BellBasis bb = bell_basis();
  Eigen::Matrix<Complex, 4, 3> b;
  for (int k = 0; k < 3; ++k) b.col(k) = bb[k + 1].amplitudes();
  auto action = [&](int a, double eps) -> Mat3c {
    Vec3 axis = Vec3::Zero();
    axis(a) = 1.0;
    const Mat2 u = su2_from_axis_angle(axis, 2.0 * eps).matrix();
    return b.adjoint() * kron(u, u) * b;
  };
  auto central = [&](int a, double h) -> Mat3c { return (action(a, h) - action(a, -h)) / (4.0 * kI * h); };
  std::array<Mat3c, 3> t;
  const double h = 1e-2;
  for (int a = 0; a < 3; ++a) {
    Mat3c t1 = central(a, h), t2 = central(a, h / 2), t4 = central(a, h / 4);
    Mat3c r1 = (4.0 * t2 - t1) / 3.0, r2 = (4.0 * t4 - t2) / 3.0;
    t[a] = (16.0 * r2 - r1) / 15.0;
  }
  return t;
}

/// The generators in their commonly tabulated form on {beta_x, beta_y, beta_z}:
/// t_x couples beta_y and beta_z, t_z couples beta_x and beta_y, and
/// t_y = [[0, 0, i], [0, 0, 0], [-i, 0, 0]].
inline std::array<Mat3c, 3> tabulated_j1_generators() {
  Mat3c tx = Mat3c::Zero(), ty = Mat3c::Zero(), tz = Mat3c::Zero();
  tx(1, 2) = tx(2, 1) = 1.0;
  ty(0, 2) = kI;
  ty(2, 0) = -kI;
  tz(0, 1) = tz(1, 0) = 1.0;
  return {tx, ty, tz};
}

/// max over (a, b) of ||[t_a, t_b] - i eps_abc t_c||.
inline double su2_algebra_residual(const std::array<Mat3c, 3>& t) {
  double r = 0.0;
  for (int a = 0; a < 3; ++a) {
    const int b = (a + 1) % 3, c = (a + 2) % 3;
    r = std::max(r, max_abs(t[a] * t[b] - t[b] * t[a] - kI * t[c]));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Three and four qubits
// ---------------------------------------------------------------------------

namespace detail {
inline Amplitudes kets(int n, std::initializer_list<std::pair<double, const char*>> terms, double norm) {
  Amplitudes a = Amplitudes::Zero(Eigen::Index{1} << n);
  for (const auto& [c, bits] : terms) a += c * PureState::ket(bits).amplitudes();
  return a / norm;
}
}  // namespace detail

/// {E_{1/2,0}, E_{1/2,1}, E_{3/2}}. The J = 1/2 subspaces are spanned by
/// (|010> - |100>)/sqrt2, (|101> - |011>)/sqrt2 (singlet on the first pair) and
/// (2|001> - |010> - |100>)/sqrt6, (2|110> - |101> - |011>)/sqrt6.
inline Povm povm3() {
  const double r2 = std::sqrt(2.0), r6 = std::sqrt(6.0);
  Amplitudes a0 = detail::kets(3, {{1, "010"}, {-1, "100"}}, r2);
  Amplitudes a1 = detail::kets(3, {{1, "101"}, {-1, "011"}}, r2);
  Amplitudes b0 = detail::kets(3, {{2, "001"}, {-1, "010"}, {-1, "100"}}, r6);
  Amplitudes b1 = detail::kets(3, {{2, "110"}, {-1, "101"}, {-1, "011"}}, r6);
  Operator e0 = a0 * a0.adjoint() + a1 * a1.adjoint();
  Operator e1 = b0 * b0.adjoint() + b1 * b1.adjoint();
  Operator e32 = spin_sector_projector(total_spin_projectors(3), 1.5);
  return Povm(3, {e0, e1, e32}, {"J=1/2,lambda=0", "J=1/2,lambda=1", "J=3/2"});
}

struct PhiStates {
  PureState phi00;
  PureState phi01;
};

/// phi_00 = beta_0 beta_0 and phi_01 = (beta_x beta_x - beta_y beta_y + beta_z beta_z)/sqrt3,
/// the two collectively invariant states of four qubits.
inline PhiStates phi_invariant_states() {
  const BellBasis b = bell_basis();
  PureState p00 = b[kBell0].tensor(b[kBell0]);
  Amplitudes p01 = (b[kBellX].tensor(b[kBellX]).amplitudes() - b[kBellY].tensor(b[kBellY]).amplitudes() +
                    b[kBellZ].tensor(b[kBellZ]).amplitudes()) /
                   std::sqrt(3.0);
  return {p00, PureState(4, p01)};
}

/// <beta_j1 on (p[0], p[1]), beta_j2 on (q[0], q[1]) | s> for a 4-qubit state.
inline Complex bell_pair_coefficient(const PureState& s, std::array<int, 2> p, std::array<int, 2> q, int j1, int j2) {
  if (s.qubits() != 4) throw InputError("bell_pair_coefficient expects four qubits");
  const BellBasis b = bell_basis();
  PureState pair = b[j1].tensor(b[j2]);
  std::vector<int> order(4);
  order[p[0]] = 0;
  order[p[1]] = 1;
  order[q[0]] = 2;
  order[q[1]] = 3;
  Amplitudes placed = wire_permutation(order) * pair.amplitudes();
  return placed.dot(s.amplitudes());
}

/// {phi_00, phi_01, P_{J=1}, P_{J=2}}.
inline Povm povm4_invariant() {
  const auto phi = phi_invariant_states();
  const auto sectors = total_spin_projectors(4);
  return Povm(4,
              {projector(phi.phi00), projector(phi.phi01), spin_sector_projector(sectors, 1.0),
               spin_sector_projector(sectors, 2.0)},
              {"phi00", "phi01", "J=1", "J=2"});
}

/// povm4_invariant with the J = 1 element split into its three copies.
inline Povm povm4_lambda_resolved() {
  const auto phi = phi_invariant_states();
  std::vector<Operator> e{projector(phi.phi00), projector(phi.phi01)};
  std::vector<std::string> l{"phi00", "phi01"};
  for (const auto& p : total_spin_projectors(4))
    if (std::abs(p.j - 1.0) < 1e-9) {
      e.push_back(p.projector);
      l.push_back("J=1,lambda=" + std::to_string(p.lambda));
    }
  e.push_back(spin_sector_projector(total_spin_projectors(4), 2.0));
  l.push_back("J=2");
  return Povm(4, std::move(e), std::move(l));
}

/// Every collectively invariant POVM this module provides on n qubits.
inline std::vector<Povm> invariant_povms(int n) {
  switch (n) {
    case 1: return {povm1_trivial()};
    case 2: return {povm2_singlet_triplet(), povm_from_sectors(2)};
    case 3: return {povm3(), povm_from_sectors(3)};
    case 4: return {povm4_invariant(), povm4_lambda_resolved(), povm_from_sectors(4)};
    default: throw InputError("no invariant POVMs provided for that qubit count");
  }
}

// ---------------------------------------------------------------------------
// Measurement on registers
// ---------------------------------------------------------------------------

/// Born probabilities of a POVM applied to the listed wires.
inline std::vector<double> outcome_distribution(const Register& reg, const Povm& povm, const std::vector<int>& wires) {
  if (static_cast<int>(wires.size()) != povm.qubits()) throw InputError("POVM acts on a different wire count");
  const Amplitudes& psi = reg.state().amplitudes();
  std::vector<double> p;
  for (const auto& e : povm.elements())
    p.push_back(std::max(0.0, psi.dot(apply_on_wires(e, wires, psi, reg.qubits())).real()));
  return p;
}

inline double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw InputError("distributions differ in length");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

namespace detail {
inline Operator psd_sqrt(const Operator& e) {
  if (max_abs(e * e - e) < 1e-12) return e;  // projector
  Eigen::SelfAdjointEigenSolver<Operator> es(e);
  Eigen::VectorXd v = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * v.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}
}  // namespace detail

struct Branch {
  double probability = 0.0;
  std::optional<Register> state;  // empty when the probability is zero
};

/// Post-measurement branch for one outcome (Lueders update with sqrt(E)).
inline Branch povm_branch(const Party& who, const Register& reg, const Povm& povm, const std::vector<int>& wires,
                          std::size_t outcome) {
  who.require_holds(reg, wires);
  if (static_cast<int>(wires.size()) != povm.qubits()) throw InputError("POVM acts on a different wire count");
  Amplitudes a = apply_on_wires(detail::psd_sqrt(povm.element(outcome)), wires, reg.state().amplitudes(), reg.qubits());
  const double p = a.squaredNorm();
  if (p < 1e-15) return {0.0, std::nullopt};
  return {p, reg.with_state(PureState::normalized(reg.qubits(), std::move(a)))};
}

struct MeasurementResult {
  std::size_t outcome;
  double probability;
  Register state;
};

/// Samples an outcome of `povm` on `wires`, which `who` must hold.
inline MeasurementResult measure(const Party& who, const Register& reg, const Povm& povm, const std::vector<int>& wires,
                                 Rng& rng) {
  who.require_holds(reg, wires);
  const auto p = outcome_distribution(reg, povm, wires);
  std::discrete_distribution<std::size_t> pick(p.begin(), p.end());
  const std::size_t k = pick(rng);
  auto b = povm_branch(who, reg, povm, wires, k);
  return {k, b.probability, *b.state};
}

/// Projects one wire onto |bit> in its holder's basis and removes it.
inline Branch computational_branch(const Party& who, const Register& reg, int wire, int bit) {
  who.require_holds(reg, {wire});
  if (bit != 0 && bit != 1) throw InputError("bit must be 0 or 1");
  const int n = reg.qubits();
  if (n < 2) throw InputError("cannot remove the only wire");
  const auto& a = reg.state().amplitudes();
  Amplitudes out(Eigen::Index{1} << (n - 1));
  const std::size_t low = std::size_t{1} << (n - 1 - wire);
  for (Eigen::Index r = 0; r < out.size(); ++r) {
    const std::size_t hi = (static_cast<std::size_t>(r) / low) * low * 2;
    const std::size_t lo = static_cast<std::size_t>(r) % low;
    out(r) = a(static_cast<Eigen::Index>(hi + (bit ? low : 0) + lo));
  }
  const double p = out.squaredNorm();
  if (p < 1e-15) return {0.0, std::nullopt};
  std::vector<PartyId> h = reg.holders();
  h.erase(h.begin() + wire);
  return {p, Register(PureState::normalized(n - 1, std::move(out)), std::move(h))};
}

}  // namespace framesim
