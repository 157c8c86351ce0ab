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

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "framesim/errors.hpp"
#include "framesim/rng.hpp"

namespace framesim {

using Complex = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Vec3 = Eigen::Vector3d;
using Operator = Eigen::MatrixXcd;
using Amplitudes = Eigen::VectorXcd;

inline constexpr double kTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;
inline constexpr int kMaxQubits = 6;
inline constexpr Complex kI{0.0, 1.0};

template <class Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

template <class Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
  return true;
}

inline bool is_power_of_two(Eigen::Index d) { return d > 0 && (d & (d - 1)) == 0; }

inline int log2_dim(Eigen::Index d) {
  if (!is_power_of_two(d)) throw InputError("dimension " + std::to_string(d) + " is not a power of two");
  int n = 0;
  while ((Eigen::Index{1} << n) < d) ++n;
  return n;
}

inline bool is_unitary(const Operator& u, double tol = kTol) {
  if (u.rows() != u.cols()) return false;
  return max_abs(u.adjoint() * u - Operator::Identity(u.rows(), u.cols())) <= tol;
}

inline Operator kron(const Operator& a, const Operator& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

namespace pauli {
inline Mat2 identity() { return Mat2::Identity(); }
inline Mat2 x() {
  Mat2 m;
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}
inline Mat2 y() {
  Mat2 m;
  m << 0.0, -kI, kI, 0.0;
  return m;
}
inline Mat2 z() {
  Mat2 m;
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}
/// sigma_a for a = 0, 1, 2 (x, y, z).
inline Mat2 sigma(int a) {
  switch (a) {
    case 0: return x();
    case 1: return y();
    case 2: return z();
    default: throw InputError("pauli index out of range");
  }
}
/// sigma_j with j = 0 meaning the identity, then x, y, z.
inline Mat2 sigma0xyz(int j) { return j == 0 ? identity() : sigma(j - 1); }
}  // namespace pauli

// ---------------------------------------------------------------------------
// SU(2)
// ---------------------------------------------------------------------------

class SU2Matrix {
 public:
  SU2Matrix() : m_(Mat2::Identity()) {}

  /// Validates U^dag U = I and det U = 1, both to `tol` (max entry deviation).
  explicit SU2Matrix(const Mat2& m, double tol = kTol) : m_(m) {
    if (!satisfies_invariants(m, tol)) throw InputError("matrix is not in SU(2)");
  }

  static SU2Matrix identity() { return {}; }

  static bool satisfies_invariants(const Mat2& m, double tol = kTol) {
    if (!all_finite(m)) return false;
    if (max_abs(m.adjoint() * m - Mat2::Identity()) > tol) return false;
    return std::abs(m.determinant() - 1.0) <= tol;
  }

  const Mat2& matrix() const { return m_; }
  Complex operator()(int r, int c) const { return m_(r, c); }
  Complex trace() const { return m_.trace(); }
  SU2Matrix adjoint() const { return SU2Matrix(m_.adjoint().eval(), Unchecked{}); }

  friend SU2Matrix operator*(const SU2Matrix& a, const SU2Matrix& b) {
    return SU2Matrix((a.m_ * b.m_).eval(), Unchecked{});
  }

  /// Re-projects onto SU(2) after long products: Gram-Schmidt on the first
  /// column, second column fixed by the SU(2) form [[a, -b*], [b, a*]].
  SU2Matrix renormalized() const {
    Complex a = m_(0, 0), b = m_(1, 0);
    double n = std::sqrt(std::norm(a) + std::norm(b));
    a /= n;
    b /= n;
    Mat2 r;
    r << a, -std::conj(b), b, std::conj(a);
    return SU2Matrix(r, Unchecked{});
  }

 private:
  struct Unchecked {};
  SU2Matrix(const Mat2& m, Unchecked) : m_(m) {}
  Mat2 m_;
};

inline double distance(const SU2Matrix& a, const SU2Matrix& b) {
  return max_abs(a.matrix() - b.matrix());
}

/// cos(angle/2) I + i sin(angle/2) axis.sigma, i.e. exp(i angle axis.sigma / 2).
inline SU2Matrix su2_from_axis_angle(const Vec3& axis, double angle) {
  if (!axis.allFinite() || !std::isfinite(angle)) throw InputError("non-finite axis or angle");
  if (std::abs(axis.norm() - 1.0) > kTol) throw InputError("rotation axis must be a unit vector");
  Mat2 n = axis(0) * pauli::x() + axis(1) * pauli::y() + axis(2) * pauli::z();
  Mat2 u = std::cos(angle / 2) * Mat2::Identity() + kI * std::sin(angle / 2) * n;
  return SU2Matrix(u, 1e-11);
}

/// exp(i v.sigma / 2) for an arbitrary rotation vector v (angle |v|).
inline SU2Matrix su2_from_rotation_vector(const Vec3& v) {
  double angle = v.norm();
  if (angle == 0.0) return SU2Matrix::identity();
  return su2_from_axis_angle(v / angle, angle);
}

/// Principal rotation vector v with U = exp(i v.sigma / 2), |v| in [0, 2 pi].
/// Written as U = exp(i phi n.sigma) the half-angle phi lies in [0, pi]; at
/// phi = pi (U = -I) the axis is +z.
inline Vec3 su2_rotation_vector(const SU2Matrix& u) {
  const Mat2& m = u.matrix();
  double c = std::clamp(0.5 * m.trace().real(), -1.0, 1.0);
  double half = std::acos(c);
  // i sin(phi) n.sigma = (U - U^dag)/2
  Mat2 anti = 0.5 * (m - m.adjoint());
  Vec3 s(std::imag(anti(0, 1) + anti(1, 0)) / 2.0,
         std::real(anti(0, 1) - anti(1, 0)) / 2.0,
         std::imag(anti(0, 0) - anti(1, 1)) / 2.0);
  double sn = s.norm();
  if (sn < 1e-300) {
    if (c > 0) return Vec3::Zero();
    return Vec3(0.0, 0.0, 2.0 * std::numbers::pi);
  }
  // Recompute the angle from both components for accuracy near 0 and pi.
  half = std::atan2(sn, c);
  return (2.0 * half) * (s / sn);
}

/// Haar-distributed SU(2): four standard normals normalised to a unit
/// quaternion (a, b, c, d) mapped to [[a + ib, c + id], [-c + id, a - ib]].
inline SU2Matrix haar_random_su2(Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  double q[4];
  double n2 = 0.0;
  do {
    n2 = 0.0;
    for (double& x : q) {
      x = g(rng);
      n2 += x * x;
    }
  } while (n2 < 1e-300);
  double n = std::sqrt(n2);
  for (double& x : q) x /= n;
  Mat2 m;
  m << Complex(q[0], q[1]), Complex(q[2], q[3]), Complex(-q[2], q[3]), Complex(q[0], -q[1]);
  return SU2Matrix(m, 1e-11);
}

/// Haar rotation about the z axis only.
inline SU2Matrix random_z_rotation(Rng& rng) {
  double phi = std::uniform_real_distribution<double>(0.0, 4.0 * std::numbers::pi)(rng);
  return su2_from_axis_angle(Vec3::UnitZ(), phi);
}

inline bool is_z_rotation(const SU2Matrix& u, double tol = kTol) {
  return std::abs(u(0, 1)) <= tol && std::abs(u(1, 0)) <= tol;
}

/// Haar-random U(d) from the QR decomposition of a complex Ginibre matrix with
/// the phases of R's diagonal absorbed.
inline Operator random_unitary(int dim, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Operator z(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) z(i, j) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<Operator> qr(z);
  Operator q = qr.householderQ();
  Operator r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    Complex d = r(j, j);
    q.col(j) *= d / std::abs(d);
  }
  return q;
}

/// exp(i H) for Hermitian H via its eigendecomposition.
inline Operator exp_i_hermitian(const Operator& h) {
  Eigen::SelfAdjointEigenSolver<Operator> es(0.5 * (h + h.adjoint()));
  Amplitudes phases = (kI * es.eigenvalues().cast<Complex>()).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

// ---------------------------------------------------------------------------
// States
// ---------------------------------------------------------------------------

/// Normalised amplitude vector over n qubits. Wire 0 is the leftmost tensor
/// factor and the most significant bit of the amplitude index.
class PureState {
 public:
  PureState() : qubits_(0), amps_(Amplitudes::Ones(1)) {}

  PureState(int qubits, Amplitudes amps) : qubits_(qubits), amps_(std::move(amps)) {
    validate_shape();
    if (std::abs(amps_.squaredNorm() - 1.0) > kTol) throw InputError("state is not normalised");
  }

  static PureState normalized(int qubits, Amplitudes amps) {
    double n = amps.norm();
    if (!(n > 1e-300) || !std::isfinite(n)) throw InputError("cannot normalise a zero vector");
    return PureState(qubits, amps / n);
  }

  static PureState basis(int qubits, std::size_t index) {
    Amplitudes a = Amplitudes::Zero(Eigen::Index{1} << qubits);
    if (static_cast<Eigen::Index>(index) >= a.size()) throw InputError("basis index out of range");
    a(static_cast<Eigen::Index>(index)) = 1.0;
    return PureState(qubits, a);
  }

  /// Computational basis ket from a bit string, e.g. ket("011").
  static PureState ket(std::string_view bits) {
    std::size_t idx = 0;
    for (char c : bits) {
      if (c != '0' && c != '1') throw InputError("ket expects a string of 0/1");
      idx = (idx << 1) | static_cast<std::size_t>(c == '1');
    }
    return basis(static_cast<int>(bits.size()), idx);
  }

  int qubits() const { return qubits_; }
  Eigen::Index dim() const { return amps_.size(); }
  const Amplitudes& amplitudes() const { return amps_; }
  Complex operator[](Eigen::Index i) const { return amps_(i); }

  /// <this|other>
  Complex inner(const PureState& other) const {
    if (other.qubits_ != qubits_) throw InputError("qubit count mismatch");
    return amps_.dot(other.amps_);
  }

  PureState tensor(const PureState& other) const {
    Amplitudes a = Eigen::kroneckerProduct(amps_, other.amps_).eval();
    return PureState(qubits_ + other.qubits_, std::move(a));
  }

  /// Applies `op` (already the full 2^n operator) and renormalises.
  PureState evolved(const Operator& op) const { return normalized(qubits_, op * amps_); }

 private:
  void validate_shape() const {
    if (qubits_ < 0 || qubits_ > kMaxQubits) throw InputError("qubit count out of range");
    if (amps_.size() != (Eigen::Index{1} << qubits_)) throw InputError("amplitude count is not 2^n");
    if (!all_finite(amps_)) throw InputError("non-finite amplitude");
  }

  int qubits_;
  Amplitudes amps_;
};

/// |<a|b>| >= 1 - tol.
inline bool equal_up_to_phase(const PureState& a, const PureState& b, double tol) {
  if (a.qubits() != b.qubits()) throw InputError("qubit count mismatch");
  return std::abs(a.inner(b)) >= 1.0 - tol;
}

inline double fidelity(const PureState& a, const PureState& b) { return std::abs(a.inner(b)); }

class DensityOperator {
 public:
  DensityOperator(int qubits, Operator m) : qubits_(qubits), m_(std::move(m)) {
    if (qubits_ < 0 || qubits_ > kMaxQubits) throw InputError("qubit count out of range");
    if (m_.rows() != (Eigen::Index{1} << qubits_) || m_.cols() != m_.rows())
      throw InputError("density operator shape mismatch");
    if (!all_finite(m_)) throw InputError("non-finite density operator entry");
    if (max_abs(m_ - m_.adjoint()) > kTol) throw InputError("density operator is not Hermitian");
    if (std::abs(m_.trace() - 1.0) > kTol) throw InputError("density operator trace is not 1");
    Eigen::SelfAdjointEigenSolver<Operator> es(m_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kPsdTol) throw InputError("density operator is not positive");
  }

  static DensityOperator from_pure(const PureState& psi) {
    return DensityOperator(psi.qubits(), psi.amplitudes() * psi.amplitudes().adjoint());
  }

  int qubits() const { return qubits_; }
  const Operator& matrix() const { return m_; }

 private:
  int qubits_;
  Operator m_;
};

// ---------------------------------------------------------------------------
// Wiring
// ---------------------------------------------------------------------------

namespace detail {

inline void check_wires(std::span<const int> wires, int n, bool allow_empty = false) {
  if (!allow_empty && wires.empty()) throw InputError("wire list is empty");
  for (std::size_t i = 0; i < wires.size(); ++i) {
    if (wires[i] < 0 || wires[i] >= n) throw InputError("wire " + std::to_string(wires[i]) + " out of range");
    for (std::size_t j = 0; j < i; ++j)
      if (wires[i] == wires[j]) throw InputError("duplicate wire " + std::to_string(wires[i]));
  }
}

inline std::size_t wire_bit(int n, int wire) { return std::size_t{1} << (n - 1 - wire); }

/// Packs the bits of `index` found on `wires` (wires[0] most significant).
inline std::size_t gather(std::size_t index, std::span<const int> wires, int n) {
  std::size_t sub = 0;
  for (int w : wires) sub = (sub << 1) | ((index & wire_bit(n, w)) ? 1u : 0u);
  return sub;
}

inline std::size_t wire_mask(std::span<const int> wires, int n) {
  std::size_t mask = 0;
  for (int w : wires) mask |= wire_bit(n, w);
  return mask;
}

}  // namespace detail

/// Operator acting as `gate` on `wires` (in the listed order) and as the
/// identity on every other wire of an n-qubit register.
inline Operator embed(const Operator& gate, std::span<const int> wires, int n) {
  if (n < 1 || n > kMaxQubits) throw InputError("qubit count out of range");
  detail::check_wires(wires, n);
  const int m = static_cast<int>(wires.size());
  if (gate.rows() != (Eigen::Index{1} << m) || gate.cols() != gate.rows())
    throw InputError("gate dimension does not match wire count");
  const std::size_t dim = std::size_t{1} << n;
  const std::size_t mask = detail::wire_mask(wires, n);
  Operator out = Operator::Zero(dim, dim);
  for (std::size_t r = 0; r < dim; ++r) {
    const std::size_t gr = detail::gather(r, wires, n);
    for (std::size_t c = 0; c < dim; ++c) {
      if ((r & ~mask) != (c & ~mask)) continue;
      out(r, c) = gate(gr, detail::gather(c, wires, n));
    }
  }
  return out;
}

inline Operator embed(const Operator& gate, std::initializer_list<int> wires, int n) {
  return embed(gate, std::span<const int>(wires.begin(), wires.size()), n);
}

/// Applies `gate` to `wires` of `psi` without forming the full operator.
inline Amplitudes apply_on_wires(const Operator& gate, std::span<const int> wires, const Amplitudes& psi, int n) {
  detail::check_wires(wires, n);
  const int m = static_cast<int>(wires.size());
  if (gate.rows() != (Eigen::Index{1} << m) || gate.cols() != gate.rows())
    throw InputError("gate dimension does not match wire count");
  const std::size_t dim = std::size_t{1} << n;
  const std::size_t mask = detail::wire_mask(wires, n);
  const std::size_t sub = std::size_t{1} << m;
  std::vector<std::size_t> offsets(sub, 0);
  for (std::size_t s = 0; s < sub; ++s)
    for (int k = 0; k < m; ++k)
      if (s & (std::size_t{1} << (m - 1 - k))) offsets[s] |= detail::wire_bit(n, wires[k]);
  Amplitudes out = Amplitudes::Zero(psi.size());
  for (std::size_t base = 0; base < dim; ++base) {
    if (base & mask) continue;
    for (std::size_t r = 0; r < sub; ++r) {
      Complex acc = 0.0;
      for (std::size_t c = 0; c < sub; ++c) acc += gate(r, c) * psi(base | offsets[c]);
      out(base | offsets[r]) = acc;
    }
  }
  return out;
}

/// Reduced operator on `keep`, in the listed order.
inline Operator partial_trace(const Operator& rho, std::span<const int> keep) {
  const int n = log2_dim(rho.rows());
  detail::check_wires(keep, n);
  const std::size_t dim = std::size_t{1} << n;
  const std::size_t mask = detail::wire_mask(keep, n);
  const std::size_t sub = std::size_t{1} << keep.size();
  Operator out = Operator::Zero(sub, sub);
  for (std::size_t r = 0; r < dim; ++r) {
    const std::size_t gr = detail::gather(r, keep, n);
    for (std::size_t c = 0; c < dim; ++c) {
      if ((r & ~mask) != (c & ~mask)) continue;
      out(gr, detail::gather(c, keep, n)) += rho(r, c);
    }
  }
  return out;
}

inline DensityOperator partial_trace(const DensityOperator& rho, std::span<const int> keep) {
  return DensityOperator(static_cast<int>(keep.size()), partial_trace(rho.matrix(), keep));
}

inline DensityOperator partial_trace(const DensityOperator& rho, std::initializer_list<int> keep) {
  return partial_trace(rho, std::span<const int>(keep.begin(), keep.size()));
}

/// Permutation operator sending wire `order[k]` of the input to position k of the output.
inline Operator wire_permutation(std::span<const int> order) {
  const int n = static_cast<int>(order.size());
  detail::check_wires(order, n);
  const std::size_t dim = std::size_t{1} << n;
  Operator p = Operator::Zero(dim, dim);
  for (std::size_t in = 0; in < dim; ++in) p(detail::gather(in, order, n), in) = 1.0;
  return p;
}

inline Operator cnot() {
  Operator c = Operator::Zero(4, 4);
  c(0, 0) = c(1, 1) = c(2, 3) = c(3, 2) = 1.0;
  return c;
}

}  // namespace framesim
