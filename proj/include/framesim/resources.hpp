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

#include <functional>
#include <optional>
#include <vector>

#include "framesim/frames.hpp"
#include "framesim/invariants.hpp"
#include "framesim/qmath.hpp"
#include "framesim/rng.hpp"
#include "json.hpp"

namespace framesim {

// ---------------------------------------------------------------------------
// Ebits
// ---------------------------------------------------------------------------

/// Which party prepared the singlet and sent one half. FromK: k kept wire 0 and
/// sent wire 1, giving (I (x) V_lk R_kl) beta_0. FromL: l kept wire 1 and sent
/// wire 0, giving (V_kl R_lk (x) I) beta_0.
enum class EbitDirection { FromK, FromL };

struct EbitSpec {
  PartyId k = 0;  // holds wire 0
  PartyId l = 1;  // holds wire 1
  EbitDirection direction = EbitDirection::FromK;
  int bell_class = kBell0;  // 0 singlet, 1..3 = x, y, z
  Register state;

  PartyId maker() const { return direction == EbitDirection::FromK ? k : l; }
};

/// k prepares beta_0 and sends its second qubit to l.
inline EbitSpec make_ebit(const Network& net, PartyId k, PartyId l) {
  if (k == l) throw InputError("ebit needs two distinct parties");
  World world(net);
  Register reg = world.party(k).send(Register::local(k, bell_basis()[kBell0]), 1, l);
  return {k, l, EbitDirection::FromK, kBell0, std::move(reg)};
}

/// l prepares beta_0 and sends its first qubit to k.
inline EbitSpec make_ebit_reverse(const Network& net, PartyId k, PartyId l) {
  if (k == l) throw InputError("ebit needs two distinct parties");
  World world(net);
  Register reg = world.party(l).send(Register::local(l, bell_basis()[kBell0]), 0, k);
  return {k, l, EbitDirection::FromL, kBell0, std::move(reg)};
}

/// Moves an ebit to Bell class `target` with a Pauli product applied by the
/// party that made it (k on wire 0 for FromK, l on wire 1 for FromL).
inline EbitSpec convert_bell_class(const Network& net, const EbitSpec& spec, int target) {
  if (target < 0 || target > 3) throw InputError("Bell class must be 0..3");
  World world(net);
  const Mat2 p = pauli::sigma0xyz(target) * pauli::sigma0xyz(spec.bell_class);
  const PartyId who = spec.maker();
  const int wire = spec.direction == EbitDirection::FromK ? 0 : 1;
  EbitSpec out = spec;
  out.state = world.party(who).apply(spec.state, Operator(p), {wire});
  out.bell_class = target;
  return out;
}

/// Converts a FromK ebit into the FromL ebit of the same Bell class. `by`
/// applies the inverse of its holonomy around by -> other -> by; only l can
/// measure the holonomy that does this, so k attempting it is a protocol
/// violation. Triplet classes are first taken back to the singlet by k and
/// restored by l afterwards.
inline EbitSpec convert_ebit(const Network& net, const EbitSpec& spec, PartyId by) {
  if (spec.direction != EbitDirection::FromK) throw InputError("convert_ebit expects an ebit sent from k to l");
  World world(net);
  const Party actor = world.party(by);
  const SU2Matrix h = actor.holonomy({spec.l, spec.k, spec.l});
  Register reg = spec.state;
  const int j = spec.bell_class;
  if (j != kBell0) reg = world.party(spec.k).apply(reg, Operator(pauli::sigma0xyz(j)), {0});
  reg = actor.apply(reg, h.adjoint(), 1);
  if (j != kBell0) reg = world.party(spec.l).apply(reg, Operator(pauli::sigma0xyz(j)), {1});
  return {spec.k, spec.l, EbitDirection::FromL, j, std::move(reg)};
}

// ---------------------------------------------------------------------------
// GHZ states
// ---------------------------------------------------------------------------

enum class GhzDressing {
  Standard,         // outcome 0, Alice flipped: (I (x) K_BA (x) K_CA) GHZ
  Outcome1,         // outcome 1, uncorrected
  BobCorrected,     // (I (x) X K_BA X (x) K_CA) GHZ
  AliceAndCharlie,  // (I (x) K_BA (x) X K_CA X) GHZ
  Custom            // (I (x) D K_BA D^dag (x) K_CA) GHZ
};

struct GhzVariant {
  PartyId maker, bob, charlie;
  int outcome;         // Alice's measurement result
  double probability;  // of that outcome
  GhzDressing dressing;
  Register state;      // wires (maker, bob, charlie)
};

enum class GhzCorrector { Bob, AliceAndCharlie };

/// Deterministic branch of the GHZ construction: A shares a singlet with B
/// (A sent) and one with C, applies CNOT from the B-entangled qubit to the
/// C-entangled qubit and measures the latter in her standard basis.
/// Outcome 0 is followed by Alice's bit flip.
inline GhzVariant ghz_branch(const Network& net, PartyId a, PartyId b, PartyId c, int outcome) {
  if (a == b || a == c || b == c) throw InputError("GHZ needs three distinct parties");
  if (outcome != 0 && outcome != 1) throw InputError("outcome must be 0 or 1");
  const Register ab = make_ebit(net, a, b).state;
  const Register ac = make_ebit(net, a, c).state;
  World world(net);
  const Party alice = world.party(a);
  Register reg = tensor(ab, ac);  // (A1, B, A2, C)
  reg = alice.apply(reg, cnot(), {0, 2});
  Branch br = computational_branch(alice, reg, 2, outcome);
  if (!br.state) throw StateError("GHZ branch has zero probability");
  Register out = *br.state;
  if (outcome == 0) out = alice.apply(out, Operator(pauli::x()), {0});
  return {a, b, c, outcome, br.probability, outcome == 0 ? GhzDressing::Standard : GhzDressing::Outcome1,
          std::move(out)};
}

inline GhzVariant ghz_from_singlets(const Network& net, PartyId a, PartyId b, PartyId c, Rng& rng) {
  const GhzVariant zero = ghz_branch(net, a, b, c, 0);
  const bool one = std::uniform_real_distribution<double>(0.0, 1.0)(rng) >= zero.probability;
  return one ? ghz_branch(net, a, b, c, 1) : zero;
}

/// Turns the outcome-1 state into a GHZ-class state by bit flips.
inline GhzVariant correct_outcome1(const Network& net, const GhzVariant& v, GhzCorrector who) {
  if (v.dressing != GhzDressing::Outcome1) throw InputError("correction applies to the outcome-1 branch only");
  World world(net);
  const Operator x(pauli::x());
  GhzVariant out = v;
  if (who == GhzCorrector::Bob) {
    out.state = world.party(v.bob).apply(v.state, x, {1});
    out.dressing = GhzDressing::BobCorrected;
  } else {
    out.state = world.party(v.maker).apply(v.state, x, {0});
    out.state = world.party(v.charlie).apply(out.state, x, {2});
    out.dressing = GhzDressing::AliceAndCharlie;
  }
  return out;
}

/// (I (x) D K_BA D^dag (x) K_CA) GHZ, made by Alice preparing GHZ locally,
/// applying D^dag to Bob's qubit before sending it, and Bob applying D after.
/// D = X reproduces the Bob-corrected state.
inline GhzVariant dressed_ghz(const Network& net, PartyId a, PartyId b, PartyId c, const Operator& d) {
  if (a == b || a == c || b == c) throw InputError("GHZ needs three distinct parties");
  World world(net);
  const Party alice = world.party(a);
  Amplitudes g = Amplitudes::Zero(8);
  g(0) = g(7) = 1.0 / std::sqrt(2.0);
  Register reg = Register::local(a, PureState(3, g));
  reg = alice.apply(reg, d.adjoint(), {1});
  reg = alice.send(reg, 1, b);
  reg = alice.send(reg, 2, c);
  reg = world.party(b).apply(reg, d, {1});
  return {a, b, c, -1, 1.0, GhzDressing::Custom, std::move(reg)};
}

// ---------------------------------------------------------------------------
// Refbits
// ---------------------------------------------------------------------------

struct Refbit {
  PartyId preparer;
  PartyId holder;
  PureState prepared;  // in the preparer's basis
};

/// The preparer makes psi and sends it to the holder.
inline std::pair<Refbit, Register> make_refbit(const Network& net, PartyId preparer, PartyId holder,
                                               const PureState& psi) {
  if (preparer == holder) throw InputError("refbit needs two distinct parties");
  if (psi.qubits() != 1) throw InputError("refbit is a single qubit");
  World world(net);
  Register r = world.party(preparer).send(Register::local(preparer, psi), 0, holder);
  return {Refbit{preparer, holder, psi}, std::move(r)};
}

// ---------------------------------------------------------------------------
// Local-unitary equivalence
// ---------------------------------------------------------------------------

enum class Verdict { Equivalent, NotReached };

inline const char* to_string(Verdict v) { return v == Verdict::Equivalent ? "Equivalent" : "NotReached"; }

struct LuOptions {
  int restarts = 32;
  int iterations = 2000;
  std::uint64_t seed = 1;
  double target = 1.0 - 1e-6;  // Equivalent iff fidelity >= target
  bool stop_when_reached = true;
};

struct EquivalenceVerdict {
  double max_fidelity = 0.0;
  Verdict verdict = Verdict::NotReached;
  int restarts_used = 0;
  std::vector<std::vector<Operator>> unitaries;  // [group][choice]
};

/// Maximisation of the mean of |<s2_i| (x)_g U_{g, choice_i[g]} |s1_i>| over
/// unitaries acting on groups of wires. Each instance picks, per group, which
/// of that group's unitaries it sees.
struct LuProblem {
  int qubits = 0;
  std::vector<std::vector<int>> groups;
  std::vector<int> choices_per_group;
  struct Instance {
    Amplitudes s1, s2;
    std::vector<int> choice;
  };
  std::vector<Instance> instances;
};

namespace detail {

/// Tr over the wires outside `keep` of |phi><chi|.
inline Operator cross_reduced(const Amplitudes& phi, const Amplitudes& chi, const std::vector<int>& keep, int n) {
  const std::size_t dim = std::size_t{1} << n;
  const std::size_t mask = wire_mask(keep, n);
  const std::size_t sub = std::size_t{1} << keep.size();
  Operator c = Operator::Zero(sub, sub);
  for (std::size_t r = 0; r < dim; ++r) {
    if (phi(r) == Complex(0.0)) continue;
    for (std::size_t s = 0; s < dim; ++s) {
      if ((r & ~mask) != (s & ~mask)) continue;
      c(gather(r, keep, n), gather(s, keep, n)) += phi(r) * std::conj(chi(s));
    }
  }
  return c;
}

class LuOptimizer {
 public:
  explicit LuOptimizer(const LuProblem& p) : p_(p) {}

  using Point = std::vector<std::vector<Operator>>;

  double value(const Point& u) const {
    double f = 0.0;
    for (const auto& inst : p_.instances) f += std::abs(inst.s2.dot(apply_all(u, inst)));
    return f / static_cast<double>(p_.instances.size());
  }

  /// Riemannian gradient: Hermitian traceless G per unitary, so that the
  /// directional derivative along U -> exp(i t H) U is <G, H>.
  double gradient(const Point& u, Point& g) const {
    g.assign(u.size(), {});
    for (std::size_t k = 0; k < u.size(); ++k)
      for (const auto& x : u[k]) g[k].push_back(Operator::Zero(x.rows(), x.cols()));
    double f = 0.0;
    for (const auto& inst : p_.instances) {
      const Amplitudes phi = apply_all(u, inst);
      const Complex o = inst.s2.dot(phi);
      const double a = std::abs(o);
      f += a;
      if (a < 1e-300) continue;
      for (std::size_t k = 0; k < p_.groups.size(); ++k) {
        const Operator c = cross_reduced(phi, inst.s2, p_.groups[k], p_.qubits);
        const Operator m = kI * std::conj(o) * c / a;
        Operator h = 0.5 * (m + m.adjoint());
        h.diagonal().array() -= h.trace() / static_cast<double>(h.rows());
        g[k][inst.choice[k]] += h;
      }
    }
    const double scale = 1.0 / static_cast<double>(p_.instances.size());
    for (auto& gk : g)
      for (auto& x : gk) x *= scale;
    return f * scale;
  }

  static double norm2(const Point& g) {
    double s = 0.0;
    for (const auto& gk : g)
      for (const auto& x : gk) s += x.squaredNorm();
    return s;
  }

  static Point step(const Point& u, const Point& g, double t) {
    Point out = u;
    for (std::size_t k = 0; k < u.size(); ++k)
      for (std::size_t c = 0; c < u[k].size(); ++c) out[k][c] = exp_i_hermitian(t * g[k][c]) * u[k][c];
    return out;
  }

  /// Gradient ascent with backtracking on one start.
  double ascend(Point& u, int iterations) const {
    Point g;
    double f = gradient(u, g);
    double t = 1.0;
    for (int it = 0; it < iterations; ++it) {
      const double gn = norm2(g);
      if (gn < 1e-22 || f >= 1.0 - 1e-13) break;
      bool moved = false;
      for (int bt = 0; bt < 40; ++bt) {
        Point cand = step(u, g, t);
        const double fc = value(cand);
        if (fc >= f + 1e-4 * t * gn) {
          u = std::move(cand);
          moved = true;
          t = std::min(t * 2.0, 64.0);
          break;
        }
        t *= 0.5;
      }
      if (!moved) break;
      f = gradient(u, g);
    }
    return f;
  }

 private:
  Amplitudes apply_all(const Point& u, const LuProblem::Instance& inst) const {
    Amplitudes v = inst.s1;
    for (std::size_t k = 0; k < p_.groups.size(); ++k) v = apply_on_wires(u[k][inst.choice[k]], p_.groups[k], v, p_.qubits);
    return v;
  }

  const LuProblem& p_;
};

}  // namespace detail

inline EquivalenceVerdict solve_lu_problem(const LuProblem& p, const LuOptions& opt) {
  if (p.instances.empty()) throw InputError("LU problem has no instances");
  if (opt.restarts < 1 || opt.iterations < 1) throw InputError("restarts and iterations must be positive");
  for (const auto& inst : p.instances)
    if (inst.s1.size() != (Eigen::Index{1} << p.qubits) || inst.s2.size() != inst.s1.size())
      throw InputError("LU problem state dimension mismatch");
  detail::LuOptimizer o(p);
  EquivalenceVerdict best;
  best.max_fidelity = -1.0;
  for (int r = 0; r < opt.restarts; ++r) {
    Rng rng = derive_stream(opt.seed, static_cast<std::uint64_t>(r));
    detail::LuOptimizer::Point u;
    for (std::size_t k = 0; k < p.groups.size(); ++k) {
      const int d = 1 << p.groups[k].size();
      std::vector<Operator> us;
      for (int c = 0; c < p.choices_per_group[k]; ++c)
        us.push_back(r == 0 ? Operator(Operator::Identity(d, d)) : random_unitary(d, rng));
      u.push_back(std::move(us));
    }
    const double f = o.ascend(u, opt.iterations);
    best.restarts_used = r + 1;
    if (f > best.max_fidelity) {
      best.max_fidelity = f;
      best.unitaries = u;
    }
    if (opt.stop_when_reached && best.max_fidelity >= opt.target) break;
  }
  best.max_fidelity = std::clamp(best.max_fidelity, 0.0, 1.0);
  best.verdict = best.max_fidelity >= opt.target ? Verdict::Equivalent : Verdict::NotReached;
  return best;
}

/// Best |<state2| (x)_g U_g |state1>| over unitaries on the given wire groups
/// (each group is one party's wires; a single-wire group is a local SU(2)).
inline EquivalenceVerdict lu_equivalence(const PureState& state1, const PureState& state2,
                                         const std::vector<std::vector<int>>& partition, const LuOptions& opt = {}) {
  if (state1.qubits() != state2.qubits()) throw InputError("states differ in qubit count");
  std::vector<int> all;
  for (const auto& g : partition) all.insert(all.end(), g.begin(), g.end());
  detail::check_wires(all, state1.qubits());
  if (static_cast<int>(all.size()) != state1.qubits()) throw InputError("partition must cover every wire");
  LuProblem p;
  p.qubits = state1.qubits();
  p.groups = partition;
  p.choices_per_group.assign(partition.size(), 1);
  p.instances.push_back({state1.amplitudes(), state2.amplitudes(), std::vector<int>(partition.size(), 0)});
  return solve_lu_problem(p, opt);
}

/// Wire groups of a register, one per holding party, in party order.
inline std::vector<std::vector<int>> party_partition(const Register& reg) {
  std::vector<std::vector<int>> groups;
  std::vector<PartyId> seen;
  for (PartyId h : reg.holders())
    if (std::find(seen.begin(), seen.end(), h) == seen.end()) seen.push_back(h);
  std::sort(seen.begin(), seen.end());
  for (PartyId h : seen) groups.push_back(reg.wires_of(h));
  return groups;
}

using Procedure = std::function<Register(const Network&)>;

/// Equivalence of two procedures' outputs under local unitaries each party
/// could actually choose. Both procedures are re-run on copies of the network
/// in which every holding party's frame takes one of `frame_samples` values
/// (the first is the unchanged frame). A
/// party's unitary may depend on its own frame value only. The fidelity is the
/// mean overlap over all frame combinations. Two frame values are too few for
/// three-party states: a pi-rotation axis compatible with two frames always
/// exists, so the default is three.
inline EquivalenceVerdict knowledge_consistent_equivalence(const Network& net, const Procedure& p1,
                                                           const Procedure& p2, const LuOptions& opt = {},
                                                           int frame_samples = 3) {
  if (frame_samples < 1) throw InputError("frame_samples must be positive");
  const Register r1 = p1(net), r2 = p2(net);
  if (r1.holders() != r2.holders()) throw InputError("procedures must leave wires with the same holders");
  const auto groups = party_partition(r1);
  std::vector<PartyId> parties;
  for (const auto& g : groups) parties.push_back(r1.holder(g.front()));

  // Frame value s is a rotation by 2 pi s / frame_samples about (1,1,1), or
  // about z under the z-rotation restriction. For three values this cycles
  // the x, y and z axes, which spreads the variants as far as possible.
  const Vec3 axis = net.restriction() == FrameRestriction::ZRotationOnly ? Vec3::UnitZ() : Vec3(1, 1, 1).normalized();
  std::vector<SU2Matrix> values;
  for (int s = 0; s < frame_samples; ++s)
    values.push_back(su2_from_axis_angle(axis, 2.0 * std::numbers::pi * s / frame_samples));
  const std::vector<std::vector<SU2Matrix>> changes(parties.size(), values);

  LuProblem p;
  p.qubits = r1.qubits();
  p.groups = groups;
  p.choices_per_group.assign(groups.size(), frame_samples);
  std::vector<int> choice(parties.size(), 0);
  while (true) {
    Network variant = net;
    for (std::size_t i = 0; i < parties.size(); ++i)
      if (choice[i] != 0) variant = apply_frame_change(variant, parties[i], changes[i][choice[i]]);
    const Register a = p1(variant), b = p2(variant);
    if (a.holders() != r1.holders() || b.holders() != r1.holders())
      throw InputError("procedure output layout depends on frames");
    p.instances.push_back({a.state().amplitudes(), b.state().amplitudes(), choice});
    std::size_t i = 0;
    for (; i < choice.size(); ++i) {
      if (++choice[i] < frame_samples) break;
      choice[i] = 0;
    }
    if (i == choice.size()) break;
  }
  return solve_lu_problem(p, opt);
}

inline nlohmann::json verdict_to_json(const EquivalenceVerdict& v) {
  nlohmann::json j;
  j["fidelity"] = v.max_fidelity;
  j["verdict"] = to_string(v.verdict);
  j["restarts"] = v.restarts_used;
  nlohmann::json angles = nlohmann::json::array();
  for (const auto& group : v.unitaries) {
    nlohmann::json g = nlohmann::json::array();
    for (const auto& u : group) {
      if (u.rows() == 2) {
        // Strip the U(1) phase before taking the rotation vector.
        Mat2 m = u;
        m /= std::sqrt(m.determinant());
        const Vec3 r = su2_rotation_vector(SU2Matrix(m, 1e-9));
        g.push_back({r(0), r(1), r(2)});
      } else {
        nlohmann::json rows = nlohmann::json::array();
        for (Eigen::Index i = 0; i < u.rows(); ++i)
          for (Eigen::Index c = 0; c < u.cols(); ++c) rows.push_back({u(i, c).real(), u(i, c).imag()});
        g.push_back(rows);
      }
    }
    angles.push_back(g);
  }
  j["angles"] = angles;
  return j;
}

}  // namespace framesim
