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

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "framesim/frames.hpp"
#include "framesim/invariants.hpp"
#include "framesim/qmath.hpp"
#include "framesim/resources.hpp"
#include "framesim/rng.hpp"

namespace framesim {

struct TranscriptEvent {
  PartyId party;
  std::string action;
  std::string outcome;
  double probability = 1.0;
};

struct Transcript {
  std::vector<TranscriptEvent> events;
  std::string verdict;

  void add(PartyId p, std::string action, std::string outcome = "", double probability = 1.0) {
    events.push_back({p, std::move(action), std::move(outcome), probability});
  }
};

inline nlohmann::json transcript_to_json(const Transcript& t) {
  nlohmann::json ev = nlohmann::json::array();
  for (const auto& e : t.events)
    ev.push_back({{"party", party_name(e.party)}, {"action", e.action}, {"outcome", e.outcome},
                  {"probability", e.probability}});
  return {{"events", ev}, {"verdict", t.verdict}};
}

// ---------------------------------------------------------------------------
// Data hiding
// ---------------------------------------------------------------------------

enum class HiddenBit { Plus, Minus };
/// ZType hides in (|01> +- |10>)/sqrt2, i.e. beta_z / beta_0; XYType hides in
/// (|00> +- |11>)/sqrt2, i.e. beta_y / beta_x.
enum class HidingPair { ZType, XYType };
enum class RefbitConfig { SameState, Orthogonal };

inline const char* to_string(HiddenBit b) { return b == HiddenBit::Plus ? "+" : "-"; }
inline const char* to_string(RefbitConfig c) { return c == RefbitConfig::SameState ? "same" : "orthogonal"; }

struct DataHidingInstance {
  HiddenBit bit;
  HidingPair pair;
  Register state;  // wires (Alice, Bob)
};

inline PureState hiding_state(HiddenBit bit, HidingPair pair) {
  const double s = bit == HiddenBit::Plus ? 1.0 : -1.0;
  return pair == HidingPair::ZType ? PureState::normalized(2, PureState::ket("01").amplitudes() + s * PureState::ket("10").amplitudes())
                                   : PureState::normalized(2, PureState::ket("00").amplitudes() + s * PureState::ket("11").amplitudes());
}

/// Charlie prepares the two-qubit state for `bit` and sends one qubit each to
/// Alice and Bob.
inline DataHidingInstance hide_bit(const Network& net, HiddenBit bit, HidingPair pair = HidingPair::ZType) {
  if (net.party_count() < 3) throw InputError("data hiding needs three parties");
  World world(net);
  const Party charlie = world.party(kCharlie);
  Register reg = Register::local(kCharlie, hiding_state(bit, pair));
  reg = charlie.send(reg, 0, kAlice);
  reg = charlie.send(reg, 1, kBob);
  return {bit, pair, std::move(reg)};
}

enum class Recovered { Plus, Minus, Indeterminate };

inline const char* to_string(Recovered r) {
  switch (r) {
    case Recovered::Plus: return "+";
    case Recovered::Minus: return "-";
    case Recovered::Indeterminate: return "indeterminate";
  }
  return "?";
}

struct ForwardingResult {
  double p_singlet;           // Born probability of Alice's singlet outcome
  double p_correct;           // probability the announced bit equals the hidden one
  Recovered on_singlet;       // what Alice concludes from each outcome
  Recovered on_triplet;
  Transcript transcript;
};

/// Bob forwards his qubit to Alice. Alice applies
/// U = H(A->C->A) H(A->C->B->A)^dag to it, which turns the pair into
/// (V_AC R_CA (x) V_AC R_CA) psi, and measures singlet vs triplet. For the
/// ZType pair the singlet means '-' and the triplet '+'; for the XYType pair
/// both states are triplets and nothing is learned.
inline ForwardingResult unlock_by_forwarding(const Network& net, const DataHidingInstance& inst) {
  World world(net);
  const Party alice = world.party(kAlice), bob = world.party(kBob);
  ForwardingResult out{};
  Register reg = bob.send(inst.state, 1, kAlice);
  out.transcript.add(kBob, "forward qubit to Alice");
  const SU2Matrix h_aca = alice.holonomy({kAlice, kCharlie, kAlice});
  const SU2Matrix h_acba = alice.holonomy({kAlice, kCharlie, kBob, kAlice});
  reg = alice.apply(reg, h_aca * h_acba.adjoint(), 1);
  out.transcript.add(kAlice, "apply holonomy correction to second qubit");
  const Povm st = povm2_singlet_triplet();
  const auto p = outcome_distribution(reg, st, {0, 1});
  out.p_singlet = p[0];
  out.on_singlet = inst.pair == HidingPair::ZType ? Recovered::Minus : Recovered::Indeterminate;
  out.on_triplet = inst.pair == HidingPair::ZType ? Recovered::Plus : Recovered::Indeterminate;
  const Recovered truth = inst.bit == HiddenBit::Plus ? Recovered::Plus : Recovered::Minus;
  out.p_correct = (out.on_singlet == truth ? p[0] : 0.0) + (out.on_triplet == truth ? p[1] : 0.0);
  out.transcript.add(kAlice, "singlet/triplet POVM", "singlet", p[0]);
  out.transcript.verdict = p[0] > 0.5 ? to_string(out.on_singlet) : to_string(out.on_triplet);
  return out;
}

enum class RefbitOutcome { ConclusivePlus, ConclusiveMinus, Inconclusive };

inline const char* to_string(RefbitOutcome o) {
  switch (o) {
    case RefbitOutcome::ConclusivePlus: return "conclusive+";
    case RefbitOutcome::ConclusiveMinus: return "conclusive-";
    case RefbitOutcome::Inconclusive: return "inconclusive";
  }
  return "?";
}

/// Refbit states Charlie sends to Alice and Bob: |+>, |+> or |+>, |->.
inline std::pair<PureState, PureState> refbit_states(RefbitConfig c) {
  const PureState plus = PureState::normalized(1, PureState::ket("0").amplitudes() + PureState::ket("1").amplitudes());
  const PureState minus = PureState::normalized(1, PureState::ket("0").amplitudes() - PureState::ket("1").amplitudes());
  return {plus, c == RefbitConfig::SameState ? plus : minus};
}

/// Hidden pair plus Charlie's two refbits: wires (A hidden, B hidden, A ref, B ref).
inline Register with_refbits(const Network& net, const DataHidingInstance& inst, RefbitConfig c) {
  const auto [ra, rb] = refbit_states(c);
  Register reg = tensor(inst.state, tensor(make_refbit(net, kCharlie, kAlice, ra).second,
                                           make_refbit(net, kCharlie, kBob, rb).second));
  return reg;
}

struct RefbitUnlockResult {
  double p_both_singlet;
  RefbitOutcome on_both_singlet;  // otherwise Inconclusive
  double p_success;               // conclusive and correct
};

/// Alice measures singlet/triplet on her (hidden, ref) pair, Bob on his.
/// Both-singlet identifies '+' for SameState refbits and '-' for Orthogonal.
inline RefbitUnlockResult unlock_with_refbits(const Network& net, const DataHidingInstance& inst, RefbitConfig c) {
  const Register reg = with_refbits(net, inst, c);
  World world(net);
  const Povm st = povm2_singlet_triplet();
  const Branch a = povm_branch(world.party(kAlice), reg, st, {0, 2}, 0);
  double p = 0.0;
  if (a.state) p = a.probability * povm_branch(world.party(kBob), *a.state, st, {1, 3}, 0).probability;
  RefbitUnlockResult out{};
  out.p_both_singlet = p;
  out.on_both_singlet = c == RefbitConfig::SameState ? RefbitOutcome::ConclusivePlus : RefbitOutcome::ConclusiveMinus;
  const bool right = (inst.bit == HiddenBit::Plus) == (c == RefbitConfig::SameState);
  out.p_success = right ? p : 0.0;
  return out;
}

/// Success probability averaged over the hidden bit (uniform) and the refbit
/// configuration, with P(SameState) = p_same.
inline double refbit_success_probability(const Network& net, double p_same = 0.5) {
  if (p_same < 0.0 || p_same > 1.0) throw InputError("p_same must lie in [0, 1]");
  double s = 0.0;
  for (HiddenBit b : {HiddenBit::Plus, HiddenBit::Minus}) {
    const auto inst = hide_bit(net, b);
    s += 0.5 * p_same * unlock_with_refbits(net, inst, RefbitConfig::SameState).p_success;
    s += 0.5 * (1.0 - p_same) * unlock_with_refbits(net, inst, RefbitConfig::Orthogonal).p_success;
  }
  return s;
}

/// Sampled refbit protocol: per trial a uniform bit, a configuration (SameState
/// with probability p_same), and both parties' measurements. Counts
/// {successes, conclusive outcomes}.
inline std::vector<long long> refbit_monte_carlo(const Network& net, long long trials, std::uint64_t seed,
                                                 double p_same = 0.5, unsigned threads = 0) {
  std::array<Register, 4> regs{with_refbits(net, hide_bit(net, HiddenBit::Plus), RefbitConfig::SameState),
                               with_refbits(net, hide_bit(net, HiddenBit::Plus), RefbitConfig::Orthogonal),
                               with_refbits(net, hide_bit(net, HiddenBit::Minus), RefbitConfig::SameState),
                               with_refbits(net, hide_bit(net, HiddenBit::Minus), RefbitConfig::Orthogonal)};
  const Povm st = povm2_singlet_triplet();
  return run_counted_trials(trials, seed, 2, [&](long long, Rng& rng, std::vector<long long>& counts) {
    World world(net);
    const bool plus = uniform01(rng) < 0.5;
    const bool same = uniform01(rng) < p_same;
    const Register& reg = regs[(plus ? 0 : 2) + (same ? 0 : 1)];
    const auto a = measure(world.party(kAlice), reg, st, {0, 2}, rng);
    if (a.outcome != 0) return;
    const auto b = measure(world.party(kBob), a.state, st, {1, 3}, rng);
    if (b.outcome != 0) return;
    ++counts[1];
    if (plus == same) ++counts[0];
  }, threads);
}

// ---------------------------------------------------------------------------
// Superdense coding
// ---------------------------------------------------------------------------

enum class SuperdenseResource { None, EntangledPair, TwoRefbits };

inline const char* to_string(SuperdenseResource r) {
  switch (r) {
    case SuperdenseResource::None: return "none";
    case SuperdenseResource::EntangledPair: return "pair";
    case SuperdenseResource::TwoRefbits: return "refbits";
  }
  return "?";
}

inline SuperdenseResource superdense_resource_from_string(const std::string& s) {
  if (s == "none") return SuperdenseResource::None;
  if (s == "pair") return SuperdenseResource::EntangledPair;
  if (s == "refbits") return SuperdenseResource::TwoRefbits;
  throw InputError("unknown resource '" + s + "' (expected none, pair or refbits)");
}

/// Alice's operations, indexed I, X, Y, Z.
inline const char* pauli_name(int op) {
  static const char* const n[] = {"I", "X", "Y", "Z"};
  if (op < 0 || op > 3) throw InputError("operation index must be 0..3");
  return n[op];
}

struct SuperdenseSession {
  SuperdenseResource resource;
  int operation;   // 0..3 = I, X, Y, Z
  Register state;  // all wires with Bob: (ebit pair, resource qubits...)
};

/// Alice and Bob share an ebit Alice made; Alice applies her operation to her
/// half and sends it, followed by the resource qubits (beta_x, or |0>|0>).
inline SuperdenseSession superdense_session(const Network& net, int operation, SuperdenseResource resource) {
  pauli_name(operation);
  Register reg = make_ebit(net, kAlice, kBob).state;
  World world(net);
  const Party alice = world.party(kAlice);
  reg = alice.apply(reg, Operator(pauli::sigma0xyz(operation)), {0});
  reg = alice.send(reg, 0, kBob);
  if (resource != SuperdenseResource::None) {
    const PureState extra = resource == SuperdenseResource::EntangledPair ? bell_basis()[kBellX] : PureState::ket("00");
    Register r = Register::local(kAlice, extra);
    r = alice.send(r, 0, kBob);
    r = alice.send(r, 1, kBob);
    reg = tensor(reg, r);
  }
  return {resource, operation, std::move(reg)};
}

/// Bob's outcome labels and exact probabilities: singlet/triplet on the ebit
/// pair, then (with a resource, after triplet) the four-qubit invariant POVM.
struct SuperdenseOutcome {
  std::vector<std::string> labels;
  std::vector<double> probabilities;

  double probability(const std::string& label) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == label) return probabilities[i];
    throw InputError("no outcome labelled '" + label + "'");
  }
};

inline SuperdenseOutcome superdense_round(const Network& net, const SuperdenseSession& s) {
  World world(net);
  const Party bob = world.party(kBob);
  const Povm st = povm2_singlet_triplet();
  SuperdenseOutcome out;
  const Branch singlet = povm_branch(bob, s.state, st, {0, 1}, 0);
  const Branch triplet = povm_branch(bob, s.state, st, {0, 1}, 1);
  out.labels.push_back("singlet");
  out.probabilities.push_back(singlet.probability);
  if (s.resource == SuperdenseResource::None) {
    out.labels.push_back("triplet");
    out.probabilities.push_back(triplet.probability);
    return out;
  }
  const Povm p4 = povm4_invariant();
  for (std::size_t k = 0; k < p4.size(); ++k) {
    out.labels.push_back("triplet/" + p4.label(k));
    out.probabilities.push_back(triplet.state ? triplet.probability * povm_branch(bob, *triplet.state, p4, {0, 1, 2, 3}, k).probability : 0.0);
  }
  return out;
}

/// Probability that Bob sees phi_01 (two bits) when Alice draws her operation
/// from `strategy` (weights for I, X, Y, Z).
inline double superdense_two_bit_probability(const Network& net, SuperdenseResource r, const std::array<double, 4>& strategy) {
  if (r == SuperdenseResource::None) return 0.0;
  double s = 0.0;
  for (int op = 0; op < 4; ++op)
    if (strategy[op] > 0) s += strategy[op] * superdense_round(net, superdense_session(net, op, r)).probability("triplet/phi01");
  return s;
}

inline std::array<double, 4> default_superdense_strategy() { return {0.5, 0.125, 0.125, 0.25}; }

/// Sampled rounds: per trial Alice draws an operation, Bob measures. Counts
/// {singlet outcomes, phi_01 outcomes}.
inline std::vector<long long> superdense_monte_carlo(const Network& net, SuperdenseResource r,
                                                     const std::array<double, 4>& strategy, long long trials,
                                                     std::uint64_t seed, unsigned threads = 0) {
  std::vector<Register> regs;
  for (int op = 0; op < 4; ++op) regs.push_back(superdense_session(net, op, r).state);
  const Povm st = povm2_singlet_triplet();
  const Povm p4 = povm4_invariant();
  const std::size_t phi01 = p4.index_of("phi01");
  return run_counted_trials(trials, seed, 2, [&](long long, Rng& rng, std::vector<long long>& counts) {
    World world(net);
    const Party bob = world.party(kBob);
    std::discrete_distribution<int> pick(strategy.begin(), strategy.end());
    const int op = pick(rng);
    const auto m = measure(bob, regs[op], st, {0, 1}, rng);
    if (m.outcome == 0) {
      ++counts[0];
      return;
    }
    if (r == SuperdenseResource::None) return;
    if (measure(bob, m.state, p4, {0, 1, 2, 3}, rng).outcome == phi01) ++counts[1];
  }, threads);
}

// ---------------------------------------------------------------------------
// Bit commitment
// ---------------------------------------------------------------------------

/// Which two of Alice's four data qubits go to Bob first.
enum class SentPair { FirstThird, FirstSecond };

inline const char* to_string(SentPair p) { return p == SentPair::FirstThird ? "13" : "12"; }

enum class CommitPhase { Committed, Opened };

/// One branch of Alice's commitment: the five-wire register in the layout
/// (sent_1, sent_2, kept_1, kept_2, ancilla). The sent wires are Bob's.
struct CommitBranch {
  double probability;
  SentPair sent;
  Register state;
};

struct OpenedBranch {
  double probability;
  int announced_bit;
  SentPair announced_pair;
  Register state;  // all five wires; data wires with Bob
};

struct CommitmentSession {
  int bit;
  std::vector<CommitBranch> branches;  // Bob cannot tell these apart
  std::size_t actual;                  // branch Alice actually took
  CommitPhase phase = CommitPhase::Committed;
  std::vector<OpenedBranch> opened;
  Transcript transcript;
};

namespace detail {

/// Data qubit order (q1..q4, zero-based) placed at layout positions 0..3.
inline std::vector<int> layout_order(SentPair p) {
  return p == SentPair::FirstThird ? std::vector<int>{0, 2, 1, 3} : std::vector<int>{0, 1, 2, 3};
}

/// Five-wire Alice-local state for a commitment branch, ancilla in |anc>.
inline PureState commitment_layout(int bit, SentPair p, int anc = 0) {
  const auto phi = phi_invariant_states();
  const PureState& s = bit == 0 ? phi.phi00 : phi.phi01;
  PureState placed(4, wire_permutation(layout_order(p)) * s.amplitudes());
  return placed.tensor(PureState::basis(1, static_cast<std::size_t>(anc)));
}

inline Register send_pair(const Party& alice, Register reg) {
  reg = alice.send(reg, 0, kBob);
  return alice.send(reg, 1, kBob);
}

}  // namespace detail

/// Alice commits. Bit 0: phi_00, sends q1 q3. Bit 1: phi_01, sends q1 q3 with
/// probability 1/3, else q1 q2.
inline CommitmentSession commit(const Network& net, int bit, Rng& rng) {
  if (bit != 0 && bit != 1) throw InputError("committed bit must be 0 or 1");
  World world(net);
  const Party alice = world.party(kAlice);
  CommitmentSession s;
  s.bit = bit;
  auto branch = [&](double p, SentPair sp) {
    Register reg = Register::local(kAlice, detail::commitment_layout(bit, sp));
    s.branches.push_back({p, sp, detail::send_pair(alice, reg)});
  };
  if (bit == 0) {
    branch(1.0, SentPair::FirstThird);
    s.actual = 0;
  } else {
    branch(1.0 / 3.0, SentPair::FirstThird);
    branch(2.0 / 3.0, SentPair::FirstSecond);
    s.actual = uniform01(rng) < 1.0 / 3.0 ? 0 : 1;
  }
  s.transcript.add(kAlice, "prepare and send two qubits", to_string(s.branches[s.actual].sent),
                   s.branches[s.actual].probability);
  return s;
}

/// Singlet/triplet probabilities on Bob's pair, averaged over the branches
/// Bob cannot distinguish.
inline std::vector<double> bob_probe(const Network& net, const CommitmentSession& s, const Povm& povm) {
  if (s.phase != CommitPhase::Committed) throw StateError("Bob can only probe a committed session");
  World world(net);
  const Party bob = world.party(kBob);
  std::vector<double> p(povm.size(), 0.0);
  for (const auto& b : s.branches) {
    bob.require_holds(b.state, {0, 1});
    const auto q = outcome_distribution(b.state, povm, {0, 1});
    for (std::size_t i = 0; i < p.size(); ++i) p[i] += b.probability * q[i];
  }
  return p;
}

inline std::vector<double> bob_probe(const Network& net, const CommitmentSession& s) {
  return bob_probe(net, s, povm2_singlet_triplet());
}

/// Bob's reduced density operator on his two received qubits, mixed over branches.
inline Operator bob_reduced_state(const CommitmentSession& s) {
  Operator rho = Operator::Zero(4, 4);
  const int keep[] = {0, 1};
  for (const auto& b : s.branches) {
    const Amplitudes& a = b.state.state().amplitudes();
    rho += b.probability * partial_trace(Operator(a * a.adjoint()), keep);
  }
  return rho;
}

/// Unitary on (kept_1, kept_2, ancilla) taking Alice's bit-0 commitment to a
/// purification of the honest bit-1 commitment in which the ancilla records
/// the sent pair (|0> for q1 q3, |1> for q1 q2). Built by matching Schmidt
/// vectors across the Bob / Alice cut in a common eigenbasis of Bob's reduced
/// state, then completing both Alice-side sets to orthonormal bases.
inline Operator cheat_unitary() {
  const PureState psi0 = detail::commitment_layout(0, SentPair::FirstThird, 0);
  const Amplitudes psi1 = std::sqrt(1.0 / 3.0) * detail::commitment_layout(1, SentPair::FirstThird, 0).amplitudes() +
                          std::sqrt(2.0 / 3.0) * detail::commitment_layout(1, SentPair::FirstSecond, 1).amplitudes();
  // Amplitude index = bob * 8 + alice, so row b of M holds Alice's components.
  auto as_matrix = [](const Amplitudes& v) {
    Eigen::Matrix<Complex, 4, 8> m;
    for (int b = 0; b < 4; ++b)
      for (int a = 0; a < 8; ++a) m(b, a) = v(b * 8 + a);
    return m;
  };
  const auto m0 = as_matrix(psi0.amplitudes()), m1 = as_matrix(psi1);
  const Eigen::Matrix4cd rho0 = m0 * m0.adjoint(), rho1 = m1 * m1.adjoint();
  if (max_abs(rho0 - rho1) > 1e-10) throw ConstructionError("Bob's reduced states differ; no cheating unitary exists");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho0);
  Operator f0(8, 0), f1(8, 0);
  for (int i = 0; i < 4; ++i) {
    const double lam = es.eigenvalues()(i);
    if (lam < 1e-12) continue;
    const Eigen::Vector4cd e = es.eigenvectors().col(i);
    const Amplitudes a0 = m0.transpose() * e.conjugate() / std::sqrt(lam);
    const Amplitudes a1 = m1.transpose() * e.conjugate() / std::sqrt(lam);
    f0.conservativeResize(8, f0.cols() + 1);
    f1.conservativeResize(8, f1.cols() + 1);
    f0.col(f0.cols() - 1) = a0;
    f1.col(f1.cols() - 1) = a1;
  }
  auto rank = [](const Operator& f) { return Eigen::FullPivLU<Operator>(f).rank(); };
  if (f0.cols() == 0 || rank(f0) != rank(f1)) throw ConstructionError("Schmidt ranks differ");
  // Complete each set to an orthonormal basis of C^8.
  auto complete = [](const Operator& f) {
    Eigen::HouseholderQR<Operator> qr(f);
    Operator q = qr.householderQ();
    Operator basis = q;
    basis.leftCols(f.cols()) = f;
    return basis;
  };
  const Operator b0 = complete(f0), b1 = complete(f1);
  Operator w = b1 * b0.adjoint();
  if (!is_unitary(w, 1e-10)) throw ConstructionError("cheating map is not unitary");
  return w;
}

enum class OpenStrategy { Honest, Cheat };

/// Alice opens as `claimed_bit`. Honest: announce the bit and the sent pair she
/// used. Cheat (bit-0 commitment opened as 1): apply cheat_unitary to her kept
/// wires and ancilla, measure the ancilla, and announce the pair it records.
/// Then she sends her kept wires.
inline void open_commitment(const Network& net, CommitmentSession& s, int claimed_bit, OpenStrategy strategy) {
  if (s.phase != CommitPhase::Committed) throw StateError("session already opened");
  World world(net);
  const Party alice = world.party(kAlice);
  s.opened.clear();
  auto finish = [&](double p, int bit, SentPair sp, Register reg) {
    reg = alice.send(reg, 2, kBob);
    reg = alice.send(reg, 3, kBob);
    s.opened.push_back({p, bit, sp, std::move(reg)});
  };
  const bool cheating = strategy == OpenStrategy::Cheat && claimed_bit != s.bit;
  if (!cheating) {
    const auto& b = s.branches[s.actual];
    finish(1.0, claimed_bit, b.sent, b.state);
    s.transcript.add(kAlice, "announce", std::to_string(claimed_bit) + "/" + to_string(b.sent));
  } else {
    if (s.bit != 0 || claimed_bit != 1) throw StateError("the cheat opens a bit-0 commitment as 1");
    Register reg = alice.apply(s.branches[s.actual].state, cheat_unitary(), {2, 3, 4});
    s.transcript.add(kAlice, "apply cheating unitary");
    const Povm z1(1, {projector(PureState::ket("0")), projector(PureState::ket("1"))}, {"0", "1"});
    for (std::size_t k = 0; k < 2; ++k) {
      const Branch br = povm_branch(alice, reg, z1, {4}, k);
      if (!br.state) continue;
      const SentPair sp = k == 0 ? SentPair::FirstThird : SentPair::FirstSecond;
      finish(br.probability, 1, sp, *br.state);
      s.transcript.add(kAlice, "announce", std::string("1/") + to_string(sp), br.probability);
    }
  }
  s.phase = CommitPhase::Opened;
}

struct VerifyResult {
  double accept_probability;
  bool accepted;  // sampled verdict
};

/// Bob restores q1..q4 from the announced pair and projects onto the announced
/// invariant state. A bit-0 announcement must name q1 q3; anything else, or a
/// bit other than the claim, is rejected.
inline VerifyResult reveal_and_verify(const Network& net, CommitmentSession& s, int claimed_bit, Rng& rng) {
  if (s.phase != CommitPhase::Opened) throw StateError("session has not been opened");
  World world(net);
  const Party bob = world.party(kBob);
  const auto phi = phi_invariant_states();
  double accept = 0.0;
  for (const auto& o : s.opened) {
    const bool well_formed = (claimed_bit == 0 || claimed_bit == 1) && o.announced_bit == claimed_bit &&
                             !(claimed_bit == 0 && o.announced_pair != SentPair::FirstThird);
    if (!well_formed) continue;
    bob.require_holds(o.state, {0, 1, 2, 3});
    const PureState& target = claimed_bit == 0 ? phi.phi00 : phi.phi01;
    const Amplitudes placed = wire_permutation(detail::layout_order(o.announced_pair)) * target.amplitudes();
    const Povm test(4, {Operator(placed * placed.adjoint()), Operator::Identity(16, 16) - placed * placed.adjoint()},
                    {"accept", "reject"});
    accept += o.probability * outcome_distribution(o.state, test, {0, 1, 2, 3})[0];
  }
  accept = std::clamp(accept, 0.0, 1.0);
  const bool ok = uniform01(rng) < accept;
  s.transcript.add(kBob, "verify", ok ? "accept" : "reject", accept);
  s.transcript.verdict = ok ? "accept" : "reject";
  return {accept, ok};
}

}  // namespace framesim
