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

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "framesim/qmath.hpp"
#include "json.hpp"

namespace framesim {

using PartyId = int;
inline constexpr PartyId kAlice = 0;
inline constexpr PartyId kBob = 1;
inline constexpr PartyId kCharlie = 2;

inline std::string party_name(PartyId p) {
  static const char* const names[] = {"Alice", "Bob", "Charlie", "Dave", "Eve", "Frank"};
  if (p >= 0 && p < 6) return names[p];
  return "Party" + std::to_string(p);
}

enum class FrameRestriction { Full, ZRotationOnly };

inline const char* to_string(FrameRestriction r) { return r == FrameRestriction::Full ? "full" : "zrot"; }

inline FrameRestriction restriction_from_string(const std::string& s) {
  if (s == "full") return FrameRestriction::Full;
  if (s == "zrot") return FrameRestriction::ZRotationOnly;
  throw InputError("unknown restriction '" + s + "' (expected full or zrot)");
}

// ---------------------------------------------------------------------------
// Protocol scope. While any ProtocolScope is alive on a thread, the ground
// truth accessors of Network throw ProtocolViolation. Parties reach the
// physics only through the capability layer (World / Party).
// ---------------------------------------------------------------------------

namespace detail {
inline int& protocol_depth() {
  thread_local int depth = 0;
  return depth;
}
}  // namespace detail

class ProtocolScope {
 public:
  ProtocolScope() { ++detail::protocol_depth(); }
  ~ProtocolScope() { --detail::protocol_depth(); }
  ProtocolScope(const ProtocolScope&) = delete;
  ProtocolScope& operator=(const ProtocolScope&) = delete;
};

inline bool inside_protocol() { return detail::protocol_depth() > 0; }

namespace detail {
struct GroundTruth;
}

/// Ground truth of a communication world.
///
/// Each party k has a frame F_k: a party's coefficient vector c describes the
/// physical qubit F_k c in a hidden fiducial basis. Channels are stored as the
/// physical rotation V_{to,from} a qubit suffers in transit. The relative frame
/// R_kl = F_k F_l^dag follows, so R_kl R_lm = R_km and R_kl^dag = R_lk hold
/// identically.
class Network {
 public:
  Network(std::uint64_t seed, FrameRestriction restriction, std::vector<SU2Matrix> frames,
          std::vector<SU2Matrix> channels, bool plug_and_play = false)
      : seed_(seed),
        restriction_(restriction),
        plug_and_play_(plug_and_play),
        frames_(std::move(frames)),
        channels_(std::move(channels)) {
    const std::size_t n = frames_.size();
    if (n < 2) throw InputError("a network needs at least two parties");
    if (channels_.size() != n * n) throw InputError("channel table must be party_count^2");
    if (restriction_ == FrameRestriction::ZRotationOnly)
      for (const auto& f : frames_)
        if (!is_z_rotation(f)) throw InputError("frame is not a z-rotation under zrot restriction");
  }

  int party_count() const { return static_cast<int>(frames_.size()); }
  std::uint64_t seed() const { return seed_; }
  FrameRestriction restriction() const { return restriction_; }
  bool plug_and_play() const { return plug_and_play_; }

  void check_party(PartyId p) const {
    if (p < 0 || p >= party_count()) throw InputError("unknown party " + std::to_string(p));
  }

  /// Ground truth accessors. Unavailable inside a protocol scope.
  const SU2Matrix& frame(PartyId k) const {
    gate("frame");
    check_party(k);
    return frames_[k];
  }
  const SU2Matrix& channel(PartyId to, PartyId from) const {
    gate("channel");
    return channel_unchecked(to, from);
  }
  SU2Matrix relative_frame(PartyId k, PartyId l) const {
    gate("relative_frame");
    check_party(k);
    check_party(l);
    return frames_[k] * frames_[l].adjoint();
  }

 private:
  friend struct detail::GroundTruth;

  static void gate(const char* what) {
    if (inside_protocol())
      throw ProtocolViolation(std::string("ground truth '") + what + "' read inside a protocol");
  }

  const SU2Matrix& channel_unchecked(PartyId to, PartyId from) const {
    check_party(to);
    check_party(from);
    if (to == from) throw InputError("no channel from a party to itself");
    return channels_[static_cast<std::size_t>(to) * frames_.size() + static_cast<std::size_t>(from)];
  }

  std::uint64_t seed_;
  FrameRestriction restriction_;
  bool plug_and_play_;
  std::vector<SU2Matrix> frames_;
  std::vector<SU2Matrix> channels_;
};

namespace detail {
/// Ungated physics used by transmit and the capability layer.
struct GroundTruth {
  static const SU2Matrix& frame(const Network& net, PartyId k) {
    net.check_party(k);
    return net.frames_[k];
  }
  static const SU2Matrix& channel(const Network& net, PartyId to, PartyId from) {
    return net.channel_unchecked(to, from);
  }
  /// Map from the sender's coefficients to the receiver's coefficients for a
  /// qubit sent from -> to: F_to^dag V_{to,from} F_from.
  static SU2Matrix link(const Network& net, PartyId to, PartyId from) {
    return frame(net, to).adjoint() * channel(net, to, from) * frame(net, from);
  }
  /// Product of links along a route, later hops on the left.
  static SU2Matrix route_product(const Network& net, const std::vector<PartyId>& route) {
    SU2Matrix u;
    for (std::size_t i = 1; i < route.size(); ++i) u = link(net, route[i], route[i - 1]) * u;
    return u.renormalized();
  }
};
}  // namespace detail

/// Haar-random frames (z-rotations under ZRotationOnly) and independent
/// Haar-random channels per ordered pair. Frames are drawn first, then channels
/// in lexicographic (to, from) order. With plug_and_play, only to < from is
/// drawn and V_{from,to} = V_{to,from}^dag.
inline Network build_network(std::uint64_t seed, int party_count, FrameRestriction restriction,
                             bool plug_and_play = false) {
  if (party_count < 2) throw InputError("party_count must be at least 2");
  if (party_count > 16) throw InputError("party_count must be at most 16");
  Rng rng(seed);
  std::vector<SU2Matrix> frames;
  for (int k = 0; k < party_count; ++k)
    frames.push_back(restriction == FrameRestriction::ZRotationOnly ? random_z_rotation(rng) : haar_random_su2(rng));
  std::vector<SU2Matrix> channels(static_cast<std::size_t>(party_count * party_count));
  for (int to = 0; to < party_count; ++to)
    for (int from = 0; from < party_count; ++from) {
      if (to == from) continue;
      if (plug_and_play && to > from) continue;
      channels[to * party_count + from] = haar_random_su2(rng);
      if (plug_and_play) channels[from * party_count + to] = channels[to * party_count + from].adjoint();
    }
  return Network(seed, restriction, std::move(frames), std::move(channels), plug_and_play);
}

/// All frames and channels equal to the identity.
inline Network identity_network(int party_count) {
  std::vector<SU2Matrix> frames(party_count);
  std::vector<SU2Matrix> channels(static_cast<std::size_t>(party_count * party_count));
  return Network(0, FrameRestriction::Full, std::move(frames), std::move(channels));
}

/// Party p redefines its basis so that its coefficients transform as c -> R c.
inline Network apply_frame_change(const Network& net, PartyId p, const SU2Matrix& r) {
  net.check_party(p);
  if (net.restriction() == FrameRestriction::ZRotationOnly && !is_z_rotation(r))
    throw InputError("frame change must be a z-rotation under zrot restriction");
  std::vector<SU2Matrix> frames;
  std::vector<SU2Matrix> channels;
  for (int k = 0; k < net.party_count(); ++k) frames.push_back(detail::GroundTruth::frame(net, k));
  for (int to = 0; to < net.party_count(); ++to)
    for (int from = 0; from < net.party_count(); ++from)
      channels.push_back(to == from ? SU2Matrix() : detail::GroundTruth::channel(net, to, from));
  frames[p] = frames[p] * r.adjoint();
  return Network(net.seed(), net.restriction(), std::move(frames), std::move(channels), net.plug_and_play());
}

/// The same change presented on the channels: with R_pp = F_p R F_p^dag,
/// V_{p,k} -> R_pp V_{p,k} and V_{k,p} -> V_{k,p} R_pp^dag; frames untouched.
inline Network apply_channel_gauge(const Network& net, PartyId p, const SU2Matrix& r) {
  net.check_party(p);
  const SU2Matrix& fp = detail::GroundTruth::frame(net, p);
  const SU2Matrix rpp = fp * r * fp.adjoint();
  std::vector<SU2Matrix> frames;
  std::vector<SU2Matrix> channels;
  for (int k = 0; k < net.party_count(); ++k) frames.push_back(detail::GroundTruth::frame(net, k));
  for (int to = 0; to < net.party_count(); ++to)
    for (int from = 0; from < net.party_count(); ++from) {
      if (to == from) {
        channels.emplace_back();
        continue;
      }
      SU2Matrix v = detail::GroundTruth::channel(net, to, from);
      if (to == p) v = rpp * v;
      if (from == p) v = v * rpp.adjoint();
      channels.push_back(v);
    }
  return Network(net.seed(), net.restriction(), std::move(frames), std::move(channels), net.plug_and_play());
}

// ---------------------------------------------------------------------------
// Registers
// ---------------------------------------------------------------------------

/// A joint pure state whose wires are each held by one party. The amplitudes
/// of a wire are coefficients in its holder's basis. A register whose wires
/// all share one holder is that party's local description.
class Register {
 public:
  Register(PureState state, std::vector<PartyId> holders) : state_(std::move(state)), holders_(std::move(holders)) {
    if (static_cast<int>(holders_.size()) != state_.qubits()) throw InputError("one holder per wire required");
  }

  static Register local(PartyId owner, PureState state) {
    std::vector<PartyId> h(static_cast<std::size_t>(state.qubits()), owner);
    return Register(std::move(state), std::move(h));
  }

  const PureState& state() const { return state_; }
  int qubits() const { return state_.qubits(); }
  const std::vector<PartyId>& holders() const { return holders_; }

  PartyId holder(int wire) const {
    if (wire < 0 || wire >= qubits()) throw InputError("wire " + std::to_string(wire) + " out of range");
    return holders_[wire];
  }

  std::vector<int> wires_of(PartyId p) const {
    std::vector<int> w;
    for (int i = 0; i < qubits(); ++i)
      if (holders_[i] == p) w.push_back(i);
    return w;
  }

  /// Owner of a local description; throws if wires are spread over parties.
  PartyId owner() const {
    if (holders_.empty()) throw StateError("empty register has no owner");
    for (PartyId h : holders_)
      if (h != holders_[0]) throw StateError("register is not a local description");
    return holders_[0];
  }

  Register with_state(PureState s) const { return Register(std::move(s), holders_); }

 private:
  PureState state_;
  std::vector<PartyId> holders_;
};

inline Register tensor(const Register& a, const Register& b) {
  std::vector<PartyId> h = a.holders();
  h.insert(h.end(), b.holders().begin(), b.holders().end());
  return Register(a.state().tensor(b.state()), std::move(h));
}

/// Reorders wires: output wire k is input wire order[k].
inline Register permute(const Register& reg, const std::vector<int>& order) {
  if (static_cast<int>(order.size()) != reg.qubits()) throw InputError("permutation size mismatch");
  Operator p = wire_permutation(order);
  std::vector<PartyId> h;
  for (int w : order) h.push_back(reg.holders()[w]);
  return Register(PureState(reg.qubits(), p * reg.state().amplitudes()), std::move(h));
}

/// Applies a unitary, given in the actor's basis, to wires the actor holds.
inline Register apply_local(const Register& reg, PartyId actor, const Operator& gate, const std::vector<int>& wires) {
  for (int w : wires)
    if (reg.holder(w) != actor)
      throw ProtocolViolation(party_name(actor) + " does not hold wire " + std::to_string(w));
  if (!is_unitary(gate, 1e-10)) throw InputError("local gate is not unitary");
  Amplitudes a = apply_on_wires(gate, wires, reg.state().amplitudes(), reg.qubits());
  return reg.with_state(PureState::normalized(reg.qubits(), std::move(a)));
}

inline Register apply_local(const Register& reg, PartyId actor, const SU2Matrix& gate, int wire) {
  return apply_local(reg, actor, Operator(gate.matrix()), std::vector<int>{wire});
}

/// Sends one wire from sender to receiver through V_{receiver,sender}. The
/// wire's coefficients change by F_r^dag V_{r,s} F_s, i.e. V_{r,s} R_{s,r} in
/// the receiver's basis; other wires are untouched.
inline Register transmit(const Network& net, PartyId sender, PartyId receiver, const Register& reg, int wire) {
  net.check_party(sender);
  net.check_party(receiver);
  if (reg.holder(wire) != sender)
    throw ProtocolViolation(party_name(sender) + " cannot send wire " + std::to_string(wire) + " held by " +
                            party_name(reg.holder(wire)));
  if (sender == receiver) throw InputError("sender and receiver must differ");
  const SU2Matrix k = detail::GroundTruth::link(net, receiver, sender);
  const int wires[] = {wire};
  Amplitudes a = apply_on_wires(Operator(k.matrix()), wires, reg.state().amplitudes(), reg.qubits());
  std::vector<PartyId> h = reg.holders();
  h[wire] = receiver;
  return Register(PureState::normalized(reg.qubits(), std::move(a)), std::move(h));
}

/// Ground-truth physical amplitudes (every wire mapped to the fiducial basis).
/// Test oracle; unavailable inside a protocol scope.
inline Amplitudes fiducial_amplitudes(const Network& net, const Register& reg) {
  Operator f = Operator::Identity(1, 1);
  for (PartyId h : reg.holders()) f = kron(f, Operator(net.frame(h).matrix()));
  return f * reg.state().amplitudes();
}

// ---------------------------------------------------------------------------
// Observables
// ---------------------------------------------------------------------------

enum class ObservableKind { PrivateFrameDependent, PrivateFrameIndependent, PublicFrameIndependent };

inline const char* to_string(ObservableKind k) {
  switch (k) {
    case ObservableKind::PrivateFrameDependent: return "private-frame-dependent";
    case ObservableKind::PrivateFrameIndependent: return "private-frame-independent";
    case ObservableKind::PublicFrameIndependent: return "public-frame-independent";
  }
  return "?";
}

struct ObservableValue {
  ObservableKind kind;
  std::variant<Complex, SU2Matrix> value;
  std::optional<PartyId> owner;  // empty means every party

  Complex scalar() const {
    if (auto* c = std::get_if<Complex>(&value)) return *c;
    throw StateError("observable holds a matrix, not a scalar");
  }
  const SU2Matrix& matrix() const {
    if (auto* m = std::get_if<SU2Matrix>(&value)) return *m;
    throw StateError("observable holds a scalar, not a matrix");
  }
};

inline bool is_known_to(const Network& net, PartyId party, const ObservableValue& obs) {
  net.check_party(party);
  if (obs.kind == ObservableKind::PublicFrameIndependent) return true;
  return obs.owner.has_value() && *obs.owner == party;
}

namespace detail {
inline void check_qubit(const PureState& s) {
  if (s.qubits() != 1) throw InputError("expected a single-qubit state");
}

/// Accepts a route either closed (first == last) or as a cycle listing each
/// party once; returns the closed form.
inline std::vector<PartyId> close_route(const Network& net, std::vector<PartyId> route) {
  for (PartyId p : route) net.check_party(p);
  if (route.size() < 2) throw InputError("cycle needs at least two parties");
  if (route.front() != route.back()) route.push_back(route.front());
  for (std::size_t i = 1; i < route.size(); ++i)
    if (route[i] == route[i - 1]) throw InputError("route repeats a party on consecutive hops");
  return route;
}
}  // namespace detail

/// <phi|V_BA R_AB|psi> in B's basis: B's view of a qubit A prepared.
inline ObservableValue observable_g1(const Network& net, PartyId a, PartyId b, const PureState& phi,
                                     const PureState& psi) {
  detail::check_qubit(phi);
  detail::check_qubit(psi);
  const SU2Matrix k = detail::GroundTruth::link(net, b, a);
  Complex v = phi.amplitudes().dot(k.matrix() * psi.amplitudes());
  return {ObservableKind::PrivateFrameDependent, v, b};
}

/// <phi|V_AB U_B V_BA|psi> in A's basis: A sends, B applies U_B (in B's
/// basis), B returns the qubit.
inline ObservableValue observable_g2(const Network& net, PartyId a, PartyId b, const SU2Matrix& u_b,
                                     const PureState& phi, const PureState& psi) {
  detail::check_qubit(phi);
  detail::check_qubit(psi);
  const SU2Matrix m = detail::GroundTruth::link(net, a, b) * u_b * detail::GroundTruth::link(net, b, a);
  Complex v = phi.amplitudes().dot(m.matrix() * psi.amplitudes());
  return {ObservableKind::PrivateFrameDependent, v, a};
}

/// Ordered product of the channels around a closed route, in the base party's
/// basis. Only the base party can measure it.
inline ObservableValue loop_holonomy(const Network& net, const std::vector<PartyId>& route) {
  for (PartyId p : route) net.check_party(p);
  if (route.size() < 3) throw InputError("holonomy route needs at least two hops");
  if (route.front() != route.back()) throw InputError("holonomy route must return to its base party");
  auto closed = detail::close_route(net, route);
  return {ObservableKind::PrivateFrameIndependent, detail::GroundTruth::route_product(net, closed), route.front()};
}

/// Trace of the holonomy around a cycle; public.
inline ObservableValue wilson_trace(const Network& net, const std::vector<PartyId>& cycle) {
  auto closed = detail::close_route(net, cycle);
  return {ObservableKind::PublicFrameIndependent, detail::GroundTruth::route_product(net, closed).trace(),
          std::nullopt};
}

// ---------------------------------------------------------------------------
// Capability layer
// ---------------------------------------------------------------------------

class World;

/// What one party can do: act on wires it holds, send them, and read the
/// observables the model grants it.
class Party {
 public:
  PartyId id() const { return id_; }
  std::string name() const { return party_name(id_); }

  Register send(const Register& reg, int wire, PartyId to) const { return transmit(*net_, id_, to, reg, wire); }

  Register apply(const Register& reg, const Operator& gate, const std::vector<int>& wires) const {
    return apply_local(reg, id_, gate, wires);
  }
  Register apply(const Register& reg, const SU2Matrix& gate, int wire) const {
    return apply_local(reg, id_, gate, wire);
  }

  /// Holonomy of a closed route based at this party.
  SU2Matrix holonomy(const std::vector<PartyId>& route) const {
    if (route.empty() || route.front() != id_ || route.back() != id_)
      throw ProtocolViolation(name() + " can only measure holonomies of routes based at " + name());
    return learn(loop_holonomy(*net_, route)).matrix();
  }

  Complex wilson(const std::vector<PartyId>& cycle) const { return learn(wilson_trace(*net_, cycle)).scalar(); }

  /// Passes an observable through the knowledge gate.
  const ObservableValue& learn(const ObservableValue& obs) const {
    if (!is_known_to(*net_, id_, obs)) throw ProtocolViolation(name() + " cannot know this observable");
    return obs;
  }

  /// Checks that this party holds every listed wire.
  void require_holds(const Register& reg, const std::vector<int>& wires) const {
    for (int w : wires)
      if (reg.holder(w) != id_) throw ProtocolViolation(name() + " does not hold wire " + std::to_string(w));
  }

 private:
  friend class World;
  Party(const Network* net, PartyId id) : net_(net), id_(id) {}
  const Network* net_;
  PartyId id_;
};

/// Entry point for protocol code: holds the network and hands out party
/// capabilities. While a World exists the ground truth accessors are closed.
class World {
 public:
  explicit World(const Network& net) : net_(&net) {}
  Party party(PartyId p) const {
    net_->check_party(p);
    return Party(net_, p);
  }
  int party_count() const { return net_->party_count(); }

 private:
  ProtocolScope scope_;
  const Network* net_;
};

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline nlohmann::json matrix_to_json(const Mat2& m) {
  nlohmann::json j = nlohmann::json::array();
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) j.push_back({m(r, c).real(), m(r, c).imag()});
  return j;
}

inline SU2Matrix su2_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 4) throw InputError("matrix must be 4 row-major [re, im] pairs");
  Mat2 m;
  for (int i = 0; i < 4; ++i) {
    const auto& e = j[i];
    if (!e.is_array() || e.size() != 2) throw InputError("matrix entry must be [re, im]");
    m(i / 2, i % 2) = Complex(e[0].get<double>(), e[1].get<double>());
  }
  return SU2Matrix(m);
}

inline nlohmann::json network_to_json(const Network& net) {
  nlohmann::json j;
  j["seed"] = net.seed();
  j["restriction"] = to_string(net.restriction());
  j["party_count"] = net.party_count();
  j["plug_and_play"] = net.plug_and_play();
  nlohmann::json frames = nlohmann::json::array();
  for (int k = 0; k < net.party_count(); ++k) frames.push_back(matrix_to_json(detail::GroundTruth::frame(net, k).matrix()));
  j["frames"] = frames;
  nlohmann::json channels = nlohmann::json::array();
  for (int to = 0; to < net.party_count(); ++to)
    for (int from = 0; from < net.party_count(); ++from)
      if (to != from)
        channels.push_back({{"to", to}, {"from", from},
                            {"matrix", matrix_to_json(detail::GroundTruth::channel(net, to, from).matrix())}});
  j["channels"] = channels;
  return j;
}

/// Reads a network record. A record without matrices is rebuilt from its seed
/// (party_count defaults to 3, restriction to full).
inline Network network_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("seed")) throw InputError("network record needs a seed");
  const auto seed = j["seed"].get<std::uint64_t>();
  const int n = j.value("party_count", 3);
  const auto restriction = restriction_from_string(j.value("restriction", std::string("full")));
  const bool pnp = j.value("plug_and_play", false);
  if (!j.contains("frames")) return build_network(seed, n, restriction, pnp);
  const auto& fj = j["frames"];
  if (!fj.is_array() || static_cast<int>(fj.size()) != n) throw InputError("frames must list one matrix per party");
  std::vector<SU2Matrix> frames;
  for (const auto& f : fj) frames.push_back(su2_from_json(f));
  std::vector<SU2Matrix> channels(static_cast<std::size_t>(n * n));
  std::vector<bool> seen(static_cast<std::size_t>(n * n), false);
  for (const auto& c : j.at("channels")) {
    int to = c.at("to").get<int>(), from = c.at("from").get<int>();
    if (to < 0 || to >= n || from < 0 || from >= n || to == from) throw InputError("bad channel endpoints");
    channels[to * n + from] = su2_from_json(c.at("matrix"));
    seen[to * n + from] = true;
  }
  for (int to = 0; to < n; ++to)
    for (int from = 0; from < n; ++from)
      if (to != from && !seen[to * n + from]) throw InputError("missing channel record");
  return Network(seed, restriction, std::move(frames), std::move(channels), pnp);
}

}  // namespace framesim
