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

#include <gtest/gtest.h>

#include "framesim/frames.hpp"
#include "oracles.hpp"

using namespace framesim;

namespace {

PureState random_qubit(Rng& rng) { return PureState(1, haar_random_su2(rng).matrix().col(0)); }

Mat2 ground_link(const Network& net, PartyId to, PartyId from) {
  return net.frame(to).matrix().adjoint() * net.channel(to, from).matrix() * net.frame(from).matrix();
}

std::vector<std::vector<PartyId>> cycles_of(int n) {
  std::vector<std::vector<PartyId>> out;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      out.push_back({a, b});
      for (int c = 0; c < n; ++c)
        if (c != a && c != b) out.push_back({a, b, c});
    }
  return out;
}

}  // namespace

TEST(Network, SameSeedSameNetwork) {
  const Network a = build_network(11, 3, FrameRestriction::Full), b = build_network(11, 3, FrameRestriction::Full);
  EXPECT_EQ(network_to_json(a).dump(), network_to_json(b).dump());
  EXPECT_NE(network_to_json(a).dump(), network_to_json(build_network(12, 3, FrameRestriction::Full)).dump());
}

TEST(Network, ChannelsAreIndependentPerDirection) {
  const Network net = build_network(1, 2, FrameRestriction::Full);
  const Mat2 ab = net.channel(kAlice, kBob).matrix(), ba = net.channel(kBob, kAlice).matrix();
  EXPECT_GT(std::abs((ab * ba.adjoint()).trace() - 2.0), 1e-3);
  EXPECT_GT((ab - ba).cwiseAbs().maxCoeff(), 1e-3);
  EXPECT_GT((ab - ba.adjoint()).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(Network, PlugAndPlayChannelsAreInverse) {
  const Network net = build_network(1, 3, FrameRestriction::Full, true);
  for (PartyId a = 0; a < 3; ++a)
    for (PartyId b = 0; b < 3; ++b)
      if (a != b) {
        EXPECT_LT(distance(net.channel(a, b), net.channel(b, a).adjoint()), 1e-15);
      }
  EXPECT_NEAR(wilson_trace(net, {kAlice, kBob}).scalar().real(), 2.0, 1e-12);
}

TEST(Network, ZRotationFramesCommuteWithSigmaZ) {
  const Network net = build_network(3, 3, FrameRestriction::ZRotationOnly);
  const Mat2 z = pauli::z();
  for (PartyId k = 0; k < 3; ++k)
    for (PartyId l = 0; l < 3; ++l) {
      const Mat2 r = net.relative_frame(k, l).matrix();
      EXPECT_LT((r * z - z * r).cwiseAbs().maxCoeff(), 1e-12);
    }
  Rng rng(1);
  EXPECT_THROW(apply_frame_change(net, kAlice, haar_random_su2(rng)), InputError);
}

TEST(Network, RejectsBadConstruction) {
  EXPECT_THROW(build_network(1, 1, FrameRestriction::Full), InputError);
  EXPECT_THROW(Network(0, FrameRestriction::Full, std::vector<SU2Matrix>(3), std::vector<SU2Matrix>(4)), InputError);
  Rng rng(2);
  std::vector<SU2Matrix> frames{haar_random_su2(rng), SU2Matrix()};
  EXPECT_THROW(Network(0, FrameRestriction::ZRotationOnly, frames, std::vector<SU2Matrix>(4)), InputError);
  const Network net = build_network(1, 2, FrameRestriction::Full);
  EXPECT_THROW(net.channel(0, 0), InputError);
  EXPECT_THROW(net.frame(2), InputError);
}

TEST(RelativeFrame, Algebra) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Network net = build_network(seed, 4, FrameRestriction::Full);
    for (PartyId k = 0; k < 4; ++k) {
      EXPECT_LT(distance(net.relative_frame(k, k), SU2Matrix()), 1e-12);
      for (PartyId l = 0; l < 4; ++l) {
        EXPECT_LT(distance(net.relative_frame(k, l).adjoint(), net.relative_frame(l, k)), 1e-12);
        for (PartyId m = 0; m < 4; ++m)
          EXPECT_LT(distance(net.relative_frame(k, l) * net.relative_frame(l, m), net.relative_frame(k, m)), 1e-12);
      }
    }
  }
}

// <a_k|R_kl|b_l> = delta_ab with the physical basis vectors |a_k> = F_k e_a.
TEST(RelativeFrame, MapsBasisVectors) {
  const Network net = build_network(5, 2, FrameRestriction::Full);
  const Mat2 fa = net.frame(kAlice).matrix(), fb = net.frame(kBob).matrix();
  const Mat2 r = net.relative_frame(kAlice, kBob).matrix();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const Complex v = fa.col(a).dot(r * fb.col(b));
      EXPECT_LT(std::abs(v - (a == b ? 1.0 : 0.0)), 1e-12);
    }
}

TEST(Transmit, IdentityNetworkKeepsCoefficients) {
  const Network net = identity_network(2);
  Rng rng(3);
  const PureState psi = random_qubit(rng);
  const Register r = transmit(net, kAlice, kBob, Register::local(kAlice, psi), 0);
  EXPECT_EQ(r.holder(0), kBob);
  EXPECT_LT((r.state().amplitudes() - psi.amplitudes()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Transmit, SentSingletHalfMatchesChannelDressedForm) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Network net = build_network(seed, 3, FrameRestriction::Full);
    const Register local = Register::local(kAlice, PureState(2, oracle::singlet()));
    const Register sent = transmit(net, kAlice, kBob, local, 1);
    // I (x) V_BA R_AB in Bob's basis.
    const Mat2 k = net.frame(kBob).matrix().adjoint() * net.channel(kBob, kAlice).matrix() *
                   net.relative_frame(kAlice, kBob).matrix() * net.frame(kBob).matrix();
    const Amplitudes expect = oracle::embed(Operator(k), {1}, 2) * oracle::singlet();
    EXPECT_GT(std::abs(expect.dot(sent.state().amplitudes())), 1.0 - 1e-12);
  }
}

TEST(Transmit, PreservesPhysicalState) {
  Rng rng(4);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Network net = build_network(seed, 3, FrameRestriction::Full);
    Register reg(PureState(3, random_unitary(8, rng).col(0)), {kAlice, kBob, kAlice});
    const Amplitudes before = fiducial_amplitudes(net, reg);
    const Register after = transmit(net, kAlice, kCharlie, reg, 2);
    const Amplitudes physical = oracle::embed(Operator(net.channel(kCharlie, kAlice).matrix()), {2}, 3) * before;
    EXPECT_GT(std::abs(physical.dot(fiducial_amplitudes(net, after))), 1.0 - 1e-12);
    EXPECT_NEAR(after.state().amplitudes().norm(), 1.0, 1e-12);
  }
}

TEST(Transmit, RoundTripGivesLoopProduct) {
  Rng rng(5);
  const Network net = build_network(6, 2, FrameRestriction::Full);
  const PureState psi = random_qubit(rng);
  Register r = transmit(net, kAlice, kBob, Register::local(kAlice, psi), 0);
  r = transmit(net, kBob, kAlice, r, 0);
  const Mat2 loop = ground_link(net, kAlice, kBob) * ground_link(net, kBob, kAlice);
  EXPECT_LT((r.state().amplitudes() - loop * psi.amplitudes()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((loop - loop_holonomy(net, {kAlice, kBob, kAlice}).matrix().matrix()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Transmit, OnlyTheHolderSends) {
  const Network net = build_network(1, 3, FrameRestriction::Full);
  const Register r = Register::local(kAlice, PureState::ket("0"));
  EXPECT_THROW(transmit(net, kBob, kCharlie, r, 0), ProtocolViolation);
  EXPECT_THROW(transmit(net, kAlice, kAlice, r, 0), InputError);
  EXPECT_THROW(transmit(net, kAlice, kBob, r, 1), InputError);
}

TEST(ApplyLocal, Examples) {
  Rng rng(7);
  const Register zero = Register::local(kAlice, PureState::ket("0"));
  EXPECT_LT((apply_local(zero, kAlice, SU2Matrix(), 0).state().amplitudes() - zero.state().amplitudes()).norm(), 1e-15);
  EXPECT_EQ(apply_local(zero, kAlice, Operator(pauli::x()), {0}).state()[1], Complex(1.0));
  const Register r = Register::local(kAlice, PureState(2, random_unitary(4, rng).col(0)));
  const Operator u = random_unitary(4, rng);
  const Register back = apply_local(apply_local(r, kAlice, u, {0, 1}), kAlice, u.adjoint(), {0, 1});
  EXPECT_LT((back.state().amplitudes() - r.state().amplitudes()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW(apply_local(r, kBob, Operator(pauli::x()), {0}), ProtocolViolation);
  EXPECT_THROW(apply_local(r, kAlice, Operator(2.0 * Operator::Identity(2, 2)), {0}), InputError);
}

TEST(ObservableG1, IdentityNetworkAndDirectProduct) {
  Rng rng(8);
  const PureState phi = random_qubit(rng);
  EXPECT_NEAR(std::abs(observable_g1(identity_network(2), kAlice, kBob, phi, phi).scalar() - 1.0), 0.0, 1e-12);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Network net = build_network(seed, 3, FrameRestriction::Full);
    const PureState a = random_qubit(rng), b = random_qubit(rng);
    const Mat2 fb = net.frame(kBob).matrix();
    const Mat2 m = fb.adjoint() * net.channel(kBob, kAlice).matrix() * net.relative_frame(kAlice, kBob).matrix() * fb;
    const Complex expect = a.amplitudes().dot(m * b.amplitudes());
    const ObservableValue v = observable_g1(net, kAlice, kBob, a, b);
    EXPECT_LT(std::abs(v.scalar() - expect), 1e-12);
    EXPECT_TRUE(is_known_to(net, kBob, v));
    EXPECT_FALSE(is_known_to(net, kAlice, v));
  }
}

TEST(ObservableG1, FrameChangeCovariance) {
  Rng rng(9);
  const Network net = build_network(10, 2, FrameRestriction::Full);
  const PureState a = random_qubit(rng), b = random_qubit(rng);
  const SU2Matrix ra = haar_random_su2(rng), rb = haar_random_su2(rng);
  const Network changed = apply_frame_change(apply_frame_change(net, kAlice, ra), kBob, rb);
  // New coefficients are R c, so the value at (phi, psi) equals the old value
  // at (R_B^dag phi, R_A^dag psi).
  const PureState a_old(1, rb.matrix().adjoint() * a.amplitudes()), b_old(1, ra.matrix().adjoint() * b.amplitudes());
  EXPECT_LT(std::abs(observable_g1(changed, kAlice, kBob, a, b).scalar() -
                     observable_g1(net, kAlice, kBob, a_old, b_old).scalar()),
            1e-12);
}

TEST(ObservableG2, IdentityGateGivesHolonomyElement) {
  Rng rng(11);
  const Network net = build_network(12, 2, FrameRestriction::Full);
  const PureState a = random_qubit(rng), b = random_qubit(rng);
  const Mat2 h = ground_link(net, kAlice, kBob) * ground_link(net, kBob, kAlice);
  EXPECT_LT(std::abs(observable_g2(net, kAlice, kBob, SU2Matrix(), a, b).scalar() - a.amplitudes().dot(h * b.amplitudes())),
            1e-12);
  const SU2Matrix u = haar_random_su2(rng);
  const Mat2 m = ground_link(net, kAlice, kBob) * u.matrix() * ground_link(net, kBob, kAlice);
  const ObservableValue v = observable_g2(net, kAlice, kBob, u, a, b);
  EXPECT_LT(std::abs(v.scalar() - a.amplitudes().dot(m * b.amplitudes())), 1e-12);
  EXPECT_TRUE(is_known_to(net, kAlice, v));
  EXPECT_FALSE(is_known_to(net, kBob, v));
}

TEST(ObservableG2, FrameChangeCovariance) {
  Rng rng(13);
  const Network net = build_network(14, 2, FrameRestriction::Full);
  const PureState a = random_qubit(rng), b = random_qubit(rng);
  const SU2Matrix u = haar_random_su2(rng), ra = haar_random_su2(rng), rb = haar_random_su2(rng);
  const Network changed = apply_frame_change(apply_frame_change(net, kAlice, ra), kBob, rb);
  const PureState a_old(1, ra.matrix().adjoint() * a.amplitudes()), b_old(1, ra.matrix().adjoint() * b.amplitudes());
  // Bob's gate given in his new basis is R_B^dag U R_B in the old one.
  EXPECT_LT(std::abs(observable_g2(changed, kAlice, kBob, u, a, b).scalar() -
                     observable_g2(net, kAlice, kBob, rb.adjoint() * u * rb, a_old, b_old).scalar()),
            1e-12);
}

TEST(Holonomy, PlugAndPlayLoopIsIdentity) {
  const Network net = build_network(15, 3, FrameRestriction::Full, true);
  EXPECT_LT(distance(loop_holonomy(net, {kAlice, kBob, kAlice}).matrix(), SU2Matrix()), 1e-12);
}

TEST(Holonomy, ThreePartyLoopIsOrderedProduct) {
  const Network net = build_network(16, 3, FrameRestriction::Full);
  const Mat2 expect = ground_link(net, kAlice, kCharlie) * ground_link(net, kCharlie, kBob) * ground_link(net, kBob, kAlice);
  EXPECT_LT((loop_holonomy(net, {kAlice, kBob, kCharlie, kAlice}).matrix().matrix() - expect).cwiseAbs().maxCoeff(),
            1e-12);
}

TEST(Holonomy, NonOwnerFrameChangesLeaveItAlone) {
  Rng rng(17);
  const Network net = build_network(18, 3, FrameRestriction::Full);
  const std::vector<PartyId> route{kAlice, kBob, kCharlie, kAlice};
  const SU2Matrix h = loop_holonomy(net, route).matrix();
  Network changed = apply_frame_change(net, kBob, haar_random_su2(rng));
  changed = apply_frame_change(changed, kCharlie, haar_random_su2(rng));
  EXPECT_LT(distance(loop_holonomy(changed, route).matrix(), h), 1e-12);
  const SU2Matrix r = haar_random_su2(rng);
  const SU2Matrix conj = loop_holonomy(apply_frame_change(net, kAlice, r), route).matrix();
  EXPECT_LT(distance(conj, r * h * r.adjoint()), 1e-12);
  EXPECT_NEAR(std::abs(conj.trace() - h.trace()), 0.0, 1e-12);
}

TEST(Holonomy, RejectsOpenRoutes) {
  const Network net = build_network(1, 3, FrameRestriction::Full);
  EXPECT_THROW(loop_holonomy(net, {kAlice, kBob}), InputError);
  EXPECT_THROW(loop_holonomy(net, {kAlice, kBob, kCharlie}), InputError);
  EXPECT_THROW(loop_holonomy(net, {kAlice, kAlice, kBob, kAlice}), InputError);
}

TEST(Wilson, PlugAndPlayAndCyclicity) {
  EXPECT_NEAR(wilson_trace(build_network(1, 2, FrameRestriction::Full, true), {kAlice, kBob}).scalar().real(), 2.0, 1e-12);
  const Network net = build_network(19, 3, FrameRestriction::Full);
  EXPECT_LT(std::abs(wilson_trace(net, {kAlice, kBob}).scalar() - wilson_trace(net, {kBob, kAlice}).scalar()), 1e-12);
  EXPECT_LT(std::abs(wilson_trace(net, {kAlice, kBob, kCharlie}).scalar() -
                     wilson_trace(net, {kCharlie, kAlice, kBob}).scalar()),
            1e-12);
}

TEST(Wilson, InvariantUnderFrameChanges) {
  Rng rng(20);
  for (auto restriction : {FrameRestriction::Full, FrameRestriction::ZRotationOnly}) {
    const Network net = build_network(21, 3, restriction);
    for (int t = 0; t < 100; ++t) {
      Network changed = net;
      for (PartyId p = 0; p < 3; ++p)
        changed = apply_frame_change(changed, p, restriction == FrameRestriction::Full ? haar_random_su2(rng) : random_z_rotation(rng));
      for (const auto& c : cycles_of(3))
        EXPECT_LT(std::abs(wilson_trace(changed, c).scalar() - wilson_trace(net, c).scalar()), 1e-12);
    }
  }
}

TEST(FrameChange, IdentityLeavesNetworkUnchanged) {
  const Network net = build_network(22, 3, FrameRestriction::Full);
  EXPECT_EQ(network_to_json(apply_frame_change(net, kBob, SU2Matrix())).dump(), network_to_json(net).dump());
}

// Every observable computed after a frame change equals the same observable
// computed after the equivalent channel-side gauge map.
TEST(FrameChange, EquivalentToChannelGauge) {
  Rng rng(23);
  for (int t = 0; t < 50; ++t) {
    const Network net = build_network(100 + t, 3, FrameRestriction::Full);
    const PartyId p = t % 3;
    const SU2Matrix r = haar_random_su2(rng), u = haar_random_su2(rng);
    const Network a = apply_frame_change(net, p, r), b = apply_channel_gauge(net, p, r);
    const PureState phi = random_qubit(rng), psi = random_qubit(rng);
    for (PartyId x = 0; x < 3; ++x)
      for (PartyId y = 0; y < 3; ++y) {
        if (x == y) continue;
        EXPECT_LT(std::abs(observable_g1(a, x, y, phi, psi).scalar() - observable_g1(b, x, y, phi, psi).scalar()), 1e-12);
        EXPECT_LT(std::abs(observable_g2(a, x, y, u, phi, psi).scalar() - observable_g2(b, x, y, u, phi, psi).scalar()),
                  1e-12);
      }
    for (const auto& c : cycles_of(3)) {
      std::vector<PartyId> route = c;
      route.push_back(c.front());
      EXPECT_LT(distance(loop_holonomy(a, route).matrix(), loop_holonomy(b, route).matrix()), 1e-12);
      EXPECT_LT(std::abs(wilson_trace(a, c).scalar() - wilson_trace(b, c).scalar()), 1e-12);
    }
    // Transmitted states agree too.
    const Register reg = Register::local(kAlice, PureState(2, oracle::singlet()));
    EXPECT_LT((transmit(a, kAlice, kBob, reg, 1).state().amplitudes() - transmit(b, kAlice, kBob, reg, 1).state().amplitudes())
                  .cwiseAbs()
                  .maxCoeff(),
              1e-12);
  }
}

TEST(Knowledge, PublicAndPrivateObservables) {
  const Network net = build_network(24, 3, FrameRestriction::Full);
  for (PartyId p = 0; p < 3; ++p) EXPECT_TRUE(is_known_to(net, p, wilson_trace(net, {kAlice, kBob, kCharlie})));
  const ObservableValue h = loop_holonomy(net, {kAlice, kBob, kAlice});
  EXPECT_FALSE(is_known_to(net, kBob, h));
  EXPECT_TRUE(is_known_to(net, kAlice, h));
  EXPECT_THROW(h.scalar(), StateError);
}

TEST(Gating, GroundTruthClosedInsideProtocols) {
  const Network net = build_network(25, 3, FrameRestriction::Full);
  EXPECT_NO_THROW(net.frame(kAlice));
  {
    World world(net);
    EXPECT_TRUE(inside_protocol());
    EXPECT_THROW(net.frame(kAlice), ProtocolViolation);
    EXPECT_THROW(net.channel(kAlice, kBob), ProtocolViolation);
    EXPECT_THROW(net.relative_frame(kAlice, kBob), ProtocolViolation);
    EXPECT_THROW(fiducial_amplitudes(net, Register::local(kAlice, PureState::ket("0"))), ProtocolViolation);
    // The capability layer still works.
    const Party alice = world.party(kAlice);
    EXPECT_NO_THROW(alice.holonomy({kAlice, kBob, kAlice}));
    EXPECT_NO_THROW(alice.wilson({kBob, kCharlie}));
    EXPECT_THROW(alice.holonomy({kBob, kAlice, kBob}), ProtocolViolation);
    EXPECT_THROW(alice.learn(loop_holonomy(net, {kBob, kAlice, kBob})), ProtocolViolation);
    const Register r = alice.send(Register::local(kAlice, PureState::ket("0")), 0, kBob);
    EXPECT_THROW(alice.apply(r, SU2Matrix(), 0), ProtocolViolation);
    EXPECT_THROW(alice.send(r, 0, kCharlie), ProtocolViolation);
    EXPECT_NO_THROW(world.party(kBob).apply(r, SU2Matrix(), 0));
  }
  EXPECT_FALSE(inside_protocol());
  EXPECT_NO_THROW(net.frame(kAlice));
}

TEST(Gating, ScopeIsPerThread) {
  const Network net = build_network(26, 2, FrameRestriction::Full);
  World world(net);
  bool other_thread_open = false;
  std::thread t([&] {
    try {
      net.frame(kAlice);
      other_thread_open = true;
    } catch (const ProtocolViolation&) {
    }
  });
  t.join();
  EXPECT_TRUE(other_thread_open);
}

TEST(RegisterTest, HoldersAndOwner) {
  Register r(PureState::ket("010"), {kAlice, kBob, kAlice});
  EXPECT_EQ(r.wires_of(kAlice), (std::vector<int>{0, 2}));
  EXPECT_THROW(r.owner(), StateError);
  EXPECT_EQ(Register::local(kBob, PureState::ket("1")).owner(), kBob);
  EXPECT_THROW(Register(PureState::ket("01"), {kAlice}), InputError);
  const Register p = permute(r, {1, 0, 2});
  EXPECT_EQ(p.holders(), (std::vector<PartyId>{kBob, kAlice, kAlice}));
  EXPECT_EQ(p.state()[4], Complex(1.0));
}

TEST(Json, NetworkRoundTrip) {
  for (auto restriction : {FrameRestriction::Full, FrameRestriction::ZRotationOnly}) {
    const Network net = build_network(27, 4, restriction);
    const Network back = network_from_json(nlohmann::json::parse(network_to_json(net).dump()));
    EXPECT_EQ(back.restriction(), restriction);
    EXPECT_EQ(back.seed(), net.seed());
    for (PartyId k = 0; k < 4; ++k) {
      EXPECT_EQ(distance(back.frame(k), net.frame(k)), 0.0);
      for (PartyId l = 0; l < 4; ++l)
        if (k != l) {
          EXPECT_EQ(distance(back.channel(k, l), net.channel(k, l)), 0.0);
        }
    }
  }
  const Network seeded = network_from_json({{"seed", 27}});
  EXPECT_EQ(network_to_json(seeded).dump(), network_to_json(build_network(27, 3, FrameRestriction::Full)).dump());
  EXPECT_THROW(network_from_json({{"party_count", 3}}), InputError);
  EXPECT_THROW(network_from_json({{"seed", 1}, {"restriction", "xrot"}}), InputError);
}
