#include <gtest/gtest.h>

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "emslab/attacks.hpp"
#include "emslab/errors.hpp"
#include "oracles.hpp"

namespace emslab {
namespace {

std::uint64_t U64(const BigInt& v) { return v.get_ui(); }

MasterKeys DeskKeys() {
  std::uint64_t mu = 2;
  while (oracle::LegendreBySquares(static_cast<std::int64_t>(mu), 7) != -1 ||
         oracle::LegendreBySquares(static_cast<std::int64_t>(mu), 11) != -1) {
    ++mu;
  }
  return CertifyMasterKeys(TrapdoorFactors(7, 11), BigInt(static_cast<unsigned long>(mu)));
}

std::uint64_t InverseByScan(std::uint64_t v, std::uint64_t n) {
  for (std::uint64_t w = 1; w < n; ++w) {
    if (v % n * w % n == 1) return w;
  }
  return 0;
}

struct Honest {
  IdentityKey key1, key2;
  OfferWithSecret o1, o2;
  SharedKey k1, k2;
};

Honest RunHonest(const MasterKeys& k, std::uint64_t seed, std::size_t ell) {
  Rng r1(DeriveSeed(seed, "p1"));
  Rng r2(DeriveSeed(seed, "p2"));
  Honest h;
  h.key1 = Extract(k.msk, k.mpk, "alice", r1);
  h.key2 = Extract(k.msk, k.mpk, "bob", r2);
  h.o1 = MakeOffer(h.key1, k.mpk, r1);
  h.o2 = MakeOffer(h.key2, k.mpk, r2);
  h.k1 = DeriveKey(h.key1, h.o1.secret, h.o1.offer, h.o2.offer, RoleOf(h.o1.offer, h.o2.offer), k.mpk, ell);
  h.k2 = DeriveKey(h.key2, h.o2.secret, h.o2.offer, h.o1.offer, RoleOf(h.o2.offer, h.o1.offer), k.mpk, ell);
  return h;
}

TEST(ForgeTest, ProductIsSquareOfT) {
  const MasterKeys k = emslab::Setup({128, 4, 2});
  Rng rng(4);
  for (int i = 0; i < 10; ++i) {
    const ForgedOffer f = ForgeOffer("alice", k.mpk, rng);
    const BigInt& n = k.mpk.n();
    const BigInt product = Mod(f.offer.u * HashToJacobiOne("alice", k.mpk.modulus), n);
    EXPECT_EQ(product, Mod(f.t * f.t, n));
    EXPECT_EQ(Jacobi(product, n).value(), 1);
    EXPECT_EQ(f.offer.s_square, Mod(f.s * f.s, n));
    EXPECT_EQ(f.offer.id, "alice");
  }
}

TEST(ForgeTest, Deterministic) {
  const MasterKeys k = emslab::Setup({64, 4, 2});
  Rng a(9);
  Rng b(9);
  const ForgedOffer fa = ForgeOffer("alice", k.mpk, a);
  const ForgedOffer fb = ForgeOffer("alice", k.mpk, b);
  EXPECT_EQ(fa.offer, fb.offer);
  EXPECT_EQ(fa.t, fb.t);
}

TEST(ImpersonationTest, AdversaryMatchesResponderWithoutVictimKey) {
  for (std::size_t bits : {64u, 128u}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const MasterKeys k = emslab::Setup({bits, 16, seed});
      Rng adversary_rng(DeriveSeed(seed, "adversary"));
      // No identity key for "alice" exists anywhere in this test.
      const ForgedOffer forged = ForgeOffer("alice", k.mpk, adversary_rng);
      Rng r2(DeriveSeed(seed, "p2"));
      const IdentityKey key2 = Extract(k.msk, k.mpk, "bob", r2);
      const OfferWithSecret o2 = MakeOffer(key2, k.mpk, r2);
      const SharedKey responder =
          DeriveKey(key2, o2.secret, o2.offer, forged.offer, RoleOf(o2.offer, forged.offer), k.mpk, 16);
      EXPECT_EQ(AdversaryDeriveKey(forged, o2.offer, k.mpk, 16), responder) << bits << "/" << seed;
    }
  }
}

TEST(ImpersonationTest, DeskCaseMatchesOracle) {
  const MasterKeys k = DeskKeys();
  const std::uint64_t n = 77;
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng adversary_rng(DeriveSeed(seed, "adversary"));
    const ForgedOffer forged = ForgeOffer("alice", k.mpk, adversary_rng);
    Rng r2(DeriveSeed(seed, "p2"));
    const IdentityKey key2 = Extract(k.msk, k.mpk, "bob", r2);
    const OfferWithSecret o2 = MakeOffer(key2, k.mpk, r2);
    const bool forged_is_x = RoleOf(forged.offer, o2.offer) == Role::kInitiator;
    const SessionOffer& xo = forged_is_x ? forged.offer : o2.offer;
    const SessionOffer& yo = forged_is_x ? o2.offer : forged.offer;

    std::vector<int> expected;
    for (std::uint64_t i = 1; i <= 4; ++i) {
      auto coeff = [&](const SessionOffer& o) {
        return U64(o.u) * U64(HashToJacobiOne(o.id, k.mpk.modulus)) % n *
               oracle::PowMod(U64(o.s_square), 2 * i + 1, n) % n;
      };
      const auto solutions = oracle::ConicSolutions(coeff(xo), coeff(yo), n);
      const QuadSolution sol = Solve(SessionEquation(xo, yo, k.mpk, i));
      ASSERT_TRUE(solutions.count({U64(sol.x), U64(sol.y)}));
      const std::uint64_t root = U64(forged.t) * oracle::PowMod(U64(forged.s), 2 * i + 1, n) % n;
      const std::uint64_t arg = forged_is_x ? (1 + U64(sol.x) * root) % n : (2 + 2 * U64(sol.y) * root) % n;
      expected.push_back(oracle::JacobiByFactoring(static_cast<std::int64_t>(arg), n));
    }
    if (std::count(expected.begin(), expected.end(), 0) > 0) {
      EXPECT_THROW(AdversaryDeriveKey(forged, o2.offer, k.mpk, 4), FactorLeak);
      continue;
    }
    EXPECT_EQ(AdversaryDeriveKey(forged, o2.offer, k.mpk, 4).bits, expected);
    ++checked;
  }
  EXPECT_GT(checked, 5);
}

TEST(ResiliencyTest, AdjacentBitsForwardAndBack) {
  const MasterKeys k = emslab::Setup({128, 16, 5});
  const Honest h = RunHonest(k, 5, 16);
  ASSERT_EQ(h.k1, h.k2);
  const PublicSession session{h.o1.offer, h.o2.offer};
  for (std::size_t i = 1; i < 16; ++i) {
    const int next = RecoverAdjacentBit(session, i, h.k1.bits[i - 1], Direction::kForward, k.mpk);
    EXPECT_EQ(next, h.k1.bits[i]) << i;
    EXPECT_EQ(RecoverAdjacentBit(session, i + 1, next, Direction::kBackward, k.mpk), h.k1.bits[i - 1]);
  }
}

TEST(ResiliencyTest, FullKeyFromAnySingleBit) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const MasterKeys k = emslab::Setup({128, 16, seed});
    const Honest h = RunHonest(k, seed, 16);
    ASSERT_EQ(h.k1, h.k2);
    const PublicSession session{h.o2.offer, h.o1.offer};
    for (std::size_t index : {1u, 5u, 16u}) {
      EXPECT_EQ(RecoverFullKey(session, {index, h.k1.bits[index - 1]}, 16, k.mpk), h.k1) << seed << "/" << index;
    }
  }
}

TEST(ResiliencyTest, SingleBitKey) {
  const MasterKeys k = emslab::Setup({64, 1, 3});
  const Honest h = RunHonest(k, 3, 1);
  const PublicSession session{h.o1.offer, h.o2.offer};
  EXPECT_EQ(RecoverFullKey(session, {1, -1}, 1, k.mpk).bits, std::vector<int>{-1});
}

TEST(ResiliencyTest, Validation) {
  const MasterKeys k = emslab::Setup({64, 4, 3});
  const Honest h = RunHonest(k, 3, 4);
  const PublicSession session{h.o1.offer, h.o2.offer};
  EXPECT_THROW(RecoverFullKey(session, {0, 1}, 4, k.mpk), ValidationError);
  EXPECT_THROW(RecoverFullKey(session, {5, 1}, 4, k.mpk), ValidationError);
  EXPECT_THROW(RecoverFullKey(session, {2, 0}, 4, k.mpk), ValidationError);
  EXPECT_THROW(RecoverAdjacentBit(session, 1, 1, Direction::kBackward, k.mpk), ValidationError);
}

TEST(ResiliencyTest, DeskCaseFactorsMatchOracle) {
  const MasterKeys k = DeskKeys();
  const std::uint64_t n = 77;
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Rng r1(DeriveSeed(seed, "p1"));
    Rng r2(DeriveSeed(seed, "p2"));
    const IdentityKey key1 = Extract(k.msk, k.mpk, "alice", r1);
    const IdentityKey key2 = Extract(k.msk, k.mpk, "bob", r2);
    const OfferWithSecret o1 = MakeOffer(key1, k.mpk, r1);
    const OfferWithSecret o2 = MakeOffer(key2, k.mpk, r2);
    const PublicSession session{o1.offer, o2.offer};
    const auto [xo, yo] = Orient(o1.offer, o2.offer);
    const std::uint64_t hx = U64(HashToJacobiOne(xo->id, k.mpk.modulus));
    const std::uint64_t hy = U64(HashToJacobiOne(yo->id, k.mpk.modulus));
    const std::uint64_t sx = U64(xo->s_square);
    const std::uint64_t sy = U64(yo->s_square);
    const std::uint64_t i = 1;
    const std::uint64_t a1 = U64(xo->u) * hx % n * oracle::PowMod(sx, 3, n) % n;
    const std::uint64_t b1 = U64(yo->u) * hy % n * oracle::PowMod(sy, 3, n) % n;
    const std::uint64_t a2 = a1 * sx % n * sx % n;
    const std::uint64_t b2 = b1 * sy % n * sy % n;
    const QuadSolution s1 = Solve(SessionEquation(*xo, *yo, k.mpk, i));
    const QuadSolution s2 = Solve(SessionEquation(*xo, *yo, k.mpk, i + 1));
    ASSERT_TRUE(oracle::ConicSolutions(a1, b1, n).count({U64(s1.x), U64(s1.y)}));
    ASSERT_TRUE(oracle::ConicSolutions(a2, b2, n).count({U64(s2.x), U64(s2.y)}));

    const std::uint64_t shifted = sx * U64(s2.x) % n;
    const std::uint64_t denom = (1 + a1 * U64(s1.x) % n * shifted) % n;
    const std::uint64_t inv = InverseByScan(denom, n);
    if (inv == 0) {
      EXPECT_THROW(RecoverAdjacentBit(session, 1, 1, Direction::kForward, k.mpk), NonInvertible);
      continue;
    }
    const std::uint64_t x_star = (U64(s1.x) + shifted) % n * inv % n;
    const std::uint64_t y_star = U64(s1.y) * U64(s2.y) % n * inv % n;
    // (x*, y*) solves A x^2 + B1 B2 y^2 = 1.
    ASSERT_EQ((a1 * x_star % n * x_star + b1 * b2 % n * y_star % n * y_star) % n, 1u);
    const std::uint64_t b_root = U64(yo->u) * hy % n * oracle::PowMod(sy, 4, n) % n;
    const int jd = oracle::JacobiByFactoring(static_cast<std::int64_t>(denom), n);
    const std::uint64_t e_arg = (2 + 2 * y_star * b_root) % n;
    const int je = oracle::JacobiByFactoring(static_cast<std::int64_t>(e_arg), n);
    if (e_arg == 0) {
      EXPECT_THROW(RecoverAdjacentBit(session, 1, 1, Direction::kForward, k.mpk), ZeroSymbol);
      continue;
    }
    if (je == 0) {
      EXPECT_THROW(RecoverAdjacentBit(session, 1, 1, Direction::kForward, k.mpk), FactorLeak);
      continue;
    }
    EXPECT_EQ(RecoverAdjacentBit(session, 1, 1, Direction::kForward, k.mpk), jd * je);
    EXPECT_EQ(RecoverAdjacentBit(session, 1, -1, Direction::kForward, k.mpk), -jd * je);
    ++checked;
  }
  EXPECT_GT(checked, 10);
}

}  // namespace
}  // namespace emslab
