#include <gtest/gtest.h>

#include <cstdint>
#include <string>

#include "emslab/errors.hpp"
#include "emslab/protocol.hpp"
#include "oracles.hpp"

namespace emslab {
namespace {

std::uint64_t U64(const BigInt& v) { return v.get_ui(); }

// Desk-scale authority over N = 77 with mu the first non-square mod 7
// and mod 11 found by listing squares.
MasterKeys DeskKeys() {
  std::uint64_t mu = 2;
  while (oracle::LegendreBySquares(static_cast<std::int64_t>(mu), 7) != -1 ||
         oracle::LegendreBySquares(static_cast<std::int64_t>(mu), 11) != -1) {
    ++mu;
  }
  return CertifyMasterKeys(TrapdoorFactors(7, 11), BigInt(static_cast<unsigned long>(mu)));
}

TEST(SetupTest, DeterministicUnderSeed) {
  const MasterKeys a = emslab::Setup({32, 4, 99});
  const MasterKeys b = emslab::Setup({32, 4, 99});
  EXPECT_EQ(a.mpk.n(), b.mpk.n());
  EXPECT_EQ(a.mpk.mu, b.mpk.mu);
  EXPECT_EQ(a.msk.factors.p(), b.msk.factors.p());
  EXPECT_NE(emslab::Setup({32, 4, 100}).mpk.n(), a.mpk.n());
}

TEST(SetupTest, MuIsPseudoSquare) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const MasterKeys k = emslab::Setup({64, 4, seed});
    EXPECT_EQ(Jacobi(k.mpk.mu, k.mpk.n()).value(), 1);
    EXPECT_EQ(Legendre(k.mpk.mu, k.msk.factors.p()).value(), -1);
    EXPECT_EQ(k.mpk.hash_policy, kHashPolicy);
  }
}

TEST(SetupTest, SixteenBitModulus) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const MasterKeys k = emslab::Setup({16, 1, seed});
    const BigInt& n = k.mpk.n();
    EXPECT_GE(n, 1 << 15);
    EXPECT_LT(n, 1 << 16);
    EXPECT_EQ(k.mpk.modulus.bit_length(), 16u);
    const std::uint64_t p = U64(k.msk.factors.p());
    const std::uint64_t q = U64(k.msk.factors.q());
    EXPECT_TRUE(oracle::IsPrimeTrial(p));
    EXPECT_TRUE(oracle::IsPrimeTrial(q));
    EXPECT_NE(p, q);
    EXPECT_EQ(p % 4, 3u);
    EXPECT_EQ(q % 4, 3u);
  }
}

TEST(SetupTest, RejectsBadParams) {
  EXPECT_THROW(emslab::Setup({15, 4, 0}), ValidationError);
  EXPECT_THROW(emslab::Setup({64, 0, 0}), ValidationError);
}

TEST(SetupTest, CertifyRejectsSquareMu) {
  EXPECT_THROW(CertifyMasterKeys(TrapdoorFactors(7, 11), 4), InvalidArgument);
  // 2 = 3^2 mod 7.
  EXPECT_THROW(CertifyMasterKeys(TrapdoorFactors(7, 11), 2), InvalidArgument);
}

TEST(ExtractTest, RootSquaresToMuPowerTimesR) {
  const MasterKeys k = emslab::Setup({128, 4, 3});
  Rng rng(7);
  for (int i = 0; i < 20; ++i) {
    const IdentityKey key = Extract(k.msk, k.mpk, "user" + std::to_string(i), rng);
    EXPECT_EQ(key.r, HashToJacobiOne(key.id, k.mpk.modulus));
    const BigInt target = Mod(PowMod(k.mpk.mu, key.a, k.mpk.n()) * key.r, k.mpk.n());
    EXPECT_EQ(Mod(key.root * key.root, k.mpk.n()), target);
  }
}

TEST(ExtractTest, BitMatchesSquareClassificationAt77) {
  const MasterKeys k = DeskKeys();
  const auto squares = oracle::QuadraticResidues(77);
  Rng rng(1);
  for (int i = 0; i < 60; ++i) {
    const IdentityKey key = Extract(k.msk, k.mpk, "id" + std::to_string(i), rng);
    const std::uint64_t r = U64(key.r);
    EXPECT_EQ(key.a == 0, squares.count(r) == 1) << "R=" << r;
    const std::uint64_t target = key.a == 0 ? r : r * U64(k.mpk.mu) % 77;
    EXPECT_EQ(U64(key.root) * U64(key.root) % 77, target);
  }
}

TEST(OfferTest, FootnoteIdentityAndSquareS) {
  const MasterKeys k = emslab::Setup({128, 4, 11});
  Rng rng(2);
  const IdentityKey key = Extract(k.msk, k.mpk, "alice", rng);
  for (int i = 0; i < 10; ++i) {
    const OfferWithSecret o = MakeOffer(key, k.mpk, rng);
    const BigInt& n = k.mpk.n();
    const BigInt lhs = PowMod(Mod(PowMod(k.mpk.mu, o.secret.t, n) * key.root, n), 2, n);
    EXPECT_EQ(lhs, Mod(o.offer.u * key.r, n));
    EXPECT_EQ(Jacobi(o.offer.s_square, n).value(), 1);
    EXPECT_GE(o.secret.t, 1);
    EXPECT_LE(o.secret.t, n);
    EXPECT_EQ(o.secret.alpha, 2 * o.secret.t + key.a);
  }
}

TEST(OfferTest, ReplayIsIdentical) {
  const MasterKeys k = emslab::Setup({64, 4, 5});
  Rng r1(8);
  Rng r2(8);
  const IdentityKey key1 = Extract(k.msk, k.mpk, "bob", r1);
  const IdentityKey key2 = Extract(k.msk, k.mpk, "bob", r2);
  EXPECT_EQ(key1.root, key2.root);
  EXPECT_EQ(MakeOffer(key1, k.mpk, r1).offer, MakeOffer(key2, k.mpk, r2).offer);
}

TEST(OfferTest, SerializationRoundTrip) {
  const SessionOffer offer{"al\"ice\n", BigInt("123456789abcdef", 16), 0};
  const std::string text = SerializeOffer(offer);
  EXPECT_EQ(text, R"({"id":"al\"ice\n","u":"123456789abcdef","S":"0"})");
  EXPECT_EQ(ParseOffer(text), offer);
  EXPECT_THROW(ParseOffer("{}"), ValidationError);
  EXPECT_THROW(ParseOffer(R"({"id":"a","u":"0A","S":"1"})"), ValidationError);
  EXPECT_THROW(ParseOffer(R"({"id":"a","u":"1","S":"1","x":1})"), ValidationError);
  EXPECT_THROW(ParseOffer("not json"), ValidationError);
}

TEST(OfferTest, RolesAreComplementary) {
  const SessionOffer a{"a", 5, 9};
  const SessionOffer b{"b", 5, 9};
  EXPECT_NE(RoleOf(a, b), RoleOf(b, a));
  EXPECT_EQ(Orient(a, b), Orient(b, a));
  EXPECT_THROW(RoleOf(a, a), ContractViolation);
}

TEST(KeyBitTest, ZeroSymbolAndLeak) {
  const MasterKeys k = DeskKeys();
  EXPECT_THROW(KeyBit(77, k.mpk), ZeroSymbol);
  try {
    KeyBit(14, k.mpk);
    FAIL();
  } catch (const FactorLeak& e) {
    EXPECT_EQ(e.factor(), 7);
  }
  EXPECT_EQ(KeyBit(1, k.mpk), 1);
}

TEST(KeyBitTest, BitStringMapping) {
  EXPECT_EQ(BitString({1, -1, -1, 1}), "0110");
  EXPECT_EQ(ParseBitString("0110"), (std::vector<int>{1, -1, -1, 1}));
  EXPECT_THROW(BitString({0}), InvalidArgument);
  EXPECT_THROW(ParseBitString("012"), ValidationError);
}

struct Pair {
  IdentityKey key1, key2;
  OfferWithSecret o1, o2;
};

Pair MakePair(const MasterKeys& k, std::uint64_t seed) {
  Rng r1(DeriveSeed(seed, "p1"));
  Rng r2(DeriveSeed(seed, "p2"));
  Pair p;
  p.key1 = Extract(k.msk, k.mpk, "alice", r1);
  p.key2 = Extract(k.msk, k.mpk, "bob", r2);
  p.o1 = MakeOffer(p.key1, k.mpk, r1);
  p.o2 = MakeOffer(p.key2, k.mpk, r2);
  return p;
}

TEST(DeriveKeyTest, PartiesAgree) {
  for (std::size_t bits : {64u, 128u, 256u}) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const MasterKeys k = emslab::Setup({bits, 16, seed});
      const Pair p = MakePair(k, seed);
      const Role role1 = RoleOf(p.o1.offer, p.o2.offer);
      const Role role2 = RoleOf(p.o2.offer, p.o1.offer);
      const SharedKey k1 = DeriveKey(p.key1, p.o1.secret, p.o1.offer, p.o2.offer, role1, k.mpk, 16);
      const SharedKey k2 = DeriveKey(p.key2, p.o2.secret, p.o2.offer, p.o1.offer, role2, k.mpk, 16);
      ASSERT_EQ(k1.bits.size(), 16u);
      EXPECT_EQ(k1, k2) << "bits=" << bits << " seed=" << seed;
    }
  }
}

TEST(DeriveKeyTest, SingleBitAt77MatchesOracle) {
  const MasterKeys k = DeskKeys();
  const std::uint64_t n = 77;
  const std::uint64_t mu = U64(k.mpk.mu);
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const Pair p = MakePair(k, seed);
    const Role role1 = RoleOf(p.o1.offer, p.o2.offer);
    const auto& [x_side, y_side] = Orient(p.o1.offer, p.o2.offer);
    const bool p1_is_x = role1 == Role::kInitiator;
    const OfferWithSecret& xo = p1_is_x ? p.o1 : p.o2;
    const IdentityKey& xkey = p1_is_x ? p.key1 : p.key2;
    ASSERT_EQ(*x_side, xo.offer);

    // Coefficients with machine arithmetic.
    auto coeff = [&](const SessionOffer& o) {
      return U64(o.u) * U64(HashToJacobiOne(o.id, k.mpk.modulus)) % n * oracle::PowMod(U64(o.s_square), 3, n) % n;
    };
    const std::uint64_t a = coeff(*x_side);
    const std::uint64_t b = coeff(*y_side);
    const auto solutions = oracle::ConicSolutions(a, b, n);
    const QuadSolution sol = Solve(SessionEquation(*x_side, *y_side, k.mpk, 1));
    ASSERT_TRUE(solutions.count({U64(sol.x), U64(sol.y)}));

    const std::uint64_t full_root = oracle::PowMod(mu, U64(xo.secret.t), n) * U64(xkey.root) % n *
                                    oracle::PowMod(U64(xo.secret.s), 3, n) % n;
    const std::int64_t arg = static_cast<std::int64_t>((1 + U64(sol.x) * full_root) % n);
    const int expected = oracle::JacobiByFactoring(arg, n);
    const IdentityKey& ykey = p1_is_x ? p.key2 : p.key1;
    const OfferWithSecret& yo = p1_is_x ? p.o2 : p.o1;
    if (expected == 0) {
      EXPECT_THROW(DeriveKey(xkey, xo.secret, xo.offer, yo.offer, Role::kInitiator, k.mpk, 1), FactorLeak);
      continue;
    }
    EXPECT_EQ(DeriveKey(xkey, xo.secret, xo.offer, yo.offer, Role::kInitiator, k.mpk, 1).bits[0], expected);
    try {
      EXPECT_EQ(DeriveKey(ykey, yo.secret, yo.offer, xo.offer, Role::kResponder, k.mpk, 1).bits[0], expected);
      ++checked;
    } catch (const FactorLeak& e) {
      EXPECT_TRUE(e.factor() == 7 || e.factor() == 11);
    }
  }
  EXPECT_GT(checked, 20);
}

TEST(DeriveKeyTest, ContractViolations) {
  const MasterKeys k = emslab::Setup({64, 4, 1});
  const Pair p = MakePair(k, 1);
  const Role role1 = RoleOf(p.o1.offer, p.o2.offer);
  const Role wrong = role1 == Role::kInitiator ? Role::kResponder : Role::kInitiator;
  EXPECT_THROW(DeriveKey(p.key1, p.o1.secret, p.o1.offer, p.o2.offer, wrong, k.mpk, 4), ContractViolation);
  EXPECT_THROW(DeriveKey(p.key1, p.o2.secret, p.o1.offer, p.o2.offer, role1, k.mpk, 4), ContractViolation);
  EXPECT_THROW(DeriveKey(p.key2, p.o1.secret, p.o1.offer, p.o2.offer, role1, k.mpk, 4), ContractViolation);
  SessionSecret tampered = p.o1.secret;
  tampered.s += 1;
  EXPECT_THROW(DeriveKey(p.key1, tampered, p.o1.offer, p.o2.offer, role1, k.mpk, 4), ContractViolation);
}

TEST(DeriveKeyTest, TinyModuliAgreeOrLeak) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const MasterKeys k = emslab::Setup({16, 8, seed});
    const Pair p = MakePair(k, seed);
    const Role role1 = RoleOf(p.o1.offer, p.o2.offer);
    try {
      const SharedKey k1 = DeriveKey(p.key1, p.o1.secret, p.o1.offer, p.o2.offer, role1, k.mpk, 8);
      const SharedKey k2 = DeriveKey(p.key2, p.o2.secret, p.o2.offer, p.o1.offer,
                                     RoleOf(p.o2.offer, p.o1.offer), k.mpk, 8);
      EXPECT_EQ(k1, k2);
    } catch (const FactorLeak& e) {
      EXPECT_TRUE(e.factor() == k.msk.factors.p() || e.factor() == k.msk.factors.q());
    }
  }
}

}  // namespace
}  // namespace emslab
