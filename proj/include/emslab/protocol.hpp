#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "emslab/bigint.hpp"
#include "emslab/numtheory.hpp"
#include "emslab/quadsolver.hpp"

namespace emslab {

struct SetupParams {
  std::size_t modulus_bits = 0;
  std::size_t ell = 0;
  std::uint64_t seed = 0;
};

// ValidationError unless modulus_bits >= 16 and ell >= 1.
void Validate(const SetupParams& params);

struct MasterPublicKey {
  PublicModulus modulus;
  BigInt mu;
  std::string hash_policy;

  const BigInt& n() const { return modulus.value(); }
};

struct MasterSecretKey {
  TrapdoorFactors factors;
};

struct MasterKeys {
  MasterPublicKey mpk;
  MasterSecretKey msk;
};

// Pairs a factorization with mu after checking mu is a non-square modulo
// both primes. InvalidArgument otherwise.
MasterKeys CertifyMasterKeys(const TrapdoorFactors& factors, const BigInt& mu);

// Primes of ceil(bits/2) and floor(bits/2) bits, so N has exactly
// modulus_bits bits.
MasterKeys Setup(const SetupParams& params);

struct IdentityKey {
  std::string id;
  BigInt r;       // H(id)
  unsigned a = 0;
  BigInt root;    // root^2 = mu^a r (mod N)
};

IdentityKey Extract(const MasterSecretKey& msk, const MasterPublicKey& mpk, std::string_view id, Rng& rng);

struct SessionSecret {
  BigInt alpha;  // 2t + a
  BigInt t;
  BigInt s;
};

struct SessionOffer {
  std::string id;
  BigInt u;         // mu^alpha
  BigInt s_square;  // s^2
  friend bool operator==(const SessionOffer&, const SessionOffer&) = default;
};

struct OfferWithSecret {
  SessionOffer offer;
  SessionSecret secret;
};

// t uniform in [1, N], s a uniform unit.
OfferWithSecret MakeOffer(const IdentityKey& key, const MasterPublicKey& mpk, Rng& rng);

// {"id":...,"u":...,"S":...} with hex integers, keys in that order.
std::string SerializeOffer(const SessionOffer& offer);
// ValidationError on malformed input.
SessionOffer ParseOffer(std::string_view text);

// The initiator supplies the x-side coefficient of every equation.
enum class Role { kInitiator, kResponder };

std::string_view RoleName(Role role);

// Initiator is the offer whose serialized form has the smaller SHA-256.
// ContractViolation when the two offers serialize identically.
Role RoleOf(const SessionOffer& own, const SessionOffer& peer);

// (x-side offer, y-side offer) for the pair, in either argument order.
std::pair<const SessionOffer*, const SessionOffer*> Orient(const SessionOffer& a, const SessionOffer& b);

// u H(id) S^(2i+1) for an offer.
BigInt OfferCoefficient(const SessionOffer& offer, const MasterPublicKey& mpk, std::size_t i);

// The equation solved for bit i (1-based) of a session.
QuadEquation SessionEquation(const SessionOffer& x_side, const SessionOffer& y_side, const MasterPublicKey& mpk,
                             std::size_t i);

// Jacobi symbol of value mod N as +1 or -1. FactorLeak when value shares
// a proper factor with N, ZeroSymbol when it is 0 mod N.
int KeyBit(const BigInt& value, const MasterPublicKey& mpk);

// Bits kept as +1 / -1.
struct SharedKey {
  std::vector<int> bits;
  friend bool operator==(const SharedKey&, const SharedKey&) = default;
};

// +1 -> '0', -1 -> '1'.
std::string BitString(const std::vector<int>& bits);
std::vector<int> ParseBitString(std::string_view text);

// Bits k_1..k_ell. ContractViolation when the secret does not produce
// own_offer from key or when role disagrees with RoleOf.
SharedKey DeriveKey(const IdentityKey& key, const SessionSecret& secret, const SessionOffer& own_offer,
                    const SessionOffer& peer_offer, Role role, const MasterPublicKey& mpk, std::size_t ell);

}  // namespace emslab
