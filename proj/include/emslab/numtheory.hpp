#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "emslab/bigint.hpp"

namespace emslab {

// Value of a Legendre or Jacobi symbol.
class JacobiValue {
 public:
  constexpr JacobiValue() = default;
  constexpr explicit JacobiValue(int value) : value_(value) {}

  constexpr int value() const { return value_; }
  constexpr bool is_zero() const { return value_ == 0; }
  friend constexpr bool operator==(JacobiValue, JacobiValue) = default;
  friend constexpr JacobiValue operator*(JacobiValue a, JacobiValue b) {
    return JacobiValue(a.value_ * b.value_);
  }

 private:
  int value_ = 1;
};

// The RSA-type modulus N = pq.
class PublicModulus {
 public:
  // Trusted constructor: checks oddness and size only.
  explicit PublicModulus(BigInt n);

  const BigInt& value() const { return n_; }
  std::size_t bit_length() const { return bit_length_; }

  friend bool operator==(const PublicModulus& a, const PublicModulus& b) { return a.n_ == b.n_; }

 private:
  BigInt n_;
  std::size_t bit_length_;
};

// Secret factorization of the modulus: distinct primes, both 3 mod 4.
class TrapdoorFactors {
 public:
  TrapdoorFactors(BigInt p, BigInt q);

  const BigInt& p() const { return p_; }
  const BigInt& q() const { return q_; }
  BigInt modulus() const { return p_ * q_; }
  PublicModulus public_modulus() const { return PublicModulus(modulus()); }

 private:
  BigInt p_;
  BigInt q_;
};

// Jacobi symbol (x / n) for odd positive n, computed without factoring n.
JacobiValue Jacobi(const BigInt& x, const BigInt& n);

// Legendre symbol for an odd prime p (same algorithm; p is trusted).
inline JacobiValue Legendre(const BigInt& x, const BigInt& p) { return Jacobi(x, p); }

// Baillie-PSW: trial division, strong probable prime to base 2, then a
// strong Lucas test with Selfridge parameters. Deterministic.
bool IsProbablePrime(const BigInt& n);

// Smaller of the two square roots of a modulo odd prime p.
// Throws NonResidue when a is not a square mod p.
BigInt SqrtModPrime(const BigInt& a, const BigInt& p);

// The four square roots of a unit square a mod N = pq, sorted ascending.
std::array<BigInt, 4> SqrtModRsaAll(const BigInt& a, const TrapdoorFactors& factors);

// selector in 0..3 indexes SqrtModRsaAll.
BigInt SqrtModRsa(const BigInt& a, const TrapdoorFactors& factors, unsigned selector);

// Identifier of the identity hash construction below.
inline constexpr std::string_view kHashPolicy = "sha256-ctr-jacobi1-v1";

// Iteration cap after which HashToJacobiOne gives up with HashFailure.
inline constexpr std::uint64_t kHashMaxAttempts = 4096;

// Deterministic map from a byte string into J(N): units of Z_N with
// Jacobi symbol +1. Attempt k hashes SHA-256(id || be64(k) || be32(j))
// for j = 0, 1, ... until bit_length(N) + 64 bits are collected, reduces
// the big-endian concatenation mod N and accepts it if it is a unit with
// symbol +1.
BigInt HashToJacobiOne(std::string_view id, const PublicModulus& modulus);

// Random mu in J(N) \ QR(N): a non-square modulo both p and q.
BigInt SampleNonResidue(const TrapdoorFactors& factors, Rng& rng);

// Random prime of exactly `bits` bits with the top two bits set and
// congruent to 3 mod 4. bits must be at least 4.
BigInt GeneratePrime3Mod4(std::size_t bits, Rng& rng);

// SHA-256 of a byte string.
std::array<std::uint8_t, 32> Sha256(std::span<const std::uint8_t> data);
std::array<std::uint8_t, 32> Sha256(std::string_view data);

}  // namespace emslab
