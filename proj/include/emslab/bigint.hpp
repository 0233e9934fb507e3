#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace emslab {

using BigInt = mpz_class;

// Lowercase big-endian hexadecimal without leading zeros; "0" for zero.
// Negative values carry a leading '-'.
std::string ToHex(const BigInt& value);

// Strict inverse of ToHex. Rejects uppercase digits, prefixes, empty
// input and redundant leading zeros.
BigInt FromHex(std::string_view text);

// Representative in [0, modulus).
BigInt Mod(const BigInt& value, const BigInt& modulus);

BigInt Gcd(const BigInt& a, const BigInt& b);

// Inverse of value modulo modulus. Throws NonInvertible, carrying the
// proper factor when the gcd with the modulus is neither 1 nor modulus.
BigInt InvertMod(const BigInt& value, const BigInt& modulus);

BigInt PowMod(const BigInt& base, const BigInt& exponent, const BigInt& modulus);

std::size_t BitLength(const BigInt& value);

// Deterministic random source. Backed by mt19937_64, whose output
// sequence is fixed by the C++ standard, so seeds replay identically
// across platforms and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextWord() { return engine_(); }

  // Uniform value with exactly `bits` random bits (top bit may be zero).
  BigInt Bits(std::size_t bits);

  // Uniform in [0, bound). bound must be positive.
  BigInt Below(const BigInt& bound);

  // Uniform in [low, high], inclusive.
  BigInt Between(const BigInt& low, const BigInt& high);

  // Uniform unit of Z_N^x.
  BigInt Unit(const BigInt& modulus);

 private:
  std::mt19937_64 engine_;
};

// Independent stream seed derived from a parent seed and a label.
std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view label);

}  // namespace emslab
