#include "emslab/bigint.hpp"

#include "emslab/errors.hpp"

namespace emslab {

std::string ToHex(const BigInt& value) { return value.get_str(16); }

BigInt FromHex(std::string_view text) {
  std::string_view digits = text;
  bool negative = false;
  if (!digits.empty() && digits.front() == '-') {
    negative = true;
    digits.remove_prefix(1);
  }
  if (digits.empty()) throw InvalidArgument("empty hex string");
  for (char c : digits) {
    const bool ok = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
    if (!ok) throw InvalidArgument("invalid hex digit in '" + std::string(text) + "'");
  }
  if (digits.size() > 1 && digits.front() == '0') {
    throw InvalidArgument("hex string has leading zeros: '" + std::string(text) + "'");
  }
  if (negative && digits == "0") throw InvalidArgument("negative zero in hex string");
  BigInt out(std::string(digits), 16);
  return negative ? BigInt(-out) : out;
}

BigInt Mod(const BigInt& value, const BigInt& modulus) {
  BigInt r;
  mpz_mod(r.get_mpz_t(), value.get_mpz_t(), modulus.get_mpz_t());
  return r;
}

BigInt Gcd(const BigInt& a, const BigInt& b) {
  BigInt g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

BigInt InvertMod(const BigInt& value, const BigInt& modulus) {
  const BigInt g = Gcd(value, modulus);
  if (g != 1) {
    if (g != modulus && g != 0) {
      throw NonInvertible("value shares a proper factor with the modulus", g);
    }
    throw NonInvertible("value is not invertible modulo " + ToHex(modulus));
  }
  BigInt inv;
  mpz_invert(inv.get_mpz_t(), value.get_mpz_t(), modulus.get_mpz_t());
  return inv;
}

BigInt PowMod(const BigInt& base, const BigInt& exponent, const BigInt& modulus) {
  BigInt r;
  mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exponent.get_mpz_t(), modulus.get_mpz_t());
  return r;
}

std::size_t BitLength(const BigInt& value) {
  if (value == 0) return 0;
  return mpz_sizeinbase(value.get_mpz_t(), 2);
}

BigInt Rng::Bits(std::size_t bits) {
  BigInt out = 0;
  std::size_t remaining = bits;
  while (remaining > 0) {
    const std::size_t take = remaining < 64 ? remaining : 64;
    std::uint64_t word = NextWord();
    if (take < 64) word >>= (64 - take);
    out <<= take;
    BigInt w;
    mpz_import(w.get_mpz_t(), 1, 1, sizeof(word), 0, 0, &word);
    out += w;
    remaining -= take;
  }
  return out;
}

BigInt Rng::Below(const BigInt& bound) {
  if (bound <= 0) throw InvalidArgument("Rng::Below requires a positive bound");
  const std::size_t bits = BitLength(bound);
  for (;;) {
    BigInt candidate = Bits(bits);
    if (candidate < bound) return candidate;
  }
}

BigInt Rng::Between(const BigInt& low, const BigInt& high) {
  if (high < low) throw InvalidArgument("Rng::Between with empty range");
  return low + Below(high - low + 1);
}

BigInt Rng::Unit(const BigInt& modulus) {
  if (modulus < 2) throw InvalidArgument("Rng::Unit requires modulus >= 2");
  for (;;) {
    BigInt candidate = Below(modulus);
    if (candidate != 0 && Gcd(candidate, modulus) == 1) return candidate;
  }
}

namespace {

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view label) {
  // FNV-1a over the label, mixed with the parent seed.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return SplitMix64(seed ^ SplitMix64(h));
}

}  // namespace emslab
