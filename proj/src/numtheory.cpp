#include "emslab/numtheory.hpp"

#include <algorithm>
#include <vector>

#include <openssl/evp.h>

#include "emslab/errors.hpp"

namespace emslab {

namespace {

const std::vector<unsigned long>& SmallPrimes() {
  static const std::vector<unsigned long> primes = [] {
    constexpr unsigned long kLimit = 2000;
    std::vector<bool> composite(kLimit + 1, false);
    std::vector<unsigned long> out;
    for (unsigned long i = 2; i <= kLimit; ++i) {
      if (composite[i]) continue;
      out.push_back(i);
      for (unsigned long j = i * i; j <= kLimit; j += i) composite[j] = true;
    }
    return out;
  }();
  return primes;
}

// x / 2 mod odd n, for x in [0, n).
BigInt HalfMod(BigInt x, const BigInt& n) {
  if (mpz_odd_p(x.get_mpz_t())) x += n;
  mpz_fdiv_q_2exp(x.get_mpz_t(), x.get_mpz_t(), 1);
  return x;
}

bool StrongProbablePrimeBase2(const BigInt& n) {
  const BigInt n_minus_1 = n - 1;
  BigInt d = n_minus_1;
  const mp_bitcnt_t s = mpz_scan1(d.get_mpz_t(), 0);
  mpz_fdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);
  BigInt x = PowMod(2, d, n);
  if (x == 1 || x == n_minus_1) return true;
  for (mp_bitcnt_t r = 1; r < s; ++r) {
    x = Mod(x * x, n);
    if (x == n_minus_1) return true;
    if (x == 1) return false;
  }
  return false;
}

// Strong Lucas probable prime test with Selfridge's method A parameters.
// n is odd, not a perfect square and has no small factors.
bool StrongLucasProbablePrime(const BigInt& n) {
  long d_param = 5;
  for (;;) {
    const JacobiValue j = Jacobi(BigInt(d_param), n);
    if (j.value() == -1) break;
    if (j.value() == 0) {
      BigInt abs_d = d_param < 0 ? -d_param : d_param;
      if (abs_d != n) return false;
    }
    d_param = d_param > 0 ? -(d_param + 2) : -(d_param - 2);
  }
  const BigInt disc = Mod(BigInt(d_param), n);
  const BigInt p_param = 1;
  const BigInt q_param = Mod(BigInt((1 - d_param) / 4), n);

  BigInt k = n + 1;
  const mp_bitcnt_t s = mpz_scan1(k.get_mpz_t(), 0);
  mpz_fdiv_q_2exp(k.get_mpz_t(), k.get_mpz_t(), s);

  BigInt u = 1;
  BigInt v = p_param;
  BigInt qk = q_param;
  const std::size_t bits = BitLength(k);
  for (std::size_t idx = bits - 1; idx-- > 0;) {
    u = Mod(u * v, n);
    v = Mod(v * v - 2 * qk, n);
    qk = Mod(qk * qk, n);
    if (mpz_tstbit(k.get_mpz_t(), idx)) {
      BigInt u_next = HalfMod(Mod(p_param * u + v, n), n);
      BigInt v_next = HalfMod(Mod(disc * u + p_param * v, n), n);
      u = std::move(u_next);
      v = std::move(v_next);
      qk = Mod(qk * q_param, n);
    }
  }
  if (u == 0 || v == 0) return true;
  for (mp_bitcnt_t r = 1; r < s; ++r) {
    v = Mod(v * v - 2 * qk, n);
    qk = Mod(qk * qk, n);
    if (v == 0) return true;
  }
  return false;
}

}  // namespace

PublicModulus::PublicModulus(BigInt n) : n_(std::move(n)), bit_length_(BitLength(n_)) {
  if (n_ < 15) throw InvalidArgument("modulus must be at least 15");
  if (mpz_even_p(n_.get_mpz_t())) throw InvalidArgument("modulus must be odd");
}

TrapdoorFactors::TrapdoorFactors(BigInt p, BigInt q) : p_(std::move(p)), q_(std::move(q)) {
  if (p_ == q_) throw InvalidArgument("trapdoor factors must be distinct");
  for (const BigInt* f : {&p_, &q_}) {
    if (!IsProbablePrime(*f)) throw InvalidArgument("trapdoor factor " + ToHex(*f) + " is not prime");
    if (mpz_fdiv_ui(f->get_mpz_t(), 4) != 3) {
      throw InvalidArgument("trapdoor factor " + ToHex(*f) + " is not 3 mod 4");
    }
  }
}

JacobiValue Jacobi(const BigInt& x, const BigInt& n) {
  if (n <= 0 || mpz_even_p(n.get_mpz_t())) {
    throw InvalidArgument("Jacobi symbol needs an odd positive modulus");
  }
  BigInt a = Mod(x, n);
  BigInt m = n;
  int result = 1;
  while (a != 0) {
    const mp_bitcnt_t twos = mpz_scan1(a.get_mpz_t(), 0);
    mpz_fdiv_q_2exp(a.get_mpz_t(), a.get_mpz_t(), twos);
    if (twos & 1) {
      const unsigned long m8 = mpz_fdiv_ui(m.get_mpz_t(), 8);
      if (m8 == 3 || m8 == 5) result = -result;
    }
    // Reciprocity for two odd positive values.
    if (mpz_fdiv_ui(a.get_mpz_t(), 4) == 3 && mpz_fdiv_ui(m.get_mpz_t(), 4) == 3) result = -result;
    std::swap(a, m);
    a = Mod(a, m);
  }
  return JacobiValue(m == 1 ? result : 0);
}

bool IsProbablePrime(const BigInt& n) {
  if (n < 2) return false;
  for (unsigned long p : SmallPrimes()) {
    if (n == p) return true;
    if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return false;
  }
  const unsigned long limit = SmallPrimes().back();
  if (n < BigInt(limit) * limit) return true;
  if (!StrongProbablePrimeBase2(n)) return false;
  if (mpz_perfect_square_p(n.get_mpz_t())) return false;
  return StrongLucasProbablePrime(n);
}

BigInt SqrtModPrime(const BigInt& a, const BigInt& p) {
  if (p < 3 || mpz_even_p(p.get_mpz_t())) throw InvalidArgument("SqrtModPrime needs an odd prime");
  const BigInt residue = Mod(a, p);
  if (residue == 0) return 0;
  if (Legendre(residue, p).value() != 1) {
    throw NonResidue(ToHex(residue) + " is not a square modulo " + ToHex(p));
  }
  BigInt root;
  if (mpz_fdiv_ui(p.get_mpz_t(), 4) == 3) {
    root = PowMod(residue, (p + 1) / 4, p);
  } else {
    // Tonelli-Shanks with the smallest non-residue as generator.
    BigInt q = p - 1;
    const mp_bitcnt_t s = mpz_scan1(q.get_mpz_t(), 0);
    mpz_fdiv_q_2exp(q.get_mpz_t(), q.get_mpz_t(), s);
    BigInt z = 2;
    while (Legendre(z, p).value() != -1) ++z;
    BigInt c = PowMod(z, q, p);
    BigInt t = PowMod(residue, q, p);
    root = PowMod(residue, (q + 1) / 2, p);
    mp_bitcnt_t m = s;
    while (t != 1) {
      mp_bitcnt_t i = 0;
      BigInt t2 = t;
      while (t2 != 1) {
        t2 = Mod(t2 * t2, p);
        ++i;
      }
      BigInt b = c;
      for (mp_bitcnt_t k = 0; k + i + 1 < m; ++k) b = Mod(b * b, p);
      m = i;
      c = Mod(b * b, p);
      t = Mod(t * c, p);
      root = Mod(root * b, p);
    }
  }
  const BigInt other = p - root;
  return other < root ? other : root;
}

std::array<BigInt, 4> SqrtModRsaAll(const BigInt& a, const TrapdoorFactors& factors) {
  const BigInt& p = factors.p();
  const BigInt& q = factors.q();
  const BigInt n = factors.modulus();
  const BigInt residue = Mod(a, n);
  if (Gcd(residue, n) != 1) throw InvalidArgument("SqrtModRsa needs a unit of Z_N");
  const BigInt rp = SqrtModPrime(residue, p);
  const BigInt rq = SqrtModPrime(residue, q);
  const BigInt cp = q * InvertMod(q, p);  // 1 mod p, 0 mod q
  const BigInt cq = p * InvertMod(p, q);  // 0 mod p, 1 mod q
  std::array<BigInt, 4> roots;
  std::size_t k = 0;
  for (const BigInt& sp : {rp, BigInt(p - rp)}) {
    for (const BigInt& sq : {rq, BigInt(q - rq)}) roots[k++] = Mod(sp * cp + sq * cq, n);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

BigInt SqrtModRsa(const BigInt& a, const TrapdoorFactors& factors, unsigned selector) {
  if (selector > 3) throw InvalidArgument("root selector must be in 0..3");
  return SqrtModRsaAll(a, factors)[selector];
}

std::array<std::uint8_t, 32> Sha256(std::span<const std::uint8_t> data) {
  std::array<std::uint8_t, 32> out{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
      len != out.size()) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  return out;
}

std::array<std::uint8_t, 32> Sha256(std::string_view data) {
  return Sha256(std::span(reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

BigInt HashToJacobiOne(std::string_view id, const PublicModulus& modulus) {
  const BigInt& n = modulus.value();
  const std::size_t wanted_bits = modulus.bit_length() + 64;
  const std::size_t blocks = (wanted_bits + 255) / 256;
  std::vector<std::uint8_t> message(id.begin(), id.end());
  const std::size_t prefix = message.size();
  message.resize(prefix + 12);
  std::vector<std::uint8_t> stream(blocks * 32);
  for (std::uint64_t counter = 0; counter < kHashMaxAttempts; ++counter) {
    for (int b = 0; b < 8; ++b) message[prefix + b] = static_cast<std::uint8_t>(counter >> (56 - 8 * b));
    for (std::size_t j = 0; j < blocks; ++j) {
      for (int b = 0; b < 4; ++b) {
        message[prefix + 8 + b] = static_cast<std::uint8_t>(j >> (24 - 8 * b));
      }
      const auto digest = Sha256(message);
      std::copy(digest.begin(), digest.end(), stream.begin() + static_cast<std::ptrdiff_t>(j * 32));
    }
    BigInt value;
    mpz_import(value.get_mpz_t(), stream.size(), 1, 1, 1, 0, stream.data());
    value = Mod(value, n);
    if (value != 0 && Gcd(value, n) == 1 && Jacobi(value, n).value() == 1) return value;
  }
  throw HashFailure("no Jacobi-one hash value within the attempt cap");
}

BigInt SampleNonResidue(const TrapdoorFactors& factors, Rng& rng) {
  const BigInt n = factors.modulus();
  for (;;) {
    BigInt mu = rng.Between(2, n - 1);
    if (Legendre(mu, factors.p()).value() == -1 && Legendre(mu, factors.q()).value() == -1) {
      return mu;
    }
  }
}

BigInt GeneratePrime3Mod4(std::size_t bits, Rng& rng) {
  if (bits < 5) throw InvalidArgument("prime size must be at least 5 bits");
  for (;;) {
    BigInt candidate = rng.Bits(bits);
    mpz_setbit(candidate.get_mpz_t(), bits - 1);
    mpz_setbit(candidate.get_mpz_t(), bits - 2);
    mpz_setbit(candidate.get_mpz_t(), 1);
    mpz_setbit(candidate.get_mpz_t(), 0);
    while (BitLength(candidate) == bits) {
      if (IsProbablePrime(candidate)) return candidate;
      candidate += 4;
    }
  }
}

}  // namespace emslab
