#include "emslab/quadsolver.hpp"

#include <algorithm>
#include <cstdlib>
#include <optional>
#include <tuple>

#include "emslab/errors.hpp"
#include "emslab/lattice.hpp"

namespace emslab {

namespace {

// Holzer's bound puts a zero with |x| <= sqrt(S), |y| <= sqrt(R),
// |z| <= sqrt(RS) on some sign variant inside the lattice, so its norm is
// at most 3RS. The retries only guard against a broken invariant.
constexpr int kBoundWidenings = 4;

TernarySolution Normalize(const Vec3& v) {
  BigInt g = Gcd(Gcd(v[0], v[1]), v[2]);
  TernarySolution t{abs(v[0]) / g, -(abs(v[1]) / g), abs(v[2]) / g};
  return t;
}

auto Key(const TernarySolution& t) { return std::tie(t.x, t.y, t.z); }

}  // namespace

QuadEquation::QuadEquation(BigInt r, BigInt s, const PublicModulus& modulus)
    : QuadEquation(std::move(r), std::move(s), modulus.value()) {}

QuadEquation::QuadEquation(BigInt r, BigInt s, BigInt modulus) : n_(std::move(modulus)) {
  if (n_ < 3 || mpz_even_p(n_.get_mpz_t())) throw InvalidArgument("equation modulus must be odd and >= 3");
  r_ = Mod(r, n_);
  s_ = Mod(s, n_);
  if (Gcd(r_, n_) != 1 || Gcd(s_, n_) != 1) {
    throw InvalidArgument("equation coefficients must be units mod N");
  }
}

LiftedForm LiftToPrimes(const QuadEquation& eq, std::uint64_t max_index) {
  const BigInt& n = eq.n();
  LiftedForm form;

  bool found = false;
  BigInt candidate = eq.r();
  for (std::uint64_t a = 0; a <= max_index; ++a, candidate += n) {
    if (mpz_fdiv_ui(candidate.get_mpz_t(), 4) != 1) continue;
    if (!IsProbablePrime(candidate)) continue;
    form.r_prime = candidate;
    form.r_index = a;
    found = true;
    break;
  }
  if (!found) throw SearchExhausted("no prime lift of R within the index bound");

  found = false;
  candidate = eq.s();
  for (std::uint64_t b = 0; b <= max_index; ++b, candidate += n) {
    if (mpz_even_p(candidate.get_mpz_t()) || candidate < 3) continue;
    if (!IsProbablePrime(candidate)) continue;
    if (Legendre(form.r_prime, candidate).value() != 1) continue;
    form.s_prime = candidate;
    form.s_index = b;
    found = true;
    break;
  }
  if (!found) throw SearchExhausted("no prime lift of S within the index bound");

  // r_prime = 1 mod 4, so reciprocity makes s_prime a square mod r_prime.
  form.r_root = SqrtModPrime(form.r_prime, form.s_prime);
  form.s_root = SqrtModPrime(form.s_prime, form.r_prime);
  return form;
}

TernarySolution SolveTernary(const LiftedForm& form) {
  const BigInt& rp = form.r_prime;
  const BigInt& sp = form.s_prime;
  if (rp <= 0 || sp <= 0) throw InvalidArgument("ternary coefficients must be positive");
  if (Mod(form.r_root * form.r_root - rp, sp) != 0 || Mod(form.s_root * form.s_root - sp, rp) != 0) {
    throw InvalidArgument("lifted roots do not satisfy the residuosity conditions");
  }

  Basis3 basis;
  if (rp == sp) {
    // Both congruences collapse to z = 0 (mod p).
    basis = {Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, rp}};
  } else {
    if (Gcd(rp, sp) != 1) throw InvalidArgument("ternary coefficients must be coprime");
    const BigInt modulus = rp * sp;
    const BigInt c1 = Mod(form.r_root * rp * InvertMod(rp, sp), modulus);
    const BigInt c2 = Mod(form.s_root * sp * InvertMod(sp, rp), modulus);
    basis = {Vec3{1, 0, c1}, Vec3{0, 1, c2}, Vec3{0, 0, modulus}};
  }
  const Vec3 weights{rp, sp, 1};
  basis = LllReduce(basis, weights);

  auto is_zero_of_form = [&](const Vec3& v) { return rp * v[0] * v[0] + sp * v[1] * v[1] == v[2] * v[2]; };

  BigInt bound = 3 * rp * sp;
  for (int attempt = 0; attempt <= kBoundWidenings; ++attempt, bound *= 4) {
    std::optional<std::pair<BigInt, TernarySolution>> best;
    auto consider = [&](const Vec3& v, const BigInt& norm) {
      if (!is_zero_of_form(v)) return;
      TernarySolution t = Normalize(v);
      if (!best || norm < best->first || (norm == best->first && Key(t) < Key(best->second))) {
        best.emplace(norm, std::move(t));
      }
    };
    BigInt search_bound = bound;
    for (const Vec3& b : basis) {
      const BigInt norm = WeightedNorm(b, weights);
      if (norm <= search_bound && is_zero_of_form(b)) search_bound = norm;
    }
    EnumerateShortVectors(basis, weights, search_bound, [&](const Vec3& v, const BigInt& norm) {
      consider(v, norm);
      if (best && best->first < search_bound) search_bound = best->first;
    });
    if (best) return best->second;
  }
  throw SolveFailure("no zero of the ternary form in the reduced lattice");
}

namespace {

constexpr int kMaxConicDirections = 256;

// Affine points (b, a, 1) ordered by max(|b|, |a|), then lexicographically.
std::vector<std::pair<long, long>> ConicDirections() {
  std::vector<std::pair<long, long>> out{{0, 0}};
  for (long radius = 1; static_cast<int>(out.size()) < kMaxConicDirections; ++radius) {
    for (long b = -radius; b <= radius; ++b) {
      for (long a = -radius; a <= radius; ++a) {
        if (std::max(std::labs(b), std::labs(a)) == radius) out.emplace_back(b, a);
      }
    }
  }
  out.resize(kMaxConicDirections);
  return out;
}

// Second intersection of the form with the line through `base` and
// (b, a, 1). Lines through a point at infinity mod p would stay there,
// hence the affine third coordinate. nullopt for a degenerate line.
std::optional<TernarySolution> ConicStep(const LiftedForm& form, const TernarySolution& base, long b, long a) {
  const BigInt q_norm = form.r_prime * b * b + form.s_prime * a * a - 1;
  const BigInt cross = form.r_prime * base.x * b + form.s_prime * base.y * a - base.z;
  Vec3 v{base.x * q_norm - 2 * cross * b, base.y * q_norm - 2 * cross * a, base.z * q_norm - 2 * cross};
  if (v[0] == 0 && v[1] == 0 && v[2] == 0) return std::nullopt;
  return Normalize(v);
}

template <typename OnReject>
QuadSolution SolveWithFallback(const QuadEquation& eq, OnReject&& on_reject) {
  const BigInt& n = eq.n();
  const LiftedForm form = LiftToPrimes(eq);
  const TernarySolution canonical = SolveTernary(form);
  auto to_solution = [&](const TernarySolution& t) -> std::optional<QuadSolution> {
    const BigInt g = Gcd(t.z, n);
    if (g != 1) {
      on_reject(g);
      return std::nullopt;
    }
    const BigInt z_inv = InvertMod(t.z, n);
    return QuadSolution{Mod(t.x * z_inv, n), Mod(t.y * z_inv, n)};
  };
  if (auto sol = to_solution(canonical)) return *sol;
  static const std::vector<std::pair<long, long>> directions = ConicDirections();
  for (const auto& [b, a] : directions) {
    const auto next = ConicStep(form, canonical, b, a);
    if (!next) continue;
    if (auto sol = to_solution(*next)) return *sol;
  }
  throw SolveFailure("no conic point with z invertible mod N");
}

}  // namespace

QuadSolution Solve(const QuadEquation& eq) {
  const BigInt& n = eq.n();
  return SolveWithFallback(eq, [&](const BigInt& g) {
    if (g != n) throw FactorLeak("ternary solution z shares a factor with N", g);
  });
}

SolveOutcome SolveReportingLeaks(const QuadEquation& eq) {
  SolveOutcome outcome;
  outcome.solution = SolveWithFallback(eq, [&](const BigInt& g) {
    if (g != eq.n()) outcome.leaked_factors.push_back(g);
    ++outcome.rejected_candidates;
  });
  return outcome;
}

QuadSolution Compose(const BigInt& a, const QuadSolution& first, const QuadSolution& second,
                     const PublicModulus& modulus) {
  const BigInt& n = modulus.value();
  const BigInt denom = Mod(1 + a * first.x * second.x, n);
  const BigInt inv = InvertMod(denom, n);
  return QuadSolution{Mod((first.x + second.x) * inv, n), Mod(first.y * second.y * inv, n)};
}

std::vector<QuadSolution> BruteForceSolve(const QuadEquation& eq, std::uint64_t cap) {
  if (eq.n() > cap) throw BoundExceeded("modulus " + eq.n().get_str() + " exceeds brute-force cap");
  const std::uint64_t n = eq.n().get_ui();
  const std::uint64_t r = eq.r().get_ui();
  const std::uint64_t s = eq.s().get_ui();
  std::vector<std::uint64_t> sq(n);
  for (std::uint64_t v = 0; v < n; ++v) sq[v] = v * v % n;
  std::vector<QuadSolution> out;
  for (std::uint64_t x = 0; x < n; ++x) {
    const std::uint64_t lhs = r * sq[x] % n;
    for (std::uint64_t y = 0; y < n; ++y) {
      if ((lhs + s * sq[y]) % n == 1 % n) {
        out.push_back(QuadSolution{BigInt(static_cast<unsigned long>(x)),
                                   BigInt(static_cast<unsigned long>(y))});
      }
    }
  }
  return out;
}

bool Verify(const QuadEquation& eq, const QuadSolution& sol) {
  return Mod(eq.r() * sol.x * sol.x + eq.s() * sol.y * sol.y - 1, eq.n()) == 0;
}

}  // namespace emslab
