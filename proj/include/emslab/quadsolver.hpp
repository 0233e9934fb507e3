#pragma once

#include <cstdint>
#include <vector>

#include "emslab/bigint.hpp"
#include "emslab/numtheory.hpp"

namespace emslab {

// R x^2 + S y^2 = 1 (mod N) with R, S units of Z_N.
class QuadEquation {
 public:
  // Coefficients are reduced mod N. Throws InvalidArgument when either
  // shares a factor with N.
  QuadEquation(BigInt r, BigInt s, const PublicModulus& modulus);

  // Any odd modulus >= 3; used for oracle-scale checks below the
  // PublicModulus floor.
  QuadEquation(BigInt r, BigInt s, BigInt modulus);

  const BigInt& r() const { return r_; }
  const BigInt& s() const { return s_; }
  const BigInt& n() const { return n_; }

 private:
  BigInt r_;
  BigInt s_;
  BigInt n_;
};

// Integer primes lifted from (R, S) together with the mutual square
// roots that make the ternary form isotropic over the integers.
struct LiftedForm {
  BigInt r_prime;      // R + r_index * N, prime, 1 mod 4
  BigInt s_prime;      // S + s_index * N, prime, (r_prime / s_prime) = +1
  BigInt r_root;       // r_root^2 = r_prime (mod s_prime)
  BigInt s_root;       // s_root^2 = s_prime (mod r_prime)
  std::uint64_t r_index = 0;
  std::uint64_t s_index = 0;
};

// Primitive integer zero of r_prime x^2 + s_prime y^2 - z^2.
struct TernarySolution {
  BigInt x;
  BigInt y;
  BigInt z;
  friend bool operator==(const TernarySolution&, const TernarySolution&) = default;
};

struct QuadSolution {
  BigInt x;
  BigInt y;
  friend bool operator==(const QuadSolution&, const QuadSolution&) = default;
  friend auto operator<=>(const QuadSolution& a, const QuadSolution& b) {
    if (auto c = cmp(a.x, b.x); c != 0) return c <=> 0;
    return cmp(a.y, b.y) <=> 0;
  }
};

inline constexpr std::uint64_t kDefaultLiftBound = std::uint64_t{1} << 22;
inline constexpr std::uint64_t kDefaultBruteForceCap = 10000;

// Smallest r_index, then smallest s_index, satisfying the LiftedForm
// conditions. Throws SearchExhausted past `max_index`.
LiftedForm LiftToPrimes(const QuadEquation& eq, std::uint64_t max_index = kDefaultLiftBound);

// Canonical zero of the ternary form: among lattice vectors of
//   {(x, y, z) : z = r_root x (mod s_prime), z = s_root y (mod r_prime)}
// that are zeros of the form, the one with the least positive-definite
// norm r_prime x^2 + s_prime y^2 + z^2, ties broken by the normalized
// triple. The triple is divided by its content and normalized to z > 0,
// x >= 0, y <= 0.
TernarySolution SolveTernary(const LiftedForm& form);

// Deterministic solution of the equation mod N, taken from the canonical
// ternary zero. When that zero has z = 0 (mod N) the next zero along the
// conic is used (see SolveReportingLeaks). FactorLeak when a candidate z
// shares a proper factor with N.
QuadSolution Solve(const QuadEquation& eq);

struct SolveOutcome {
  QuadSolution solution;
  // Proper factors of N exposed by rejected candidates, in order.
  std::vector<BigInt> leaked_factors;
  // Number of candidates rejected before the returned one.
  unsigned rejected_candidates = 0;
};

// Like Solve, but a candidate whose z is not a unit mod N is recorded and
// replaced by the second intersection of the conic with the line through
// the canonical zero and (b, a, 1), points taken in a fixed order. Only
// reachable at desk-scale N: with both prime factors 3 mod 4 and R, S
// squares, a primitive zero never has z divisible by either factor.
SolveOutcome SolveReportingLeaks(const QuadEquation& eq);

// Composition of solutions of A x^2 + B1 y^2 = 1 and A x^2 + B2 y^2 = 1
// into a solution of A x^2 + B1 B2 y^2 = 1. Throws NonInvertible when
// 1 + A x1 x2 is not a unit (with the leaked factor when proper).
QuadSolution Compose(const BigInt& a, const QuadSolution& first, const QuadSolution& second,
                     const PublicModulus& modulus);

// Every solution in Z_N^2, sorted lexicographically. BoundExceeded when
// N is above `cap`.
std::vector<QuadSolution> BruteForceSolve(const QuadEquation& eq,
                                          std::uint64_t cap = kDefaultBruteForceCap);

bool Verify(const QuadEquation& eq, const QuadSolution& sol);

}  // namespace emslab
