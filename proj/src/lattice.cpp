#include "emslab/lattice.hpp"

#include "emslab/errors.hpp"

namespace emslab {

namespace {

using Rational = mpq_class;

struct GramSchmidt {
  std::array<std::array<Rational, 3>, 3> mu;
  std::array<Rational, 3> norms;  // squared norms of the orthogonalized vectors
};

BigInt WeightedDot(const Vec3& a, const Vec3& b, const Vec3& weights) {
  return weights[0] * a[0] * b[0] + weights[1] * a[1] * b[1] + weights[2] * a[2] * b[2];
}

GramSchmidt Orthogonalize(const Basis3& basis, const Vec3& weights) {
  GramSchmidt gs;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      Rational acc(WeightedDot(basis[i], basis[j], weights));
      for (std::size_t k = 0; k < j; ++k) acc -= gs.mu[j][k] * gs.mu[i][k] * gs.norms[k];
      gs.mu[i][j] = acc / gs.norms[j];
    }
    Rational norm(WeightedNorm(basis[i], weights));
    for (std::size_t k = 0; k < i; ++k) norm -= gs.mu[i][k] * gs.mu[i][k] * gs.norms[k];
    if (norm <= 0) throw InvalidArgument("lattice basis is not full rank");
    gs.norms[i] = norm;
  }
  return gs;
}

BigInt Floor(const Rational& q) {
  BigInt out;
  mpz_fdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return out;
}

BigInt Ceil(const Rational& q) {
  BigInt out;
  mpz_cdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return out;
}


void AddScaled(Vec3& target, const Vec3& source, const BigInt& scale) {
  for (std::size_t k = 0; k < 3; ++k) target[k] += scale * source[k];
}

struct Enumerator {
  const Basis3& basis;
  const Vec3& weights;
  const GramSchmidt& gs;
  BigInt& bound;
  const std::function<void(const Vec3&, const BigInt&)>& visit;
  std::array<BigInt, 3> coeffs{0, 0, 0};

  void Run(int level, const Rational& partial) {
    Rational center = 0;
    for (int j = level + 1; j < 3; ++j) center -= gs.mu[j][level] * Rational(coeffs[j]);
    const Rational room = Rational(bound) - partial;
    if (room < 0) return;
    BigInt radius;
    mpz_sqrt(radius.get_mpz_t(), Floor(room / gs.norms[level]).get_mpz_t());
    const BigInt lo = Floor(center) - radius - 1;
    const BigInt hi = Ceil(center) + radius + 1;
    for (BigInt c = lo; c <= hi; ++c) {
      const Rational offset = Rational(c) - center;
      const Rational value = partial + gs.norms[level] * offset * offset;
      if (value > Rational(bound)) continue;
      coeffs[level] = c;
      if (level > 0) {
        Run(level - 1, value);
        continue;
      }
      if (coeffs[0] == 0 && coeffs[1] == 0 && coeffs[2] == 0) continue;
      Vec3 v{0, 0, 0};
      for (std::size_t i = 0; i < 3; ++i) AddScaled(v, basis[i], coeffs[i]);
      visit(v, WeightedNorm(v, weights));
    }
    coeffs[level] = 0;
  }
};

}  // namespace

BigInt WeightedNorm(const Vec3& v, const Vec3& weights) { return WeightedDot(v, v, weights); }

// Integral variant: d[i + 1] is the Gram determinant of the first i + 1
// vectors (d[0] = 1) and lambda[i][j] = d[j + 1] mu[i][j], all integers,
// so no rational is ever canonicalized.
Basis3 LllReduce(Basis3 basis, const Vec3& weights) {
  std::array<BigInt, 4> d{1, 0, 0, 0};
  std::array<std::array<BigInt, 3>, 3> lambda;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      BigInt u = WeightedDot(basis[i], basis[j], weights);
      for (std::size_t l = 0; l < j; ++l) u = (d[l + 1] * u - lambda[i][l] * lambda[j][l]) / d[l];
      if (j < i) {
        lambda[i][j] = u;
      } else {
        if (u <= 0) throw InvalidArgument("lattice basis is not full rank");
        d[i + 1] = u;
      }
    }
  }

  std::size_t k = 1;
  while (k < 3) {
    for (std::size_t j = k; j-- > 0;) {
      // Round half up of lambda / d.
      BigInt r;
      const BigInt twice = 2 * lambda[k][j] + d[j + 1];
      const BigInt den = 2 * d[j + 1];
      mpz_fdiv_q(r.get_mpz_t(), twice.get_mpz_t(), den.get_mpz_t());
      if (r == 0) continue;
      AddScaled(basis[k], basis[j], BigInt(-r));
      lambda[k][j] -= r * d[j + 1];
      for (std::size_t i = 0; i < j; ++i) lambda[k][i] -= r * lambda[j][i];
    }
    // Lovasz with delta = 99/100, scaled by 100 d[k]^2.
    const BigInt& lam = lambda[k][k - 1];
    if (100 * (d[k + 1] * d[k - 1] + lam * lam) >= 99 * d[k] * d[k]) {
      ++k;
      continue;
    }
    std::swap(basis[k], basis[k - 1]);
    for (std::size_t j = 0; j + 1 < k; ++j) std::swap(lambda[k][j], lambda[k - 1][j]);
    const BigInt l = lam;
    const BigInt b = (d[k - 1] * d[k + 1] + l * l) / d[k];
    for (std::size_t i = k + 1; i < 3; ++i) {
      const BigInt t = lambda[i][k];
      lambda[i][k] = (d[k + 1] * lambda[i][k - 1] - l * t) / d[k];
      lambda[i][k - 1] = (b * t + l * lambda[i][k]) / d[k + 1];
    }
    d[k] = b;
    k = k > 1 ? k - 1 : 1;
  }
  return basis;
}

void EnumerateShortVectors(const Basis3& basis, const Vec3& weights, BigInt& bound,
                           const std::function<void(const Vec3&, const BigInt&)>& visit) {
  const GramSchmidt gs = Orthogonalize(basis, weights);
  Enumerator e{basis, weights, gs, bound, visit};
  e.Run(2, Rational(0));
}

}  // namespace emslab
