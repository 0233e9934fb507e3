#pragma once

#include <array>
#include <functional>

#include "emslab/bigint.hpp"

namespace emslab {

using Vec3 = std::array<BigInt, 3>;
using Basis3 = std::array<Vec3, 3>;

// Positive diagonal quadratic form w0*v0^2 + w1*v1^2 + w2*v2^2.
BigInt WeightedNorm(const Vec3& v, const Vec3& weights);

// Exact LLL reduction (delta = 99/100) of a full-rank rank-3 integer
// basis under the diagonal form given by `weights`. Size reduction
// rounds half up; ties never depend on floating point.
Basis3 LllReduce(Basis3 basis, const Vec3& weights);

// Visits every nonzero lattice vector v with WeightedNorm(v) <= bound.
// The visitor may lower `bound` to prune the rest of the search; vectors
// above the current bound are skipped. Coefficients are scanned in
// ascending order at every level, so the visit order is deterministic.
void EnumerateShortVectors(const Basis3& basis, const Vec3& weights, BigInt& bound,
                           const std::function<void(const Vec3&, const BigInt&)>& visit);

}  // namespace emslab
