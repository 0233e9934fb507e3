#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "emslab/protocol.hpp"

namespace emslab {

// id || be32(j), the hash input of the j-th identity value (j from 1).
std::string IndexedIdentity(std::string_view id, std::size_t j);

struct IdentityEntry {
  BigInt r;  // H(id || j)
  unsigned a = 0;
  BigInt root;  // root^2 = mu^a r (mod N)
};

struct VectorIdentityKey {
  std::string id;
  std::vector<IdentityEntry> entries;
};

VectorIdentityKey RepairExtract(const MasterSecretKey& msk, const MasterPublicKey& mpk, std::string_view id,
                                std::size_t ell, Rng& rng);

// What a party publishes: its identity and a-bits.
struct RepairOffer {
  std::string id;
  std::vector<unsigned> a_bits;
  friend bool operator==(const RepairOffer&, const RepairOffer&) = default;
};

RepairOffer PublicPart(const VectorIdentityKey& key);

// {"id":...,"a":"0110"}.
std::string SerializeRepairOffer(const RepairOffer& offer);
RepairOffer ParseRepairOffer(std::string_view text);

// Smaller SHA-256 of the serialized offer supplies the rows.
Role RepairRoleOf(const RepairOffer& own, const RepairOffer& peer);

// mu^a H(id || j) for j = 1..ell.
std::vector<BigInt> RepairCoefficients(const RepairOffer& offer, const MasterPublicKey& mpk);

// ell x ell bits, row-major; row i belongs to the initiator's i-th value.
struct GridSharedKey {
  std::size_t ell = 0;
  std::vector<int> bits;

  int at(std::size_t row, std::size_t col) const { return bits[row * ell + col]; }
  friend bool operator==(const GridSharedKey&, const GridSharedKey&) = default;
};

// Cell (i, j) solves C1_i x^2 + C2_j y^2 = 1 with C = mu^a H(id || j).
// ContractViolation on a role mismatch or vectors of the wrong length.
GridSharedKey RepairDeriveKey(const VectorIdentityKey& own, const RepairOffer& peer, Role role,
                              const MasterPublicKey& mpk, std::size_t ell);

// With (u1, v1), (u2, v2) solutions of c u^2 + d_k v^2 = 1 and
// composed_root^2 = d_1 d_2, returns
//   (1 + c u1 u2 / N) (2 + 2 v* composed_root / N),
// v* the second coordinate of the composed solution. That is the ratio of
// the two cells' bits when composed_root is a true root.
int GridTransferFactor(const BigInt& c, const QuadSolution& first, const QuadSolution& second,
                       const BigInt& composed_root, const MasterPublicKey& mpk);

// Secret key serializations, used to compare key sizes.
std::string SerializeSecretKey(const IdentityKey& key);
std::string SerializeSecretKey(const VectorIdentityKey& key);

struct ProbeReport {
  std::size_t leaked_row = 0;  // 0-based
  std::size_t leaked_col = 0;
  std::size_t predictions = 0;
  std::size_t correct = 0;
  // Transfers that hit a non-unit denominator or a zero symbol; those
  // cells are predicted +1.
  std::size_t failed_transfers = 0;

  double accuracy() const { return predictions == 0 ? 0.0 : static_cast<double>(correct) / predictions; }
};

// Transfers the leaked cell to every other cell of its row and column by
// composing the two cells' solutions, as in the adjacent-bit relation of
// the unrepaired scheme. The composed equation's second coefficient is a
// product of two identity values whose square root is not public, so the
// root is replaced by 1. Predictions are scored against `honest`.
ProbeReport RepairResiliencyProbe(const RepairOffer& first, const RepairOffer& second, std::size_t leaked_row,
                                  std::size_t leaked_col, const GridSharedKey& honest, const MasterPublicKey& mpk);

}  // namespace emslab
