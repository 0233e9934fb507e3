#include "emslab/repair.hpp"

#include <json.hpp>

#include "emslab/errors.hpp"

namespace emslab {

namespace {

using Json = nlohmann::ordered_json;

std::string ABitString(const std::vector<unsigned>& bits) {
  std::string out;
  for (unsigned b : bits) out.push_back(b == 0 ? '0' : '1');
  return out;
}

struct Oriented {
  std::vector<BigInt> rows;
  std::vector<BigInt> cols;
};

Oriented OrientCoefficients(const RepairOffer& first, const RepairOffer& second, const MasterPublicKey& mpk) {
  const bool first_rows = RepairRoleOf(first, second) == Role::kInitiator;
  return Oriented{RepairCoefficients(first_rows ? first : second, mpk),
                  RepairCoefficients(first_rows ? second : first, mpk)};
}

}  // namespace

int GridTransferFactor(const BigInt& c, const QuadSolution& first, const QuadSolution& second,
                       const BigInt& composed_root, const MasterPublicKey& mpk) {
  const QuadSolution star = Compose(c, first, second, mpk.modulus);
  return KeyBit(1 + c * first.x * second.x, mpk) * KeyBit(2 + 2 * star.y * composed_root, mpk);
}

std::string IndexedIdentity(std::string_view id, std::size_t j) {
  std::string out(id);
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<char>((j >> shift) & 0xff));
  return out;
}

VectorIdentityKey RepairExtract(const MasterSecretKey& msk, const MasterPublicKey& mpk, std::string_view id,
                                std::size_t ell, Rng& rng) {
  VectorIdentityKey key;
  key.id = std::string(id);
  for (std::size_t j = 1; j <= ell; ++j) {
    const IdentityKey single = Extract(msk, mpk, IndexedIdentity(id, j), rng);
    key.entries.push_back(IdentityEntry{single.r, single.a, single.root});
  }
  return key;
}

RepairOffer PublicPart(const VectorIdentityKey& key) {
  RepairOffer offer{key.id, {}};
  for (const IdentityEntry& e : key.entries) offer.a_bits.push_back(e.a);
  return offer;
}

std::string SerializeRepairOffer(const RepairOffer& offer) {
  Json j;
  j["id"] = offer.id;
  j["a"] = ABitString(offer.a_bits);
  return j.dump();
}

RepairOffer ParseRepairOffer(std::string_view text) {
  try {
    const Json j = Json::parse(text);
    if (!j.is_object() || j.size() != 2) throw ValidationError("repair offer must have exactly id, a");
    RepairOffer offer{j.at("id").get<std::string>(), {}};
    for (char c : j.at("a").get<std::string>()) {
      if (c != '0' && c != '1') throw ValidationError("a-bits must be 0 or 1");
      offer.a_bits.push_back(c == '1' ? 1 : 0);
    }
    return offer;
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed repair offer: ") + e.what());
  }
}

Role RepairRoleOf(const RepairOffer& own, const RepairOffer& peer) {
  const auto own_digest = Sha256(SerializeRepairOffer(own));
  const auto peer_digest = Sha256(SerializeRepairOffer(peer));
  if (own_digest == peer_digest) throw ContractViolation("both repair offers serialize identically");
  return own_digest < peer_digest ? Role::kInitiator : Role::kResponder;
}

std::vector<BigInt> RepairCoefficients(const RepairOffer& offer, const MasterPublicKey& mpk) {
  std::vector<BigInt> out;
  out.reserve(offer.a_bits.size());
  for (std::size_t j = 1; j <= offer.a_bits.size(); ++j) {
    const BigInt r = HashToJacobiOne(IndexedIdentity(offer.id, j), mpk.modulus);
    out.push_back(offer.a_bits[j - 1] == 0 ? r : Mod(mpk.mu * r, mpk.n()));
  }
  return out;
}

GridSharedKey RepairDeriveKey(const VectorIdentityKey& own, const RepairOffer& peer, Role role,
                              const MasterPublicKey& mpk, std::size_t ell) {
  if (own.entries.size() != ell || peer.a_bits.size() != ell) {
    throw ContractViolation("identity vectors must have ell entries");
  }
  const RepairOffer own_offer = PublicPart(own);
  if (RepairRoleOf(own_offer, peer) != role) throw ContractViolation("role disagrees with offer orientation");
  const std::vector<BigInt> own_coeffs = RepairCoefficients(own_offer, mpk);
  const std::vector<BigInt> peer_coeffs = RepairCoefficients(peer, mpk);
  const bool rows = role == Role::kInitiator;

  GridSharedKey grid{ell, std::vector<int>(ell * ell, 0)};
  for (std::size_t i = 0; i < ell; ++i) {
    for (std::size_t j = 0; j < ell; ++j) {
      const BigInt& row_coeff = rows ? own_coeffs[i] : peer_coeffs[i];
      const BigInt& col_coeff = rows ? peer_coeffs[j] : own_coeffs[j];
      const QuadSolution sol = Solve(QuadEquation(row_coeff, col_coeff, mpk.modulus));
      grid.bits[i * ell + j] = rows ? KeyBit(1 + sol.x * own.entries[i].root, mpk)
                                    : KeyBit(2 + 2 * sol.y * own.entries[j].root, mpk);
    }
  }
  return grid;
}

std::string SerializeSecretKey(const IdentityKey& key) {
  Json j;
  j["id"] = key.id;
  j["a"] = key.a == 0 ? "0" : "1";
  j["roots"] = Json::array({ToHex(key.root)});
  return j.dump();
}

std::string SerializeSecretKey(const VectorIdentityKey& key) {
  Json j;
  j["id"] = key.id;
  std::vector<unsigned> bits;
  Json roots = Json::array();
  for (const IdentityEntry& e : key.entries) {
    bits.push_back(e.a);
    roots.push_back(ToHex(e.root));
  }
  j["a"] = ABitString(bits);
  j["roots"] = roots;
  return j.dump();
}

ProbeReport RepairResiliencyProbe(const RepairOffer& first, const RepairOffer& second, std::size_t leaked_row,
                                  std::size_t leaked_col, const GridSharedKey& honest, const MasterPublicKey& mpk) {
  const std::size_t ell = honest.ell;
  if (leaked_row >= ell || leaked_col >= ell) throw ValidationError("leaked cell outside the grid");
  if (first.a_bits.size() != ell || second.a_bits.size() != ell) {
    throw ValidationError("offers do not match the grid size");
  }
  const Oriented c = OrientCoefficients(first, second, mpk);
  auto solve = [&](std::size_t i, std::size_t j) { return Solve(QuadEquation(c.rows[i], c.cols[j], mpk.modulus)); };
  auto swap = [](const QuadSolution& s) { return QuadSolution{s.y, s.x}; };

  ProbeReport report{leaked_row, leaked_col, 0, 0, 0};
  const int leaked = honest.at(leaked_row, leaked_col);
  const QuadSolution base = solve(leaked_row, leaked_col);
  auto score = [&](int predicted, int truth) {
    ++report.predictions;
    if (predicted == truth) ++report.correct;
  };

  // Same row: shared x-coefficient.
  for (std::size_t j = 0; j < ell; ++j) {
    if (j == leaked_col) continue;
    int predicted = 1;
    try {
      predicted = leaked * GridTransferFactor(c.rows[leaked_row], base, solve(leaked_row, j), 1, mpk);
    } catch (const Error&) {
      ++report.failed_transfers;
    }
    score(predicted, honest.at(leaked_row, j));
  }
  // Same column: shared y-coefficient, coordinates swapped. The bit
  // (2 + 2y sqrt(B) / N) carries an extra factor (2 / N) on both cells,
  // which cancels.
  for (std::size_t i = 0; i < ell; ++i) {
    if (i == leaked_row) continue;
    int predicted = 1;
    try {
      predicted = leaked * GridTransferFactor(c.cols[leaked_col], swap(base), swap(solve(i, leaked_col)), 1, mpk);
    } catch (const Error&) {
      ++report.failed_transfers;
    }
    score(predicted, honest.at(i, leaked_col));
  }
  return report;
}

}  // namespace emslab
