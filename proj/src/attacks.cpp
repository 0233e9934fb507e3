#include "emslab/attacks.hpp"

#include <vector>

#include "emslab/errors.hpp"

namespace emslab {

namespace {

BigInt Power(const BigInt& base, std::size_t e, const BigInt& n) {
  return PowMod(base, BigInt(static_cast<unsigned long>(e)), n);
}

void CheckBit(int value) {
  if (value != 1 && value != -1) throw ValidationError("leaked bit must be +1 or -1");
}

// k_{j+1} k_j for the oriented pair, from the solutions at j and j + 1.
int AdjacentFactor(const SessionOffer& x_side, const SessionOffer& y_side, std::size_t j, const QuadSolution& at_j,
                   const QuadSolution& at_next, const MasterPublicKey& mpk) {
  const BigInt& n = mpk.n();
  const BigInt a = OfferCoefficient(x_side, mpk, j);
  const QuadSolution shifted{Mod(x_side.s_square * at_next.x, n), at_next.y};
  const BigInt denom = Mod(1 + a * at_j.x * shifted.x, n);
  const QuadSolution star = Compose(a, at_j, shifted, mpk.modulus);
  // Square root of the composed y-coefficient (u H(id))^2 S^(4j+4).
  const BigInt b_root = Mod(y_side.u * HashToJacobiOne(y_side.id, mpk.modulus) * Power(y_side.s_square, 2 * j + 2, n), n);
  return KeyBit(denom, mpk) * KeyBit(2 + 2 * star.y * b_root, mpk);
}

}  // namespace

ForgedOffer ForgeOffer(std::string_view victim_id, const MasterPublicKey& mpk, Rng& rng) {
  const BigInt& n = mpk.n();
  const BigInt r = HashToJacobiOne(victim_id, mpk.modulus);
  ForgedOffer out;
  out.t = rng.Unit(n);
  out.s = rng.Unit(n);
  out.offer.id = std::string(victim_id);
  out.offer.u = Mod(out.t * out.t * InvertMod(r, n), n);
  out.offer.s_square = Mod(out.s * out.s, n);
  return out;
}

SharedKey AdversaryDeriveKey(const ForgedOffer& forged, const SessionOffer& peer_offer, const MasterPublicKey& mpk,
                             std::size_t ell) {
  const BigInt& n = mpk.n();
  const Role role = RoleOf(forged.offer, peer_offer);
  const SessionOffer& x_side = role == Role::kInitiator ? forged.offer : peer_offer;
  const SessionOffer& y_side = role == Role::kInitiator ? peer_offer : forged.offer;
  SharedKey out;
  out.bits.reserve(ell);
  for (std::size_t i = 1; i <= ell; ++i) {
    const QuadSolution sol = Solve(SessionEquation(x_side, y_side, mpk, i));
    const BigInt root = Mod(forged.t * Power(forged.s, 2 * i + 1, n), n);
    if (role == Role::kInitiator) {
      out.bits.push_back(KeyBit(1 + sol.x * root, mpk));
    } else {
      out.bits.push_back(KeyBit(2 + 2 * sol.y * root, mpk));
    }
  }
  return out;
}

int RecoverAdjacentBit(const PublicSession& session, std::size_t i, int k_i, Direction direction,
                       const MasterPublicKey& mpk) {
  CheckBit(k_i);
  if (i < 1 || (direction == Direction::kBackward && i < 2)) throw ValidationError("target bit index below 1");
  const auto [x_side, y_side] = Orient(session.first, session.second);
  const std::size_t j = direction == Direction::kForward ? i : i - 1;
  const QuadSolution at_j = Solve(SessionEquation(*x_side, *y_side, mpk, j));
  const QuadSolution at_next = Solve(SessionEquation(*x_side, *y_side, mpk, j + 1));
  return k_i * AdjacentFactor(*x_side, *y_side, j, at_j, at_next, mpk);
}

SharedKey RecoverFullKey(const PublicSession& session, const LeakedBit& leak, std::size_t ell,
                         const MasterPublicKey& mpk) {
  CheckBit(leak.value);
  if (leak.index < 1 || leak.index > ell) throw ValidationError("leaked index outside 1..ell");
  const auto [x_side, y_side] = Orient(session.first, session.second);
  std::vector<QuadSolution> solutions;
  solutions.reserve(ell);
  for (std::size_t i = 1; i <= ell; ++i) solutions.push_back(Solve(SessionEquation(*x_side, *y_side, mpk, i)));

  SharedKey out;
  out.bits.assign(ell, 0);
  out.bits[leak.index - 1] = leak.value;
  for (std::size_t j = leak.index; j < ell; ++j) {
    out.bits[j] = out.bits[j - 1] * AdjacentFactor(*x_side, *y_side, j, solutions[j - 1], solutions[j], mpk);
  }
  for (std::size_t j = leak.index - 1; j >= 1; --j) {
    out.bits[j - 1] = out.bits[j] * AdjacentFactor(*x_side, *y_side, j, solutions[j - 1], solutions[j], mpk);
  }
  return out;
}

}  // namespace emslab
