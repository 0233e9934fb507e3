#pragma once

#include <cstddef>
#include <string_view>

#include "emslab/protocol.hpp"

namespace emslab {

// Offer injected in place of the victim's: u = t^2 / H(victim), so the
// peer's product u H(victim) is a square whose root the adversary holds.
struct ForgedOffer {
  SessionOffer offer;
  BigInt t;
  BigInt s;
};

// t and s uniform units. InvalidArgument if H(victim_id) is not a unit.
ForgedOffer ForgeOffer(std::string_view victim_id, const MasterPublicKey& mpk, Rng& rng);

// Key the responder derives from the forged offer, computed from the
// forged offer's (t, s) and public data only.
SharedKey AdversaryDeriveKey(const ForgedOffer& forged, const SessionOffer& peer_offer, const MasterPublicKey& mpk,
                             std::size_t ell);

// The two offers exchanged in a session, in either order.
struct PublicSession {
  SessionOffer first;
  SessionOffer second;
};

struct LeakedBit {
  std::size_t index = 0;  // 1-based
  int value = 0;          // +1 or -1
};

enum class Direction { kForward, kBackward };

// Bit i + 1 (forward) or i - 1 (backward) from bit i. Adjacent bits j and
// j + 1 satisfy
//   k_{j+1} = k_j (1 + A S x_j x_{j+1} / N) (2 + 2 y* B' / N)
// with A = u H(id) S^(2j+1) of the x-side, B' = u H(id) S^(2j+2) of the
// y-side and y* from composing (x_j, y_j) with (S x_{j+1}, y_{j+1}).
// All factors are +-1, so the same product also gives k_j from k_{j+1}.
// ValidationError for a target index below 1 or a value other than +-1.
int RecoverAdjacentBit(const PublicSession& session, std::size_t i, int k_i, Direction direction,
                       const MasterPublicKey& mpk);

// Every bit of the session key from one leaked bit. Each equation is
// solved once. ValidationError when the leak is outside 1..ell.
SharedKey RecoverFullKey(const PublicSession& session, const LeakedBit& leak, std::size_t ell,
                         const MasterPublicKey& mpk);

}  // namespace emslab
