#include "emslab/protocol.hpp"

#include <json.hpp>

#include "emslab/errors.hpp"

namespace emslab {

namespace {

using Json = nlohmann::ordered_json;

BigInt OddPower(const BigInt& base, std::size_t i, const BigInt& n) {
  return PowMod(base, BigInt(static_cast<unsigned long>(2 * i + 1)), n);
}

}  // namespace

void Validate(const SetupParams& params) {
  if (params.modulus_bits < 16) throw ValidationError("modulus_bits must be at least 16");
  if (params.ell < 1) throw ValidationError("ell must be at least 1");
}

MasterKeys CertifyMasterKeys(const TrapdoorFactors& factors, const BigInt& mu) {
  if (Legendre(mu, factors.p()).value() != -1 || Legendre(mu, factors.q()).value() != -1) {
    throw InvalidArgument("mu must be a non-square modulo both primes");
  }
  const PublicModulus modulus = factors.public_modulus();
  return MasterKeys{MasterPublicKey{modulus, Mod(mu, modulus.value()), std::string(kHashPolicy)},
                    MasterSecretKey{factors}};
}

MasterKeys Setup(const SetupParams& params) {
  Validate(params);
  Rng rng(DeriveSeed(params.seed, "setup"));
  const std::size_t p_bits = (params.modulus_bits + 1) / 2;
  const std::size_t q_bits = params.modulus_bits / 2;
  const BigInt p = GeneratePrime3Mod4(p_bits, rng);
  BigInt q = GeneratePrime3Mod4(q_bits, rng);
  while (q == p) q = GeneratePrime3Mod4(q_bits, rng);
  const TrapdoorFactors factors(p, q);
  const BigInt mu = SampleNonResidue(factors, rng);
  return CertifyMasterKeys(factors, mu);
}

IdentityKey Extract(const MasterSecretKey& msk, const MasterPublicKey& mpk, std::string_view id, Rng& rng) {
  IdentityKey key;
  key.id = std::string(id);
  key.r = HashToJacobiOne(id, mpk.modulus);
  // Symbol +1 mod N: r is a square mod p exactly when it is one mod q.
  key.a = Legendre(key.r, msk.factors.p()).value() == 1 ? 0 : 1;
  const BigInt target = key.a == 0 ? key.r : Mod(mpk.mu * key.r, mpk.n());
  const auto selector = static_cast<unsigned>(rng.NextWord() % 4);
  key.root = SqrtModRsa(target, msk.factors, selector);
  return key;
}

OfferWithSecret MakeOffer(const IdentityKey& key, const MasterPublicKey& mpk, Rng& rng) {
  const BigInt& n = mpk.n();
  OfferWithSecret out;
  out.secret.t = rng.Between(1, n);
  out.secret.alpha = 2 * out.secret.t + key.a;
  out.secret.s = rng.Unit(n);
  out.offer.id = key.id;
  out.offer.u = PowMod(mpk.mu, out.secret.alpha, n);
  out.offer.s_square = Mod(out.secret.s * out.secret.s, n);
  return out;
}

std::string SerializeOffer(const SessionOffer& offer) {
  Json j;
  j["id"] = offer.id;
  j["u"] = ToHex(offer.u);
  j["S"] = ToHex(offer.s_square);
  return j.dump();
}

SessionOffer ParseOffer(std::string_view text) {
  try {
    const Json j = Json::parse(text);
    if (!j.is_object() || j.size() != 3) throw ValidationError("offer must have exactly id, u, S");
    return SessionOffer{j.at("id").get<std::string>(), FromHex(j.at("u").get<std::string>()),
                        FromHex(j.at("S").get<std::string>())};
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed offer: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ValidationError(std::string("malformed offer: ") + e.what());
  }
}

std::string_view RoleName(Role role) { return role == Role::kInitiator ? "initiator" : "responder"; }

Role RoleOf(const SessionOffer& own, const SessionOffer& peer) {
  const auto own_digest = Sha256(SerializeOffer(own));
  const auto peer_digest = Sha256(SerializeOffer(peer));
  if (own_digest == peer_digest) throw ContractViolation("both offers serialize identically");
  return own_digest < peer_digest ? Role::kInitiator : Role::kResponder;
}

std::pair<const SessionOffer*, const SessionOffer*> Orient(const SessionOffer& a, const SessionOffer& b) {
  if (RoleOf(a, b) == Role::kInitiator) return {&a, &b};
  return {&b, &a};
}

BigInt OfferCoefficient(const SessionOffer& offer, const MasterPublicKey& mpk, std::size_t i) {
  const BigInt& n = mpk.n();
  return Mod(offer.u * HashToJacobiOne(offer.id, mpk.modulus) * OddPower(offer.s_square, i, n), n);
}

QuadEquation SessionEquation(const SessionOffer& x_side, const SessionOffer& y_side, const MasterPublicKey& mpk,
                             std::size_t i) {
  return QuadEquation(OfferCoefficient(x_side, mpk, i), OfferCoefficient(y_side, mpk, i), mpk.modulus);
}

int KeyBit(const BigInt& value, const MasterPublicKey& mpk) {
  const BigInt& n = mpk.n();
  const JacobiValue j = Jacobi(value, n);
  if (!j.is_zero()) return j.value();
  const BigInt g = Gcd(value, n);
  if (g != n) throw FactorLeak("key-bit argument shares a factor with N", g);
  throw ZeroSymbol("key-bit argument is 0 mod N");
}

std::string BitString(const std::vector<int>& bits) {
  std::string out;
  out.reserve(bits.size());
  for (int b : bits) {
    if (b != 1 && b != -1) throw InvalidArgument("key bits must be +1 or -1");
    out.push_back(b == 1 ? '0' : '1');
  }
  return out;
}

std::vector<int> ParseBitString(std::string_view text) {
  std::vector<int> out;
  out.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') throw ValidationError("bit string may only contain 0 and 1");
    out.push_back(c == '0' ? 1 : -1);
  }
  return out;
}

SharedKey DeriveKey(const IdentityKey& key, const SessionSecret& secret, const SessionOffer& own_offer,
                    const SessionOffer& peer_offer, Role role, const MasterPublicKey& mpk, std::size_t ell) {
  const BigInt& n = mpk.n();
  if (own_offer.id != key.id || secret.alpha != 2 * secret.t + key.a ||
      own_offer.u != PowMod(mpk.mu, secret.alpha, n) || own_offer.s_square != Mod(secret.s * secret.s, n)) {
    throw ContractViolation("session secret does not match own offer");
  }
  if (RoleOf(own_offer, peer_offer) != role) throw ContractViolation("role disagrees with offer orientation");

  // (mu^t root)^2 = u H(id).
  const BigInt offer_root = Mod(PowMod(mpk.mu, secret.t, n) * key.root, n);
  const SessionOffer& x_side = role == Role::kInitiator ? own_offer : peer_offer;
  const SessionOffer& y_side = role == Role::kInitiator ? peer_offer : own_offer;

  SharedKey out;
  out.bits.reserve(ell);
  for (std::size_t i = 1; i <= ell; ++i) {
    const QuadSolution sol = Solve(SessionEquation(x_side, y_side, mpk, i));
    const BigInt root = Mod(OddPower(secret.s, i, n) * offer_root, n);
    if (role == Role::kInitiator) {
      out.bits.push_back(KeyBit(1 + sol.x * root, mpk));
    } else {
      out.bits.push_back(KeyBit(2 + 2 * sol.y * root, mpk));
    }
  }
  return out;
}

}  // namespace emslab
