#include "emslab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

#include <json.hpp>

namespace emslab {

namespace {

using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

class Channel {
 public:
  explicit Channel(std::string session_id) : session_id_(std::move(session_id)) {}

  void Send(std::string_view sender, std::string_view receiver, std::string_view kind, std::string payload) {
    records_.push_back(TranscriptRecord{next_seq_++, session_id_, std::string(sender), std::string(receiver),
                                        std::string(kind), std::move(payload)});
  }

  const std::vector<TranscriptRecord>& records() const { return records_; }

 private:
  std::string session_id_;
  std::uint64_t next_seq_ = 0;
  std::vector<TranscriptRecord> records_;
};

std::string KeyNote(const std::vector<int>& bits) {
  Json j;
  j["key"] = BitString(bits);
  return j.dump();
}

const TranscriptRecord* FindRecord(const std::vector<TranscriptRecord>& transcript, std::string_view sender,
                                   std::string_view receiver, bool match_sender) {
  for (const TranscriptRecord& r : transcript) {
    if (r.kind == "note") continue;
    if (match_sender ? r.sender == sender : r.receiver == receiver) return &r;
  }
  return nullptr;
}

const TranscriptRecord& SentBy(const std::vector<TranscriptRecord>& transcript, std::string_view actor) {
  const TranscriptRecord* r = FindRecord(transcript, actor, {}, true);
  if (r == nullptr) throw ValidationError("transcript has no message from " + std::string(actor));
  return *r;
}

const TranscriptRecord& ReceivedBy(const std::vector<TranscriptRecord>& transcript, std::string_view actor) {
  const TranscriptRecord* r = FindRecord(transcript, {}, actor, false);
  if (r == nullptr) throw ValidationError("transcript has no message to " + std::string(actor));
  return *r;
}

double Median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : (values[mid - 1] + values[mid]) / 2;
}

}  // namespace

std::string_view AdversaryModeName(AdversaryMode mode) {
  switch (mode) {
    case AdversaryMode::kNone:
      return "none";
    case AdversaryMode::kPassive:
      return "passive";
    case AdversaryMode::kImpersonate:
      return "impersonate";
  }
  return "none";
}

AdversaryMode ParseAdversaryMode(std::string_view name) {
  if (name == "none") return AdversaryMode::kNone;
  if (name == "passive") return AdversaryMode::kPassive;
  if (name == "impersonate") return AdversaryMode::kImpersonate;
  throw ValidationError("unknown adversary mode: " + std::string(name));
}

std::string_view VariantName(Variant variant) { return variant == Variant::kEms ? "ems" : "repair"; }

Variant ParseVariant(std::string_view name) {
  if (name == "ems") return Variant::kEms;
  if (name == "repair") return Variant::kRepair;
  throw ValidationError("unknown variant: " + std::string(name));
}

void Validate(const SessionConfig& config) {
  Validate(SetupParams{config.modulus_bits, config.ell, config.seed});
  if (config.initiator_id == config.responder_id) throw ValidationError("the two identities must differ");
  if (config.hook.mode == AdversaryMode::kImpersonate) {
    if (config.hook.victim_id.empty()) throw ValidationError("impersonate mode requires a victim identity");
    if (config.variant != Variant::kEms) throw ValidationError("impersonation applies to the ems variant only");
  }
}

std::string SerializeRecord(const TranscriptRecord& record) {
  Json j;
  j["seq"] = record.seq;
  j["session"] = record.session_id;
  j["sender"] = record.sender;
  j["receiver"] = record.receiver;
  j["kind"] = record.kind;
  j["payload"] = Json::parse(record.payload);
  return j.dump();
}

TranscriptRecord ParseRecord(std::string_view line) {
  try {
    const Json j = Json::parse(line);
    if (!j.is_object() || j.size() != 6) throw ValidationError("transcript record must have six fields");
    TranscriptRecord r{j.at("seq").get<std::uint64_t>(), j.at("session").get<std::string>(),
                       j.at("sender").get<std::string>(),  j.at("receiver").get<std::string>(),
                       j.at("kind").get<std::string>(),    j.at("payload").dump()};
    if (r.kind != "offer" && r.kind != "forged_offer" && r.kind != "note") {
      throw ValidationError("unknown record kind: " + r.kind);
    }
    if (!j.at("payload").is_object()) throw ValidationError("payload must be an object");
    return r;
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed transcript record: ") + e.what());
  }
}

std::string SerializeTranscript(const std::vector<TranscriptRecord>& records) {
  std::string out;
  for (const TranscriptRecord& r : records) {
    out += SerializeRecord(r);
    out += '\n';
  }
  return out;
}

std::vector<TranscriptRecord> ParseTranscript(std::string_view text) {
  std::vector<TranscriptRecord> out;
  std::map<std::string, std::uint64_t> last_seq;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(start, end - start);
    start = end + 1;
    if (line.empty()) continue;
    TranscriptRecord r = ParseRecord(line);
    const auto it = last_seq.find(r.session_id);
    if (it != last_seq.end() && r.seq <= it->second) throw ValidationError("seq must increase within a session");
    last_seq[r.session_id] = r.seq;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<int> SessionResult::KeyOf(std::string_view actor) const {
  for (const ActorKey& k : keys) {
    if (k.actor == actor) return k.bits;
  }
  return {};
}

SessionResult RunSession(const SessionConfig& config) {
  Validate(config);
  const auto setup_start = Clock::now();
  SessionResult result{config, emslab::Setup(SetupParams{config.modulus_bits, config.ell, config.seed}), {}, {}, {},
                       std::nullopt, {}};
  result.timings.setup_seconds = SecondsSince(setup_start);
  SessionConfig& cfg = result.config;
  if (cfg.session_id.empty()) cfg.session_id = "s" + std::to_string(cfg.seed);
  const MasterPublicKey& mpk = result.master.mpk;
  const MasterSecretKey& msk = result.master.msk;
  Channel channel(cfg.session_id);
  const bool impersonate = cfg.hook.mode == AdversaryMode::kImpersonate;

  try {
    auto start = Clock::now();
    if (impersonate) {
      // Before any identity key is extracted.
      Rng adversary_rng(DeriveSeed(cfg.hook.seed, "adversary"));
      result.forged = ForgeOffer(cfg.hook.victim_id, mpk, adversary_rng);
    }
    Rng rng1(DeriveSeed(cfg.seed, kInitiatorActor));
    Rng rng2(DeriveSeed(cfg.seed, kResponderActor));
    PartySecrets p1{std::string(kInitiatorActor), {}, {}, {}};
    PartySecrets p2{std::string(kResponderActor), {}, {}, {}};

    if (cfg.variant == Variant::kRepair) {
      p1.vector_key = RepairExtract(msk, mpk, cfg.initiator_id, cfg.ell, rng1);
      p2.vector_key = RepairExtract(msk, mpk, cfg.responder_id, cfg.ell, rng2);
      result.timings.extract_seconds = SecondsSince(start);
      start = Clock::now();
      const RepairOffer o1 = PublicPart(p1.vector_key);
      const RepairOffer o2 = PublicPart(p2.vector_key);
      channel.Send(kInitiatorActor, kResponderActor, "offer", SerializeRepairOffer(o1));
      channel.Send(kResponderActor, kInitiatorActor, "offer", SerializeRepairOffer(o2));
      result.timings.offer_seconds = SecondsSince(start);
      start = Clock::now();
      const GridSharedKey g1 = RepairDeriveKey(p1.vector_key, o2, RepairRoleOf(o1, o2), mpk, cfg.ell);
      const GridSharedKey g2 = RepairDeriveKey(p2.vector_key, o1, RepairRoleOf(o2, o1), mpk, cfg.ell);
      result.timings.derive_seconds = SecondsSince(start);
      result.keys = {{std::string(kInitiatorActor), g1.bits}, {std::string(kResponderActor), g2.bits}};
    } else {
      p1.key = Extract(msk, mpk, cfg.initiator_id, rng1);
      p2.key = Extract(msk, mpk, cfg.responder_id, rng2);
      result.timings.extract_seconds = SecondsSince(start);
      start = Clock::now();
      const OfferWithSecret o1 = MakeOffer(p1.key, mpk, rng1);
      const OfferWithSecret o2 = MakeOffer(p2.key, mpk, rng2);
      p1.secret = o1.secret;
      p2.secret = o2.secret;
      if (impersonate) {
        channel.Send(kInitiatorActor, kAdversaryActor, "offer", SerializeOffer(o1.offer));
        channel.Send(kAdversaryActor, kResponderActor, "forged_offer", SerializeOffer(result.forged->offer));
      } else {
        channel.Send(kInitiatorActor, kResponderActor, "offer", SerializeOffer(o1.offer));
      }
      channel.Send(kResponderActor, kInitiatorActor, "offer", SerializeOffer(o2.offer));
      result.timings.offer_seconds = SecondsSince(start);

      start = Clock::now();
      const SessionOffer& p1_received = o2.offer;
      const SessionOffer& p2_received = impersonate ? result.forged->offer : o1.offer;
      const SharedKey k1 = DeriveKey(p1.key, p1.secret, o1.offer, p1_received, RoleOf(o1.offer, p1_received), mpk,
                                     cfg.ell);
      const SharedKey k2 = DeriveKey(p2.key, p2.secret, o2.offer, p2_received, RoleOf(o2.offer, p2_received), mpk,
                                     cfg.ell);
      result.keys = {{std::string(kInitiatorActor), k1.bits}, {std::string(kResponderActor), k2.bits}};
      if (impersonate) {
        const SharedKey ka = AdversaryDeriveKey(*result.forged, o2.offer, mpk, cfg.ell);
        result.keys.push_back({std::string(kAdversaryActor), ka.bits});
      }
      result.timings.derive_seconds = SecondsSince(start);
    }
    result.parties = {std::move(p1), std::move(p2)};
  } catch (const Error& e) {
    throw SessionError(e, channel.records());
  }

  for (const ActorKey& k : result.keys) channel.Send(k.actor, k.actor, "note", KeyNote(k.bits));
  result.transcript = channel.records();
  return result;
}

std::vector<ActorKey> ReplayKeys(const std::vector<TranscriptRecord>& transcript, const MasterPublicKey& mpk,
                                 Variant variant, std::size_t ell, const std::vector<PartySecrets>& parties,
                                 const std::optional<ForgedOffer>& forged) {
  std::vector<ActorKey> out;
  for (const PartySecrets& party : parties) {
    const TranscriptRecord& sent = SentBy(transcript, party.actor);
    const TranscriptRecord& received = ReceivedBy(transcript, party.actor);
    if (variant == Variant::kRepair) {
      const RepairOffer own = ParseRepairOffer(sent.payload);
      const RepairOffer peer = ParseRepairOffer(received.payload);
      if (!(own == PublicPart(party.vector_key))) throw ContractViolation("secrets do not match the transcript");
      out.push_back({party.actor, RepairDeriveKey(party.vector_key, peer, RepairRoleOf(own, peer), mpk, ell).bits});
    } else {
      const SessionOffer own = ParseOffer(sent.payload);
      const SessionOffer peer = ParseOffer(received.payload);
      out.push_back({party.actor, DeriveKey(party.key, party.secret, own, peer, RoleOf(own, peer), mpk, ell).bits});
    }
  }
  if (forged) {
    const TranscriptRecord& sent = SentBy(transcript, kAdversaryActor);
    if (ParseOffer(sent.payload) != forged->offer) throw ContractViolation("forgery does not match the transcript");
    const TranscriptRecord& peer = SentBy(transcript, sent.receiver);
    out.push_back({std::string(kAdversaryActor), AdversaryDeriveKey(*forged, ParseOffer(peer.payload), mpk, ell).bits});
  }
  return out;
}

ResiliencyReport RunResiliencyExperiment(const SessionConfig& config, std::size_t leak_index) {
  if (leak_index < 1 || leak_index > config.ell) throw ValidationError("leak index outside 1..ell");
  if (config.variant != Variant::kEms || config.hook.mode == AdversaryMode::kImpersonate) {
    throw ValidationError("resiliency experiment needs an honest ems session");
  }
  const SessionResult session = RunSession(config);
  const MasterPublicKey& mpk = session.master.mpk;
  const PublicSession public_data{ParseOffer(SentBy(session.transcript, kInitiatorActor).payload),
                                  ParseOffer(SentBy(session.transcript, kResponderActor).payload)};
  ResiliencyReport report;
  report.session_id = session.config.session_id;
  report.modulus_bits = config.modulus_bits;
  report.ell = config.ell;
  report.leak_index = leak_index;
  report.honest = session.KeyOf(kResponderActor);
  const auto start = Clock::now();
  report.recovered =
      RecoverFullKey(public_data, {leak_index, report.honest[leak_index - 1]}, config.ell, mpk).bits;
  report.per_bit_seconds = SecondsSince(start) / static_cast<double>(config.ell);
  report.match = report.recovered == report.honest && report.honest == session.KeyOf(kInitiatorActor);
  report.transcript = session.transcript;
  Json note;
  note["leak_index"] = leak_index;
  note["leaked_bit"] = BitString({report.honest[leak_index - 1]});
  note["key"] = BitString(report.recovered);
  report.transcript.push_back({report.transcript.back().seq + 1, report.session_id, std::string(kAdversaryActor),
                               std::string(kAdversaryActor), "note", note.dump()});
  return report;
}

RepairProbeReport RunRepairProbeExperiment(const SessionConfig& config, std::size_t sessions) {
  if (config.variant != Variant::kRepair) throw ValidationError("probe experiment needs the repair variant");
  if (config.ell < 2) throw ValidationError("probe experiment needs ell >= 2");
  RepairProbeReport report;
  report.modulus_bits = config.modulus_bits;
  report.ell = config.ell;
  for (std::size_t k = 0; k < sessions; ++k) {
    SessionConfig cfg = config;
    cfg.seed = config.seed + k;
    if (k > 0 || cfg.session_id.empty()) cfg.session_id = "s" + std::to_string(cfg.seed);
    const SessionResult session = RunSession(cfg);
    if (k == 0) report.transcript = session.transcript;
    ++report.sessions;
    const std::vector<int> k1 = session.KeyOf(kInitiatorActor);
    const std::vector<int> k2 = session.KeyOf(kResponderActor);
    if (k1 == k2) ++report.grids_agree;
    Rng rng(DeriveSeed(cfg.seed, "probe"));
    const std::size_t row = rng.NextWord() % cfg.ell;
    const std::size_t col = rng.NextWord() % cfg.ell;
    const ProbeReport probe = RepairResiliencyProbe(ParseRepairOffer(SentBy(session.transcript, kInitiatorActor).payload),
                                                    ParseRepairOffer(SentBy(session.transcript, kResponderActor).payload),
                                                    row, col, GridSharedKey{cfg.ell, k2}, session.master.mpk);
    report.predictions += probe.predictions;
    report.correct += probe.correct;
    report.failed_transfers += probe.failed_transfers;
  }
  return report;
}

OracleCheckReport RunOracleCheck(const BigInt& modulus) {
  const PublicModulus n(modulus);
  OracleCheckReport report;
  report.modulus = modulus;
  std::vector<BigInt> residues;
  for (BigInt x = 1; x < modulus; ++x) {
    if (Gcd(x, modulus) != 1) continue;
    residues.push_back(Mod(BigInt(x * x), modulus));
  }
  std::sort(residues.begin(), residues.end());
  residues.erase(std::unique(residues.begin(), residues.end()), residues.end());
  for (const BigInt& r : residues) {
    for (const BigInt& s : residues) {
      ++report.pairs;
      const std::string label = ToHex(r) + "," + ToHex(s) + ": ";
      const QuadEquation eq(r, s, n);
      try {
        const SolveOutcome out = SolveReportingLeaks(eq);
        if (!out.leaked_factors.empty()) ++report.leaking_pairs;
        for (const BigInt& f : out.leaked_factors) {
          if (f <= 1 || f >= modulus || modulus % f != 0) report.failures.push_back(label + "bad leaked factor");
        }
        const std::vector<QuadSolution> all = BruteForceSolve(eq);
        if (!Verify(eq, out.solution)) {
          report.failures.push_back(label + "solution does not verify");
        } else if (std::find(all.begin(), all.end(), out.solution) == all.end()) {
          report.failures.push_back(label + "solution missing from the exhaustive set");
        } else {
          ++report.in_brute_force;
        }
        try {
          if (!(Solve(eq) == out.solution)) report.failures.push_back(label + "strict solver disagrees");
        } catch (const FactorLeak& e) {
          if (out.leaked_factors.empty() || e.factor() != out.leaked_factors.front()) {
            report.failures.push_back(label + "strict solver leaked an unreported factor");
          }
        }
      } catch (const Error& e) {
        report.failures.push_back(label + std::string(ErrorKindName(e.kind())) + ": " + e.what());
      }
    }
  }
  return report;
}

double LogLogSlope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("slope needs at least two paired points");
  double mx = 0;
  double my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= 0 || y[i] <= 0) throw InvalidArgument("log-log slope needs positive values");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0;
  double sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0) throw InvalidArgument("slope needs two distinct x values");
  return sxy / sxx;
}

BenchReport RunScalingBench(const std::vector<std::size_t>& sizes, std::size_t ell, std::uint64_t seed,
                            std::size_t sessions_per_size) {
  if (ell < 2) throw ValidationError("bench needs ell >= 2");
  if (sessions_per_size < 1) throw ValidationError("bench needs at least one session per size");
  BenchReport report;
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t bits : sizes) {
    BenchPoint point;
    point.modulus_bits = bits;
    std::vector<double> times;
    for (std::size_t k = 0; k < sessions_per_size; ++k) {
      SessionConfig config;
      config.modulus_bits = bits;
      config.ell = ell;
      config.seed = seed + k;
      const ResiliencyReport r = RunResiliencyExperiment(config, 1);
      times.push_back(r.per_bit_seconds);
      point.all_match = point.all_match && r.match;
    }
    point.samples = times.size();
    point.per_bit_seconds = Median(times);
    xs.push_back(static_cast<double>(bits));
    ys.push_back(point.per_bit_seconds);
    report.points.push_back(point);
  }
  report.slope = LogLogSlope(xs, ys);
  return report;
}

std::string ToJson(const ResiliencyReport& report, bool with_timings) {
  Json j;
  j["session"] = report.session_id;
  j["modulus_bits"] = report.modulus_bits;
  j["ell"] = report.ell;
  j["leak_index"] = report.leak_index;
  j["recovered"] = BitString(report.recovered);
  j["honest"] = BitString(report.honest);
  j["match"] = report.match;
  if (with_timings) j["per_bit_seconds"] = report.per_bit_seconds;
  return j.dump();
}

std::string ToJson(const RepairProbeReport& report) {
  Json j;
  j["modulus_bits"] = report.modulus_bits;
  j["ell"] = report.ell;
  j["sessions"] = report.sessions;
  j["grids_agree"] = report.grids_agree;
  j["predictions"] = report.predictions;
  j["correct"] = report.correct;
  j["failed_transfers"] = report.failed_transfers;
  j["accuracy"] = report.accuracy();
  return j.dump();
}

std::string ToJson(const OracleCheckReport& report) {
  Json j;
  j["modulus"] = ToHex(report.modulus);
  j["pairs"] = report.pairs;
  j["in_brute_force"] = report.in_brute_force;
  j["leaking_pairs"] = report.leaking_pairs;
  j["failures"] = report.failures;
  return j.dump();
}

std::string ToJson(const BenchReport& report, bool with_timings) {
  Json j;
  Json points = Json::array();
  for (const BenchPoint& p : report.points) {
    Json e;
    e["modulus_bits"] = p.modulus_bits;
    e["samples"] = p.samples;
    if (with_timings) e["per_bit_seconds"] = p.per_bit_seconds;
    e["all_match"] = p.all_match;
    points.push_back(e);
  }
  j["points"] = points;
  if (with_timings) j["slope"] = report.slope;
  return j.dump();
}

}  // namespace emslab
