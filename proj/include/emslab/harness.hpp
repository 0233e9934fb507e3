#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "emslab/attacks.hpp"
#include "emslab/errors.hpp"
#include "emslab/protocol.hpp"
#include "emslab/repair.hpp"

namespace emslab {

enum class AdversaryMode { kNone, kPassive, kImpersonate };
enum class Variant { kEms, kRepair };

std::string_view AdversaryModeName(AdversaryMode mode);
AdversaryMode ParseAdversaryMode(std::string_view name);
std::string_view VariantName(Variant variant);
Variant ParseVariant(std::string_view name);

struct AdversaryHook {
  AdversaryMode mode = AdversaryMode::kNone;
  std::uint64_t seed = 0;
  // Identity the adversary poses as; required in impersonate mode.
  std::string victim_id;
};

// Actor labels used in transcripts and key lists.
inline constexpr std::string_view kInitiatorActor = "P1";
inline constexpr std::string_view kResponderActor = "P2";
inline constexpr std::string_view kAdversaryActor = "A";

struct SessionConfig {
  std::size_t modulus_bits = 64;
  std::size_t ell = 16;
  std::uint64_t seed = 0;
  std::string initiator_id = "alice";
  std::string responder_id = "bob";
  AdversaryHook hook;
  Variant variant = Variant::kEms;
  // Defaults to "s<seed>".
  std::string session_id;
};

// ValidationError on a bad configuration.
void Validate(const SessionConfig& config);

struct TranscriptRecord {
  std::uint64_t seq = 0;
  std::string session_id;
  std::string sender;
  std::string receiver;
  std::string kind;     // offer | forged_offer | note
  std::string payload;  // compact JSON object
  friend bool operator==(const TranscriptRecord&, const TranscriptRecord&) = default;
};

// One line, fields in declaration order, payload embedded as an object.
std::string SerializeRecord(const TranscriptRecord& record);
TranscriptRecord ParseRecord(std::string_view line);
// Newline-terminated lines.
std::string SerializeTranscript(const std::vector<TranscriptRecord>& records);
// ValidationError unless seq strictly increases within each session.
std::vector<TranscriptRecord> ParseTranscript(std::string_view text);

struct ActorKey {
  std::string actor;
  std::vector<int> bits;  // row-major grid for the repaired variant
  friend bool operator==(const ActorKey&, const ActorKey&) = default;
};

// Secret state of an honest party, enough to replay its derivation.
struct PartySecrets {
  std::string actor;
  IdentityKey key;            // ems
  SessionSecret secret;       // ems
  VectorIdentityKey vector_key;  // repair
};

struct SessionTimings {
  double setup_seconds = 0;
  double extract_seconds = 0;
  double offer_seconds = 0;
  double derive_seconds = 0;
};

struct SessionResult {
  SessionConfig config;
  MasterKeys master;
  std::vector<ActorKey> keys;
  std::vector<TranscriptRecord> transcript;
  std::vector<PartySecrets> parties;
  std::optional<ForgedOffer> forged;
  SessionTimings timings;

  // Empty when the actor took no part.
  std::vector<int> KeyOf(std::string_view actor) const;
};

// A failure inside a session, with the transcript up to that point.
class SessionError : public Error {
 public:
  SessionError(const Error& cause, std::vector<TranscriptRecord> transcript)
      : Error(cause.kind(), cause.what(), cause.leaked_factor()), transcript_(std::move(transcript)) {}
  const std::vector<TranscriptRecord>& transcript() const { return transcript_; }

 private:
  std::vector<TranscriptRecord> transcript_;
};

// setup -> (forgery) -> extract -> offers through the hook -> derivation.
// In impersonate mode the forgery is made before any identity key exists;
// the initiator's offer is withheld from the responder, who receives the
// forged one, and the responder's offer is forwarded to the initiator.
// Ends with one note record per actor holding its key.
SessionResult RunSession(const SessionConfig& config);

// Rebuilds every derived key from the transcript's offers and the actors'
// secrets. Notes are ignored.
std::vector<ActorKey> ReplayKeys(const std::vector<TranscriptRecord>& transcript, const MasterPublicKey& mpk,
                                 Variant variant, std::size_t ell, const std::vector<PartySecrets>& parties,
                                 const std::optional<ForgedOffer>& forged);

struct ResiliencyReport {
  std::string session_id;
  std::size_t modulus_bits = 0;
  std::size_t ell = 0;
  std::size_t leak_index = 0;
  std::vector<int> recovered;
  std::vector<int> honest;
  bool match = false;
  double per_bit_seconds = 0;
  // The honest session's transcript followed by the adversary's note.
  std::vector<TranscriptRecord> transcript;
};

// Honest ems session, then RecoverFullKey from bit leak_index of the
// responder's key. ValidationError when leak_index is outside 1..ell or
// the configuration is not an honest ems session.
ResiliencyReport RunResiliencyExperiment(const SessionConfig& config, std::size_t leak_index);

struct RepairProbeReport {
  std::size_t modulus_bits = 0;
  std::size_t ell = 0;
  std::size_t sessions = 0;
  std::size_t grids_agree = 0;
  std::size_t predictions = 0;
  std::size_t correct = 0;
  std::size_t failed_transfers = 0;
  // Transcript of the first session.
  std::vector<TranscriptRecord> transcript;

  double accuracy() const { return predictions == 0 ? 0.0 : static_cast<double>(correct) / predictions; }
};

// `sessions` repaired sessions with seeds config.seed, config.seed + 1, ...;
// in each, one cell drawn from the seed is leaked and probed.
RepairProbeReport RunRepairProbeExperiment(const SessionConfig& config, std::size_t sessions);

struct OracleCheckReport {
  BigInt modulus;
  std::size_t pairs = 0;
  std::size_t in_brute_force = 0;
  // Pairs whose solve ran into a factor of N before succeeding.
  std::size_t leaking_pairs = 0;
  std::vector<std::string> failures;  // "r,s: reason"
};

// Every (r, s) in QR(N)^2: the solver's answer verifies and belongs to the
// exhaustive solution set, leaked factors divide N properly, and the strict
// solver agrees or raises FactorLeak.
OracleCheckReport RunOracleCheck(const BigInt& modulus);

struct BenchPoint {
  std::size_t modulus_bits = 0;
  std::size_t samples = 0;
  double per_bit_seconds = 0;  // median over samples
  bool all_match = true;
};

struct BenchReport {
  std::vector<BenchPoint> points;
  double slope = 0;  // least squares of log(time) on log(modulus_bits)
};

inline const std::vector<std::size_t> kBenchSizes = {64, 128, 256, 384, 512};

BenchReport RunScalingBench(const std::vector<std::size_t>& sizes, std::size_t ell, std::uint64_t seed,
                            std::size_t sessions_per_size);

// Least-squares slope of log(y) on log(x).
double LogLogSlope(const std::vector<double>& x, const std::vector<double>& y);

// Timing fields are omitted when with_timings is false.
std::string ToJson(const ResiliencyReport& report, bool with_timings = true);
std::string ToJson(const RepairProbeReport& report);
std::string ToJson(const OracleCheckReport& report);
std::string ToJson(const BenchReport& report, bool with_timings = true);

}  // namespace emslab
