// emslab: command-line driver for the key agreement lab.
//
// Every run prints one JSON object on stdout. Exit status: 0 when all of the
// run's assertions hold, 1 when one fails, 2 on an error (bad flags or a
// library failure). Wall-clock figures appear only with --timings, and
// always in bench, so that other output is reproducible byte for byte.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "emslab/harness.hpp"

namespace {

using Json = nlohmann::ordered_json;
using namespace emslab;

struct Options {
  std::size_t modulus_bits = 64;
  std::size_t ell = 16;
  std::uint64_t seed = 0;
  std::string transcript_path;
  std::string variant = "ems";
  bool variant_given = false;
  bool timings = false;

  std::string id = "alice";
  std::string hook = "none";
  std::string victim;
  std::size_t leak_index = 1;
  std::size_t sessions = 50;
  std::vector<std::string> moduli = {"77", "221"};
  std::vector<std::size_t> sizes = kBenchSizes;
  double max_slope = 4.5;
};

class Run {
 public:
  Run(std::string command, const Options& opts) : opts_(opts) {
    out_["command"] = std::move(command);
    out_["status"] = "ok";
  }

  Json& out() { return out_; }

  void Check(const std::string& name, bool ok) {
    assertions_.push_back({{"name", name}, {"ok", ok}});
    if (!ok) out_["status"] = "fail";
  }

  void Transcript(const std::vector<TranscriptRecord>& records) {
    if (opts_.transcript_path.empty()) return;
    std::ofstream f(opts_.transcript_path, std::ios::binary | std::ios::trunc);
    if (!f) throw ValidationError("cannot write transcript to " + opts_.transcript_path);
    f << SerializeTranscript(records);
    out_["transcript"] = {{"path", opts_.transcript_path}, {"records", records.size()}};
  }

  int Finish() {
    out_["assertions"] = assertions_;
    std::cout << out_.dump() << '\n';
    return out_["status"] == "ok" ? 0 : 1;
  }

 private:
  const Options& opts_;
  Json out_;
  Json assertions_ = Json::array();
};

Json ConfigJson(const SessionConfig& c) {
  return {{"modulus_bits", c.modulus_bits},
          {"ell", c.ell},
          {"seed", c.seed},
          {"variant", VariantName(c.variant)},
          {"hook", AdversaryModeName(c.hook.mode)},
          {"initiator", c.initiator_id},
          {"responder", c.responder_id}};
}

Json KeysJson(const SessionResult& r) {
  Json keys = Json::object();
  for (const ActorKey& k : r.keys) keys[k.actor] = BitString(k.bits);
  return keys;
}

Json MpkJson(const MasterPublicKey& mpk) {
  return {{"n", ToHex(mpk.n())}, {"mu", ToHex(mpk.mu)}, {"hash_policy", mpk.hash_policy}};
}

Json TimingsJson(const SessionTimings& t) {
  return {{"setup_seconds", t.setup_seconds},
          {"extract_seconds", t.extract_seconds},
          {"offer_seconds", t.offer_seconds},
          {"derive_seconds", t.derive_seconds}};
}

void RequireNoTranscript(const Options& opts, const std::string& command) {
  if (!opts.transcript_path.empty()) throw ValidationError(command + " produces no transcript");
}

Variant VariantFor(const Options& opts, Variant required, const std::string& command) {
  if (opts.variant_given && ParseVariant(opts.variant) != required) {
    throw ValidationError(command + " runs the " + std::string(VariantName(required)) + " variant only");
  }
  return required;
}

SessionConfig BaseConfig(const Options& opts, Variant variant) {
  SessionConfig c;
  c.modulus_bits = opts.modulus_bits;
  c.ell = opts.ell;
  c.seed = opts.seed;
  c.variant = variant;
  return c;
}

int CmdSetup(const Options& opts) {
  RequireNoTranscript(opts, "setup");
  Run run("setup", opts);
  const MasterKeys keys = emslab::Setup(SetupParams{opts.modulus_bits, opts.ell, opts.seed});
  run.out()["mpk"] = MpkJson(keys.mpk);
  run.out()["msk"] = {{"p", ToHex(keys.msk.factors.p())}, {"q", ToHex(keys.msk.factors.q())}};
  run.Check("modulus has the requested size", BitLength(keys.mpk.n()) == opts.modulus_bits);
  const TrapdoorFactors& f = keys.msk.factors;
  run.Check("mu is a non-square modulo both primes",
            Legendre(keys.mpk.mu, f.p()).value() == -1 && Legendre(keys.mpk.mu, f.q()).value() == -1);
  return run.Finish();
}

int CmdExtract(const Options& opts) {
  RequireNoTranscript(opts, "extract");
  Run run("extract", opts);
  const MasterKeys keys = emslab::Setup(SetupParams{opts.modulus_bits, opts.ell, opts.seed});
  const BigInt& n = keys.mpk.n();
  Rng rng(DeriveSeed(opts.seed, kInitiatorActor));
  run.out()["mpk"] = MpkJson(keys.mpk);
  std::vector<IdentityEntry> entries;
  if (ParseVariant(opts.variant) == Variant::kRepair) {
    entries = RepairExtract(keys.msk, keys.mpk, opts.id, opts.ell, rng).entries;
  } else {
    const IdentityKey k = Extract(keys.msk, keys.mpk, opts.id, rng);
    entries.push_back({k.r, k.a, k.root});
  }
  Json list = Json::array();
  bool roots_ok = true;
  for (const IdentityEntry& e : entries) {
    list.push_back({{"r", ToHex(e.r)}, {"a", e.a}, {"root", ToHex(e.root)}});
    const BigInt target = Mod(BigInt(PowMod(keys.mpk.mu, e.a, n) * e.r), n);
    roots_ok = roots_ok && PowMod(e.root, 2, n) == target;
  }
  run.out()["id"] = opts.id;
  run.out()["variant"] = opts.variant;
  run.out()["keys"] = list;
  run.Check("root squares to mu^a H(id)", roots_ok);
  return run.Finish();
}

int CmdExchange(const Options& opts) {
  SessionConfig c = BaseConfig(opts, ParseVariant(opts.variant));
  c.hook.mode = ParseAdversaryMode(opts.hook);
  if (c.hook.mode == AdversaryMode::kImpersonate) throw ValidationError("use attack-mitm for impersonation");
  c.hook.seed = opts.seed;
  Run run("exchange", opts);
  const SessionResult r = RunSession(c);
  run.out()["config"] = ConfigJson(r.config);
  run.out()["mpk"] = MpkJson(r.master.mpk);
  run.out()["keys"] = KeysJson(r);
  if (opts.timings) run.out()["timings"] = TimingsJson(r.timings);
  run.Transcript(r.transcript);
  run.Check("initiator key equals responder key", r.KeyOf(kInitiatorActor) == r.KeyOf(kResponderActor));
  return run.Finish();
}

int CmdAttackMitm(const Options& opts) {
  SessionConfig c = BaseConfig(opts, VariantFor(opts, Variant::kEms, "attack-mitm"));
  c.hook = {AdversaryMode::kImpersonate, opts.seed, opts.victim.empty() ? c.initiator_id : opts.victim};
  Run run("attack-mitm", opts);
  const SessionResult r = RunSession(c);
  run.out()["config"] = ConfigJson(r.config);
  run.out()["victim"] = c.hook.victim_id;
  run.out()["mpk"] = MpkJson(r.master.mpk);
  run.out()["keys"] = KeysJson(r);
  run.out()["initiator_differs"] = r.KeyOf(kInitiatorActor) != r.KeyOf(kResponderActor);
  if (opts.timings) run.out()["timings"] = TimingsJson(r.timings);
  run.Transcript(r.transcript);
  run.Check("adversary key equals responder key", r.KeyOf(kAdversaryActor) == r.KeyOf(kResponderActor));
  return run.Finish();
}

int CmdAttackResiliency(const Options& opts) {
  const SessionConfig c = BaseConfig(opts, VariantFor(opts, Variant::kEms, "attack-resiliency"));
  Run run("attack-resiliency", opts);
  const ResiliencyReport r = RunResiliencyExperiment(c, opts.leak_index);
  run.out()["report"] = Json::parse(ToJson(r, opts.timings));
  run.Transcript(r.transcript);
  run.Check("recovered key equals honest key", r.match);
  return run.Finish();
}

int CmdRepairExchange(const Options& opts) {
  const SessionConfig c = BaseConfig(opts, VariantFor(opts, Variant::kRepair, "repair-exchange"));
  Run run("repair-exchange", opts);
  const SessionResult r = RunSession(c);
  run.out()["config"] = ConfigJson(r.config);
  run.out()["mpk"] = MpkJson(r.master.mpk);
  run.out()["keys"] = KeysJson(r);
  if (opts.timings) run.out()["timings"] = TimingsJson(r.timings);
  run.Transcript(r.transcript);
  run.Check("initiator grid equals responder grid", r.KeyOf(kInitiatorActor) == r.KeyOf(kResponderActor));
  return run.Finish();
}

int CmdRepairProbe(const Options& opts) {
  const SessionConfig c = BaseConfig(opts, VariantFor(opts, Variant::kRepair, "repair-probe"));
  Run run("repair-probe", opts);
  const RepairProbeReport r = RunRepairProbeExperiment(c, opts.sessions);
  run.out()["report"] = Json::parse(ToJson(r));
  run.Transcript(r.transcript);
  run.Check("every grid agrees", r.grids_agree == r.sessions);
  // Below 200 predictions the band is too wide to mean anything.
  if (r.predictions >= 200) {
    run.Check("probe accuracy within [0.40, 0.60]", r.accuracy() >= 0.40 && r.accuracy() <= 0.60);
  }
  return run.Finish();
}

int CmdOracleCheck(const Options& opts) {
  RequireNoTranscript(opts, "oracle-check");
  Run run("oracle-check", opts);
  Json reports = Json::array();
  for (const std::string& m : opts.moduli) {
    BigInt n;
    if (n.set_str(m, 10) != 0) throw ValidationError("modulus must be a decimal integer: " + m);
    const OracleCheckReport r = RunOracleCheck(n);
    reports.push_back(Json::parse(ToJson(r)));
    run.Check("solver matches exhaustive search mod " + m, r.failures.empty() && r.in_brute_force == r.pairs);
  }
  run.out()["reports"] = reports;
  return run.Finish();
}

int CmdBench(const Options& opts) {
  RequireNoTranscript(opts, "bench");
  Run run("bench", opts);
  const BenchReport r = RunScalingBench(opts.sizes, opts.ell, opts.seed, opts.sessions);
  run.out()["ell"] = opts.ell;
  run.out()["report"] = Json::parse(ToJson(r));
  bool all_match = true;
  for (const BenchPoint& p : r.points) all_match = all_match && p.all_match;
  run.Check("every recovery exact", all_match);
  run.out()["max_slope"] = opts.max_slope;
  run.Check("log-log slope within bound", r.slope <= opts.max_slope);
  return run.Finish();
}

int ReportError(const std::string& command, const Error& e, const std::vector<TranscriptRecord>* transcript,
                const Options& opts) {
  Json out;
  out["command"] = command;
  out["status"] = "error";
  out["error"] = {{"kind", ErrorKindName(e.kind())}, {"message", e.what()}};
  if (e.leaks_factor()) out["error"]["leaked_factor"] = ToHex(*e.leaked_factor());
  if (transcript != nullptr) {
    out["transcript_records"] = transcript->size();
    if (!opts.transcript_path.empty()) {
      std::ofstream f(opts.transcript_path, std::ios::binary | std::ios::trunc);
      if (f) f << SerializeTranscript(*transcript);
    }
  }
  std::cout << out.dump() << '\n';
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Identity-based key agreement lab: sessions, attacks, repaired variant"};
  app.require_subcommand(1);
  app.fallthrough();
  Options opts;

  app.add_option("--modulus-bits", opts.modulus_bits, "Bit length of N")->capture_default_str();
  app.add_option("--ell", opts.ell, "Key length (grid side for the repaired variant)")->capture_default_str();
  app.add_option("--seed", opts.seed, "Master seed")->capture_default_str();
  app.add_option("--transcript", opts.transcript_path, "Write the session transcript here");
  CLI::Option* variant = app.add_option("--variant", opts.variant, "ems or repair")->capture_default_str();
  app.add_flag("--timings", opts.timings, "Include wall-clock timings");

  CLI::App* setup = app.add_subcommand("setup", "Generate master keys");
  CLI::App* extract = app.add_subcommand("extract", "Extract an identity key");
  extract->add_option("--id", opts.id, "Identity")->capture_default_str();
  CLI::App* exchange = app.add_subcommand("exchange", "Run one session between two honest parties");
  exchange->add_option("--hook", opts.hook, "none or passive")->capture_default_str();
  CLI::App* mitm = app.add_subcommand("attack-mitm", "Impersonate the initiator to the responder");
  mitm->add_option("--victim", opts.victim, "Identity to impersonate (default: the initiator's)");
  CLI::App* resiliency = app.add_subcommand("attack-resiliency", "Recover a whole key from one leaked bit");
  resiliency->add_option("--leak-index", opts.leak_index, "1-based index of the leaked bit")->capture_default_str();
  CLI::App* repair_exchange = app.add_subcommand("repair-exchange", "Run one session of the repaired variant");
  CLI::App* repair_probe = app.add_subcommand("repair-probe", "Probe the repaired variant with one leaked cell");
  repair_probe->add_option("--sessions", opts.sessions, "Number of sessions")->capture_default_str();
  CLI::App* oracle = app.add_subcommand("oracle-check", "Compare the solver with exhaustive search");
  oracle->add_option("--modulus", opts.moduli, "Small moduli to check")->capture_default_str();
  CLI::App* bench = app.add_subcommand("bench", "Per-bit recovery time against modulus size");
  bench->add_option("--sizes", opts.sizes, "Modulus sizes")->capture_default_str();
  bench->add_option("--sessions", opts.sessions, "Sessions per size")->capture_default_str();
  bench->add_option("--max-slope", opts.max_slope, "Largest accepted log-log slope")->capture_default_str();

  std::string command = "emslab";
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    Json out;
    out["command"] = command;
    out["status"] = "error";
    out["error"] = {{"kind", "Usage"}, {"message", e.what()}};
    std::cout << out.dump() << '\n';
    return 2;
  }
  opts.variant_given = variant->count() > 0;
  if (bench->parsed() && app.get_option("--modulus-bits")->count() > 0) {
    std::cout << Json{{"command", "bench"}, {"status", "error"},
                      {"error", {{"kind", "ValidationError"}, {"message", "bench takes --sizes, not --modulus-bits"}}}}
                     .dump()
              << '\n';
    return 2;
  }
  if (bench->parsed() && bench->get_option("--sessions")->count() == 0) opts.sessions = 3;

  const std::vector<std::pair<CLI::App*, int (*)(const Options&)>> commands = {
      {setup, CmdSetup},           {extract, CmdExtract},
      {exchange, CmdExchange},     {mitm, CmdAttackMitm},
      {resiliency, CmdAttackResiliency}, {repair_exchange, CmdRepairExchange},
      {repair_probe, CmdRepairProbe}, {oracle, CmdOracleCheck},
      {bench, CmdBench}};
  for (const auto& [sub, fn] : commands) {
    if (!sub->parsed()) continue;
    command = sub->get_name();
    try {
      return fn(opts);
    } catch (const SessionError& e) {
      return ReportError(command, e, &e.transcript(), opts);
    } catch (const Error& e) {
      return ReportError(command, e, nullptr, opts);
    }
  }
  return 2;
}
