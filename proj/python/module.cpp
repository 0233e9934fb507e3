#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <utility>
#include <vector>

#include "emslab/harness.hpp"

namespace py = pybind11;

// Python int <-> mpz_class through a base-16 string.
namespace pybind11::detail {
template <>
struct type_caster<mpz_class> {
  PYBIND11_TYPE_CASTER(mpz_class, const_name("int"));

  bool load(handle src, bool) {
    if (!PyLong_Check(src.ptr())) return false;
    const std::string hex = py::str(py::module_::import("builtins").attr("format")(src, "x"));
    return value.set_str(hex, 16) == 0;
  }

  static handle cast(const mpz_class& v, return_value_policy, handle) {
    const std::string hex = v.get_str(16);
    return PyLong_FromString(hex.c_str(), nullptr, 16);
  }
};
}  // namespace pybind11::detail

namespace {

using namespace emslab;

using Point = std::pair<BigInt, BigInt>;

Point ToPoint(const QuadSolution& s) { return {s.x, s.y}; }

std::string BitsOf(const std::vector<int>& bits) { return BitString(bits); }

py::dict SessionDict(const SessionResult& r) {
  py::dict keys;
  for (const ActorKey& k : r.keys) keys[py::str(k.actor)] = BitsOf(k.bits);
  py::dict out;
  out["session_id"] = r.config.session_id;
  out["n"] = r.master.mpk.n();
  out["mu"] = r.master.mpk.mu;
  out["keys"] = keys;
  out["transcript"] = SerializeTranscript(r.transcript);
  return out;
}

SessionConfig MakeConfig(std::size_t modulus_bits, std::size_t ell, std::uint64_t seed, const std::string& variant,
                         const std::string& hook, const std::string& victim) {
  SessionConfig c;
  c.modulus_bits = modulus_bits;
  c.ell = ell;
  c.seed = seed;
  c.variant = ParseVariant(variant);
  c.hook = {ParseAdversaryMode(hook), seed, victim};
  return c;
}

}  // namespace

PYBIND11_MODULE(_emslab, m) {
  m.doc() = "Identity-based key agreement lab: number theory, sessions, attacks";

  static py::exception<Error> error(m, "Error");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object factor = py::none();
      if (e.leaks_factor()) factor = py::cast(*e.leaked_factor());
      py::tuple args = py::make_tuple(std::string(ErrorKindName(e.kind())), e.what(), factor);
      PyErr_SetObject(error.ptr(), args.ptr());
    }
  });

  m.attr("HASH_POLICY") = std::string(kHashPolicy);

  m.def("jacobi", [](const BigInt& x, const BigInt& n) { return Jacobi(x, n).value(); }, py::arg("x"), py::arg("n"));
  m.def("is_probable_prime", [](const BigInt& n) { return IsProbablePrime(n); }, py::arg("n"));
  m.def("sqrt_mod_prime", [](const BigInt& a, const BigInt& p) { return SqrtModPrime(a, p); }, py::arg("a"),
        py::arg("p"));
  m.def("hash_to_jacobi_one", [](const std::string& id, const BigInt& n) { return HashToJacobiOne(id, PublicModulus(n)); },
        py::arg("id"), py::arg("n"));

  m.def("solve", [](const BigInt& r, const BigInt& s, const BigInt& n) { return ToPoint(Solve(QuadEquation(r, s, n))); },
        py::arg("r"), py::arg("s"), py::arg("n"), "Canonical solution of r x^2 + s y^2 = 1 mod n.");
  m.def(
      "solve_reporting_leaks",
      [](const BigInt& r, const BigInt& s, const BigInt& n) {
        const SolveOutcome out = SolveReportingLeaks(QuadEquation(r, s, n));
        return std::make_pair(ToPoint(out.solution), out.leaked_factors);
      },
      py::arg("r"), py::arg("s"), py::arg("n"));
  m.def(
      "brute_force_solve",
      [](const BigInt& r, const BigInt& s, const BigInt& n) {
        std::vector<Point> out;
        for (const QuadSolution& sol : BruteForceSolve(QuadEquation(r, s, n))) out.push_back(ToPoint(sol));
        return out;
      },
      py::arg("r"), py::arg("s"), py::arg("n"));
  m.def(
      "compose",
      [](const BigInt& a, const Point& first, const Point& second, const BigInt& n) {
        return ToPoint(Compose(a, {first.first, first.second}, {second.first, second.second}, PublicModulus(n)));
      },
      py::arg("a"), py::arg("first"), py::arg("second"), py::arg("n"));

  m.def(
      "setup",
      [](std::size_t modulus_bits, std::uint64_t seed) {
        const MasterKeys k = emslab::Setup(SetupParams{modulus_bits, 1, seed});
        py::dict out;
        out["n"] = k.mpk.n();
        out["mu"] = k.mpk.mu;
        out["p"] = k.msk.factors.p();
        out["q"] = k.msk.factors.q();
        out["hash_policy"] = k.mpk.hash_policy;
        return out;
      },
      py::arg("modulus_bits"), py::arg("seed"));

  m.def(
      "run_session",
      [](std::size_t modulus_bits, std::size_t ell, std::uint64_t seed, const std::string& variant,
         const std::string& hook, const std::string& victim) {
        return SessionDict(RunSession(MakeConfig(modulus_bits, ell, seed, variant, hook, victim)));
      },
      py::arg("modulus_bits") = 64, py::arg("ell") = 16, py::arg("seed") = 0, py::arg("variant") = "ems",
      py::arg("hook") = "none", py::arg("victim") = "");

  m.def(
      "run_resiliency_experiment",
      [](std::size_t modulus_bits, std::size_t ell, std::uint64_t seed, std::size_t leak_index) {
        return ToJson(RunResiliencyExperiment(MakeConfig(modulus_bits, ell, seed, "ems", "none", ""), leak_index));
      },
      py::arg("modulus_bits"), py::arg("ell"), py::arg("seed"), py::arg("leak_index"));
  m.def(
      "run_repair_probe",
      [](std::size_t modulus_bits, std::size_t ell, std::uint64_t seed, std::size_t sessions) {
        return ToJson(RunRepairProbeExperiment(MakeConfig(modulus_bits, ell, seed, "repair", "none", ""), sessions));
      },
      py::arg("modulus_bits"), py::arg("ell"), py::arg("seed"), py::arg("sessions"));
  m.def("oracle_check", [](const BigInt& n) { return ToJson(RunOracleCheck(n)); }, py::arg("n"));
  m.def(
      "run_scaling_bench",
      [](const std::vector<std::size_t>& sizes, std::size_t ell, std::uint64_t seed, std::size_t sessions) {
        return ToJson(RunScalingBench(sizes, ell, seed, sessions));
      },
      py::arg("sizes"), py::arg("ell"), py::arg("seed"), py::arg("sessions_per_size"));
  m.def(
      "parse_transcript",
      [](const std::string& text) {
        py::list out;
        for (const TranscriptRecord& r : ParseTranscript(text)) {
          py::dict d;
          d["seq"] = r.seq;
          d["session"] = r.session_id;
          d["sender"] = r.sender;
          d["receiver"] = r.receiver;
          d["kind"] = r.kind;
          d["payload"] = r.payload;
          out.append(d);
        }
        return out;
      },
      py::arg("text"));
}
