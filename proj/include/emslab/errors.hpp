#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace emslab {

enum class ErrorKind {
  kInvalidArgument,
  kNonResidue,
  kHashFailure,
  kSearchExhausted,
  kSolveFailure,
  kFactorLeak,
  kNonInvertible,
  kBoundExceeded,
  kZeroSymbol,
  kContractViolation,
  kValidation,
};

std::string_view ErrorKindName(ErrorKind kind);

// Base of every failure raised by the library. A proper factor of the
// modulus is attached whenever the failing gcd exposed one.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what,
        std::optional<mpz_class> leaked_factor = std::nullopt)
      : std::runtime_error(what), kind_(kind), leaked_factor_(std::move(leaked_factor)) {}

  ErrorKind kind() const { return kind_; }
  bool leaks_factor() const { return leaked_factor_.has_value(); }
  const std::optional<mpz_class>& leaked_factor() const { return leaked_factor_; }

 private:
  ErrorKind kind_;
  std::optional<mpz_class> leaked_factor_;
};

#define EMSLAB_DEFINE_ERROR(Name, Kind)                                   \
  class Name : public Error {                                             \
   public:                                                                \
    explicit Name(const std::string& what,                                \
                  std::optional<mpz_class> factor = std::nullopt)         \
        : Error(ErrorKind::Kind, what, std::move(factor)) {}              \
  };

EMSLAB_DEFINE_ERROR(InvalidArgument, kInvalidArgument)
EMSLAB_DEFINE_ERROR(NonResidue, kNonResidue)
EMSLAB_DEFINE_ERROR(HashFailure, kHashFailure)
EMSLAB_DEFINE_ERROR(SearchExhausted, kSearchExhausted)
EMSLAB_DEFINE_ERROR(SolveFailure, kSolveFailure)
EMSLAB_DEFINE_ERROR(NonInvertible, kNonInvertible)
EMSLAB_DEFINE_ERROR(BoundExceeded, kBoundExceeded)
EMSLAB_DEFINE_ERROR(ZeroSymbol, kZeroSymbol)
EMSLAB_DEFINE_ERROR(ContractViolation, kContractViolation)
EMSLAB_DEFINE_ERROR(ValidationError, kValidation)

#undef EMSLAB_DEFINE_ERROR

// The modulus was factored by accident: some gcd with N was proper.
class FactorLeak : public Error {
 public:
  FactorLeak(const std::string& what, mpz_class factor)
      : Error(ErrorKind::kFactorLeak, what, std::move(factor)) {}

  const mpz_class& factor() const { return *leaked_factor(); }
};

}  // namespace emslab
