#include "emslab/errors.hpp"

namespace emslab {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kNonResidue: return "NonResidue";
    case ErrorKind::kHashFailure: return "HashFailure";
    case ErrorKind::kSearchExhausted: return "SearchExhausted";
    case ErrorKind::kSolveFailure: return "SolveFailure";
    case ErrorKind::kFactorLeak: return "FactorLeak";
    case ErrorKind::kNonInvertible: return "NonInvertible";
    case ErrorKind::kBoundExceeded: return "BoundExceeded";
    case ErrorKind::kZeroSymbol: return "ZeroSymbol";
    case ErrorKind::kContractViolation: return "ContractViolation";
    case ErrorKind::kValidation: return "ValidationError";
  }
  return "Unknown";
}

}  // namespace emslab
