#include "gradman/errors.hpp"

namespace gradman {

const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::NotAdmissible: return "NotAdmissible";
    case ErrorKind::Unsupported: return "Unsupported";
    case ErrorKind::DegreeOverflow: return "DegreeOverflow";
    case ErrorKind::NotInvolutive: return "NotInvolutive";
    case ErrorKind::NonConstantSymbols: return "NonConstantSymbols";
    case ErrorKind::NonPolynomialFlatFrame: return "NonPolynomialFlatFrame";
    case ErrorKind::HypothesisFailed: return "HypothesisFailed";
  }
  return "Unknown";
}

}  // namespace gradman
