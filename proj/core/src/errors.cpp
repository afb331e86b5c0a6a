#include "alp/errors.hpp"

namespace alp {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::UnsupportedFamilyCombination: return "UnsupportedFamilyCombination";
    case ErrorKind::ToleranceNotReached: return "ToleranceNotReached";
    case ErrorKind::InfiniteMeasureSet: return "InfiniteMeasureSet";
    case ErrorKind::BruteForceTooLarge: return "BruteForceTooLarge";
    case ErrorKind::MissingLimit: return "MissingLimit";
    case ErrorKind::DominationViolated: return "DominationViolated";
    case ErrorKind::ImplicationViolation: return "ImplicationViolation";
    case ErrorKind::NotMember: return "NotMember";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::UnknownEntry: return "UnknownEntry";
    case ErrorKind::ParamOutOfDomain: return "ParamOutOfDomain";
  }
  return "Error";
}

}  // namespace alp
