#include "kfol/error.hpp"

namespace kfol {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::UnknownCharacter: return "UnknownCharacter";
    case Errc::UnterminatedIdentifier: return "UnterminatedIdentifier";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::UnboundVariable: return "UnboundVariable";
    case Errc::DuplicateVariable: return "DuplicateVariable";
    case Errc::NestedQuantifier: return "NestedQuantifier";
    case Errc::UnknownPredicate: return "UnknownPredicate";
    case Errc::ArityMismatch: return "ArityMismatch";
    case Errc::MissingFile: return "MissingFile";
    case Errc::MalformedInput: return "MalformedInput";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::DanglingSampleId: return "DanglingSampleId";
    case Errc::DuplicateSampleId: return "DuplicateSampleId";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::DuplicateTuple: return "DuplicateTuple";
    case Errc::DomainError: return "DomainError";
    case Errc::NonFinite: return "NonFinite";
    case Errc::GroundingTooLarge: return "GroundingTooLarge";
    case Errc::UnknownGuardPredicate: return "UnknownGuardPredicate";
    case Errc::MissingAtomValue: return "MissingAtomValue";
    case Errc::EmptyLabeledSet: return "EmptyLabeledSet";
    case Errc::SupportCapExceeded: return "SupportCapExceeded";
    case Errc::DivergenceDetected: return "DivergenceDetected";
    case Errc::NonFiniteLoss: return "NonFiniteLoss";
    case Errc::ModelMismatch: return "ModelMismatch";
  }
  return "Unknown";
}

}  // namespace kfol
