#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace kfol {

enum class Errc {
  // fol frontend
  UnknownCharacter,
  UnterminatedIdentifier,
  SyntaxError,
  UnboundVariable,
  DuplicateVariable,
  NestedQuantifier,
  UnknownPredicate,
  ArityMismatch,
  // data
  MissingFile,
  MalformedInput,
  DimensionMismatch,
  DanglingSampleId,
  DuplicateSampleId,
  InvalidConfig,
  // kernels
  LengthMismatch,
  DuplicateTuple,
  // logic / grounding
  DomainError,
  NonFinite,
  GroundingTooLarge,
  UnknownGuardPredicate,
  MissingAtomValue,
  // objective / training
  EmptyLabeledSet,
  SupportCapExceeded,
  DivergenceDetected,
  NonFiniteLoss,
  ModelMismatch,
};

std::string_view errc_name(Errc code);

/// Every failure raised by the library. `position()` is set for errors that
/// point into clause source text (byte offset).
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what, std::optional<std::size_t> position = std::nullopt)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code), position_(position) {}

  Errc code() const noexcept { return code_; }
  std::optional<std::size_t> position() const noexcept { return position_; }

 private:
  Errc code_;
  std::optional<std::size_t> position_;
};

}  // namespace kfol
