#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hyperseq {

// Every failure the library reports. The CLI maps families to exit codes.
enum class Errc {
  // parse family
  SyntaxError,
  DivisionByConstantZero,
  // horizon family
  AmbiguousAtHorizon,
  ExhaustedAtHorizon,
  UndecidableOnSampled,
  SearchBoundExceeded,
  NotDecidedAtBound,
  MembershipUndecided,
  RepresentationLimit,
  // precondition family
  EmptySet,
  UndefinedAtIndex,
  MixedOracles,
  DivisionByZeroClass,
  UndefinedClass,
  NotFinite,
  PreconditionFailed,
  PrefixTooShort,
  IncompatibleResidue,
  ConflictsWithLedger,
  NotNested,
  EmptyLevel,
  NotBounded,
  FIPViolated,
  InvalidArgument,
  // internal family
  InconsistentLedger,
  VerificationFailed,
};

enum class ErrorFamily { Parse, Horizon, Precondition, Internal };

constexpr ErrorFamily family_of(Errc code) noexcept {
  switch (code) {
    case Errc::SyntaxError:
    case Errc::DivisionByConstantZero:
      return ErrorFamily::Parse;
    case Errc::AmbiguousAtHorizon:
    case Errc::ExhaustedAtHorizon:
    case Errc::UndecidableOnSampled:
    case Errc::SearchBoundExceeded:
    case Errc::NotDecidedAtBound:
    case Errc::MembershipUndecided:
    case Errc::RepresentationLimit:
      return ErrorFamily::Horizon;
    case Errc::InconsistentLedger:
    case Errc::VerificationFailed:
      return ErrorFamily::Internal;
    default:
      return ErrorFamily::Precondition;
  }
}

constexpr std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::DivisionByConstantZero: return "DivisionByConstantZero";
    case Errc::AmbiguousAtHorizon: return "AmbiguousAtHorizon";
    case Errc::ExhaustedAtHorizon: return "ExhaustedAtHorizon";
    case Errc::UndecidableOnSampled: return "UndecidableOnSampled";
    case Errc::SearchBoundExceeded: return "SearchBoundExceeded";
    case Errc::NotDecidedAtBound: return "NotDecidedAtBound";
    case Errc::MembershipUndecided: return "MembershipUndecided";
    case Errc::RepresentationLimit: return "RepresentationLimit";
    case Errc::EmptySet: return "EmptySet";
    case Errc::UndefinedAtIndex: return "UndefinedAtIndex";
    case Errc::MixedOracles: return "MixedOracles";
    case Errc::DivisionByZeroClass: return "DivisionByZeroClass";
    case Errc::UndefinedClass: return "UndefinedClass";
    case Errc::NotFinite: return "NotFinite";
    case Errc::PreconditionFailed: return "PreconditionFailed";
    case Errc::PrefixTooShort: return "PrefixTooShort";
    case Errc::IncompatibleResidue: return "IncompatibleResidue";
    case Errc::ConflictsWithLedger: return "ConflictsWithLedger";
    case Errc::NotNested: return "NotNested";
    case Errc::EmptyLevel: return "EmptyLevel";
    case Errc::NotBounded: return "NotBounded";
    case Errc::FIPViolated: return "FIPViolated";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::InconsistentLedger: return "InconsistentLedger";
    case Errc::VerificationFailed: return "VerificationFailed";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }
  ErrorFamily family() const noexcept { return family_of(code_); }

 private:
  Errc code_;
};

// Parse errors carry the byte offset into the input text.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, const std::string& what, Errc code = Errc::SyntaxError)
      : Error(code, "at byte " + std::to_string(offset) + ": " + what), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace hyperseq
