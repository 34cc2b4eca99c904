#pragma once

#include <stdexcept>
#include <string>

namespace soskit {

/// Failure categories raised by the library. Outcomes that are part of a
/// normal run (iteration limits, rounding failures, missing witnesses) are
/// reported through result types instead.
enum class Errc {
  DegreeMismatch,
  ArityMismatch,
  ParseError,
  Io,
  OddDegree,
  NotSymmetric,
  IndexOutOfBasis,
  KOutOfRange,
  SubsetExplosion,
  SupportExplosion,
  BlockNotPsd,
  WrongShape,
  OddSum,
  NonIntegralBarycenter,
  LambdaSumNotOne,
  OddAlpha,
  ShapeError,
  MonomialCollision,
  TooManyTerms,
  ConstraintViolation,
  DegenerateG,
  NotBinary,
  ZeroForm,
  BadParams,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::DegreeMismatch: return "DegreeMismatch";
    case Errc::ArityMismatch: return "ArityMismatch";
    case Errc::ParseError: return "ParseError";
    case Errc::Io: return "Io";
    case Errc::OddDegree: return "OddDegree";
    case Errc::NotSymmetric: return "NotSymmetric";
    case Errc::IndexOutOfBasis: return "IndexOutOfBasis";
    case Errc::KOutOfRange: return "KOutOfRange";
    case Errc::SubsetExplosion: return "SubsetExplosion";
    case Errc::SupportExplosion: return "SupportExplosion";
    case Errc::BlockNotPsd: return "BlockNotPsd";
    case Errc::WrongShape: return "WrongShape";
    case Errc::OddSum: return "OddSum";
    case Errc::NonIntegralBarycenter: return "NonIntegralBarycenter";
    case Errc::LambdaSumNotOne: return "LambdaSumNotOne";
    case Errc::OddAlpha: return "OddAlpha";
    case Errc::ShapeError: return "ShapeError";
    case Errc::MonomialCollision: return "MonomialCollision";
    case Errc::TooManyTerms: return "TooManyTerms";
    case Errc::ConstraintViolation: return "ConstraintViolation";
    case Errc::DegenerateG: return "DegenerateG";
    case Errc::NotBinary: return "NotBinary";
    case Errc::ZeroForm: return "ZeroForm";
    case Errc::BadParams: return "BadParams";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace soskit
