#pragma once

#include <stdexcept>
#include <string>

namespace grassrisk {

/// Machine-readable failure categories raised by the library.
enum class ErrorCode {
  RankDeficient,
  DimensionMismatch,
  CutLocus,
  AnchorMismatch,
  NotOrthogonalComplement,
  NoEigengap,
  NotMinimizer,
  AngleTooLarge,
  DomainError,
  InvalidP,
  EmptyData,
  InvalidSpike,
  InvalidGraph,
  InvalidModel,
  IoError,
  ParseError,
  NonFiniteValue,
  EigenbasisMismatch,
  DegenerateSpectrum,
  NoConvergence,
  InsufficientData,
  DeltaOutOfRange,
  NotPsd,
  NumericalFailure,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::CutLocus: return "CutLocus";
    case ErrorCode::AnchorMismatch: return "AnchorMismatch";
    case ErrorCode::NotOrthogonalComplement: return "NotOrthogonalComplement";
    case ErrorCode::NoEigengap: return "NoEigengap";
    case ErrorCode::NotMinimizer: return "NotMinimizer";
    case ErrorCode::AngleTooLarge: return "AngleTooLarge";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::InvalidP: return "InvalidP";
    case ErrorCode::EmptyData: return "EmptyData";
    case ErrorCode::InvalidSpike: return "InvalidSpike";
    case ErrorCode::InvalidGraph: return "InvalidGraph";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::EigenbasisMismatch: return "EigenbasisMismatch";
    case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::DeltaOutOfRange: return "DeltaOutOfRange";
    case ErrorCode::NotPsd: return "NotPsd";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
  }
  return "UnknownError";
}

}  // namespace grassrisk
