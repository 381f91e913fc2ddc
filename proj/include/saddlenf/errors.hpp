#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace saddlenf {

enum class ErrorKind {
  InvalidArgument,
  DivisionByZeroInterval,
  DomainError,
  AmbiguousInteger,
  ParseError,
  NotAFixedPoint,
  NotASaddle,
  SingularTransform,
  ResidualLinearTerms,
  NoFlatOrder,
  InvalidRegime,
  ResonantDivisor,
  OrderConstraintViolated,
  KNotGreaterThanM,
  TailDiverges,
  InverseDomainViolated,
  NegativeDiscriminant,
  CertificationFailed,
  StraddlesStableManifold,
  LeftValidityDomain,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DivisionByZeroInterval: return "DivisionByZeroInterval";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::AmbiguousInteger: return "AmbiguousInteger";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::NotAFixedPoint: return "NotAFixedPoint";
    case ErrorKind::NotASaddle: return "NotASaddle";
    case ErrorKind::SingularTransform: return "SingularTransform";
    case ErrorKind::ResidualLinearTerms: return "ResidualLinearTerms";
    case ErrorKind::NoFlatOrder: return "NoFlatOrder";
    case ErrorKind::InvalidRegime: return "InvalidRegime";
    case ErrorKind::ResonantDivisor: return "ResonantDivisor";
    case ErrorKind::OrderConstraintViolated: return "OrderConstraintViolated";
    case ErrorKind::KNotGreaterThanM: return "KNotGreaterThanM";
    case ErrorKind::TailDiverges: return "TailDiverges";
    case ErrorKind::InverseDomainViolated: return "InverseDomainViolated";
    case ErrorKind::NegativeDiscriminant: return "NegativeDiscriminant";
    case ErrorKind::CertificationFailed: return "CertificationFailed";
    case ErrorKind::StraddlesStableManifold: return "StraddlesStableManifold";
    case ErrorKind::LeftValidityDomain: return "LeftValidityDomain";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a kind so callers (and the
/// CLI exit-code mapping) can dispatch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Certification stopped at a named stage; `knobs` lists the configuration
/// entries that influence that stage.
class CertificationFailed : public Error {
 public:
  CertificationFailed(std::string stage, std::string knobs, const std::string& detail)
      : Error(ErrorKind::CertificationFailed,
              "stage '" + stage + "': " + detail + " (adjust: " + knobs + ")"),
        stage_(std::move(stage)),
        knobs_(std::move(knobs)) {}

  const std::string& stage() const noexcept { return stage_; }
  const std::string& knobs() const noexcept { return knobs_; }

 private:
  std::string stage_;
  std::string knobs_;
};

}  // namespace saddlenf
