#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace superosc {

enum class ErrorKind {
  InvalidConfig,
  DegenerateNodes,
  OutOfRange,
  OutsideRadius,
  TailNotBounded,
  NoConvergenceAtMaxBits,
  NotExponentialType,
  NormNotCertifiable,
  Io,
};

inline std::string_view name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::DegenerateNodes: return "DegenerateNodes";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::OutsideRadius: return "OutsideRadius";
    case ErrorKind::TailNotBounded: return "TailNotBounded";
    case ErrorKind::NoConvergenceAtMaxBits: return "NoConvergenceAtMaxBits";
    case ErrorKind::NotExponentialType: return "NotExponentialType";
    case ErrorKind::NormNotCertifiable: return "NormNotCertifiable";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

/// Process exit code used by the command-line front end for each failure class.
inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidConfig:
    case ErrorKind::DegenerateNodes:
    case ErrorKind::OutOfRange:
      return 2;
    case ErrorKind::TailNotBounded:
    case ErrorKind::NoConvergenceAtMaxBits:
    case ErrorKind::NotExponentialType:
      return 3;
    case ErrorKind::OutsideRadius:
    case ErrorKind::NormNotCertifiable:
      return 4;
    case ErrorKind::Io:
      return 5;
  }
  return 1;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace superosc
