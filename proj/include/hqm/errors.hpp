#ifndef HQM_ERRORS_HPP
#define HQM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hqm {

// Failure categories surfaced by the library. Kept coarse on purpose:
// callers either recover per-experiment or let the harness report them.
enum class ErrorKind {
  InvalidGrid,
  Precondition,
  Singularity,
  Construction,
  Truncation,
  QuadratureFailure,
  Diagnostics,
  UnsupportedDomain,
  Conditioning,
  SmallnessViolated,
  Resolution,
  Config,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidGrid: return "invalid-grid";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::Singularity: return "singularity";
    case ErrorKind::Construction: return "construction";
    case ErrorKind::Truncation: return "truncation";
    case ErrorKind::QuadratureFailure: return "quadrature-failure";
    case ErrorKind::Diagnostics: return "diagnostics";
    case ErrorKind::UnsupportedDomain: return "unsupported-domain";
    case ErrorKind::Conditioning: return "conditioning";
    case ErrorKind::SmallnessViolated: return "smallness-violated";
    case ErrorKind::Resolution: return "resolution";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

inline void require(bool cond, ErrorKind kind, const std::string& msg) {
  if (!cond) throw Error(kind, std::string(to_string(kind)) + ": " + msg);
}

}  // namespace hqm

#endif
