#include "nlwlab/error.hpp"

namespace nlwlab {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::shape_mismatch: return "shape-mismatch";
    case ErrorCode::domain: return "domain";
    case ErrorCode::symmetry_violation: return "symmetry-violation";
    case ErrorCode::undefined_ratio: return "undefined-ratio";
    case ErrorCode::blowup: return "blowup";
    case ErrorCode::diverged: return "diverged";
    case ErrorCode::degenerate_samples: return "degenerate-samples";
    case ErrorCode::insufficient_samples: return "insufficient-samples";
    case ErrorCode::io: return "io";
    case ErrorCode::config: return "config";
  }
  return "unknown";
}

}  // namespace nlwlab
