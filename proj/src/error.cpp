#include "vqrng/error.hpp"

namespace vqrng {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::integration_diverged: return "integration-diverged";
    case ErrorCode::filter_design: return "filter-design";
    case ErrorCode::degenerate_frame: return "degenerate-frame";
    case ErrorCode::no_extractable_entropy: return "no-extractable-entropy";
    case ErrorCode::insufficient_seed: return "insufficient-seed";
    case ErrorCode::length_mismatch: return "length-mismatch";
    case ErrorCode::io: return "io";
    case ErrorCode::parse: return "parse";
  }
  return "unknown";
}

}  // namespace vqrng
