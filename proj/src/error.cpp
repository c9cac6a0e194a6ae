#include "parpmon/error.hpp"

namespace parpmon {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kInsufficientData: return "insufficient data";
    case ErrorCode::kDegenerateMonth: return "degenerate month";
    case ErrorCode::kSingularSystem: return "singular system";
    case ErrorCode::kPositivityViolation: return "positivity violation";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kGap: return "gap in monthly data";
    case ErrorCode::kValidation: return "validation error";
    case ErrorCode::kConfig: return "configuration error";
    case ErrorCode::kIo: return "i/o error";
  }
  return "unknown error";
}

}  // namespace parpmon
