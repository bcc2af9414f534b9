#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hyperblocks {

enum class ErrorCode {
  kParse,
  kEmptyDataset,
  kInvalidArgument,
  kDimensionMismatch,
  kEmptyBlock,
  kNotFound,
  kValidation,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; `code()` maps onto the service's
// {code, message, detail} error payload.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string detail = {})
      : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace hyperblocks
