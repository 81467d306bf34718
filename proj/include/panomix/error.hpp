#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace panomix {

enum class ErrorCode {
  invalid_argument,
  invalid_coordinate,
  degenerate_layout,
  inconsistent_layout,
  unsupported_layout,
  degenerate_point,
  degenerate_wall,
  degenerate_boundary,
  invalid_factor,
  geometry,
  incompatible_samples,
  empty_style_region,
  config,
  empty_dataset,
  parse,
  load,
  adapter,
  io,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; the code drives CLI exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace panomix
