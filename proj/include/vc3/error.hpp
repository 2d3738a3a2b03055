// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vc3 {

enum class errc {
  non_finite_input,
  invalid_layout,
  empty_domain,
  invalid_split,
  domain_error,
  length_mismatch,
  bad_magic,
  bad_layout,
  truncated_stream,
  malformed_input,
};

constexpr std::string_view to_string(errc code) noexcept {
  switch (code) {
    case errc::non_finite_input: return "NonFiniteInput";
    case errc::invalid_layout: return "InvalidLayout";
    case errc::empty_domain: return "EmptyDomain";
    case errc::invalid_split: return "InvalidSplit";
    case errc::domain_error: return "DomainError";
    case errc::length_mismatch: return "LengthMismatch";
    case errc::bad_magic: return "BadMagic";
    case errc::bad_layout: return "BadLayout";
    case errc::truncated_stream: return "TruncatedStream";
    case errc::malformed_input: return "MalformedInput";
  }
  return "Unknown";
}

/// Single exception type for the library; `code()` identifies the failure.
class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

}  // namespace vc3
