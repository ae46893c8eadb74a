#pragma once

#include <stdexcept>
#include <string>

namespace neurocore {

enum class ErrorCode {
  invalid_argument,
  parse,
  io,
  numeric,
  insufficient_spikes,
  degenerate_reference,
  unknown_field,
  config,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace neurocore
