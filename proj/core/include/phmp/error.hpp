#pragma once

#include <stdexcept>
#include <string>

namespace phmp {

enum class ErrorKind {
  invalid_cone,
  projection_degenerate,
  incompatible_cocycles,
  invalid_parameters,
  unattainable_parameters,
  domain,
  invalid_spec,
  precondition,
  coverage,
  invalid_marker,
  invalid_curve,
  usage,
  io,
};

const char* to_string(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace phmp
