#pragma once

#include <stdexcept>
#include <string>

namespace ralu {

// Base class for everything this library throws on purpose. kind() is a
// stable machine-readable tag used by the CLI for structured error output
// and by the harness failure histogram.
class Error : public std::runtime_error {
public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

private:
  std::string kind_;
};

} // namespace ralu
