#pragma once

#include <stdexcept>
#include <string>

namespace darboux {

/// Raised when an operation is called outside its documented preconditions.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The adaptive integrator could not make progress (step size underflow or a
/// non-finite state). `last_time` is the last time reached with a valid state.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double last_time)
      : std::runtime_error(what), last_time_(last_time) {}

  double last_time() const noexcept { return last_time_; }

 private:
  double last_time_;
};

}  // namespace darboux
