#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cachecast {

// Failure categories. The CLI maps validation-type codes to exit status 2 and
// solver-type codes to exit status 3.
enum class errc {
  not_monotone,
  out_of_range,
  length_mismatch,
  weights_unsorted,
  empty_subset,
  too_many_users,
  not_two_user,
  mu_out_of_range,
  not_degraded,
  non_integer_t,
  bad_t,
  infeasible_z,
  infeasible_allocation,
  too_large,
  unbounded_rate,
  bad_config,
  numerical_failure,
  zero_denominator,
};

constexpr std::string_view to_string(errc code) {
  switch (code) {
    case errc::not_monotone: return "NotMonotone";
    case errc::out_of_range: return "OutOfRange";
    case errc::length_mismatch: return "LengthMismatch";
    case errc::weights_unsorted: return "WeightsUnsorted";
    case errc::empty_subset: return "EmptySubset";
    case errc::too_many_users: return "TooManyUsers";
    case errc::not_two_user: return "NotTwoUser";
    case errc::mu_out_of_range: return "MuOutOfRange";
    case errc::not_degraded: return "NotDegraded";
    case errc::non_integer_t: return "NonIntegerT";
    case errc::bad_t: return "BadT";
    case errc::infeasible_z: return "InfeasibleZ";
    case errc::infeasible_allocation: return "InfeasibleAllocation";
    case errc::too_large: return "TooLarge";
    case errc::unbounded_rate: return "UnboundedRate";
    case errc::bad_config: return "BadConfig";
    case errc::numerical_failure: return "NumericalFailure";
    case errc::zero_denominator: return "ZeroDenominator";
  }
  return "Unknown";
}

constexpr bool is_solver_failure(errc code) { return code == errc::numerical_failure; }

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), message_(what) {}

  errc code() const noexcept { return code_; }
  // The text without the code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  errc code_;
  std::string message_;
};

}  // namespace cachecast
