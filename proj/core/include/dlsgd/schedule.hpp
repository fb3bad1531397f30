#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dlsgd {

enum class ScheduleKind { kEveryStep, kFixedInterval, kVaryingInterval, kFinalOnly };

/// Set of communication times 1 <= tau_1 < ... < tau_R <= T.
///
/// Times are 1-based iterate indices: the engine mixes while producing
/// iterate tau, i.e. at loop step t = tau - 1.
class CommSchedule {
 public:
  static CommSchedule every_step(std::size_t horizon);
  /// tau_i = i H for i < R and tau_R = min(R H, T), R = ceil(T / H).
  static CommSchedule fixed_interval(std::size_t horizon, std::size_t interval);
  /// a = ceil(2T / R^2), tau_i = min(a i (i + 1) / 2, T). Repeated times at
  /// the cap collapse into a single communication at T. Requires R^2 <= 2T.
  static CommSchedule varying_interval(std::size_t horizon, std::size_t rounds);
  static CommSchedule final_only(std::size_t horizon);

  /// `every_step`, `fixed:H`, `varying:R` or `final_only`.
  static CommSchedule parse(std::string_view strategy, std::size_t horizon);

  ScheduleKind kind() const noexcept { return kind_; }
  std::size_t horizon() const noexcept { return horizon_; }
  std::span<const std::size_t> times() const noexcept { return times_; }
  /// Number of distinct communications.
  std::size_t rounds() const noexcept { return times_.size(); }
  /// H for fixed_interval, otherwise 0.
  std::size_t interval() const noexcept { return interval_; }
  /// Requested R for varying_interval, otherwise 0.
  std::size_t requested_rounds() const noexcept { return requested_rounds_; }
  /// a for varying_interval, otherwise 0.
  std::size_t scale() const noexcept { return scale_; }

  /// t is 1-based; false outside [1, T].
  bool communicates_at(std::size_t t) const noexcept { return t < member_.size() && member_[t] != 0; }

  /// Canonical strategy string, parseable by parse().
  std::string strategy() const;

  /// Length-T sequence whose entry t - 1 is rho when t is a communication
  /// time and 1 otherwise.
  std::vector<double> rho_sequence(double rho) const;

  /// Times joined by commas.
  std::string to_csv_line() const;

 private:
  CommSchedule(ScheduleKind kind, std::size_t horizon, std::vector<std::size_t> times);

  ScheduleKind kind_;
  std::size_t horizon_;
  std::vector<std::size_t> times_;
  std::vector<char> member_;
  std::size_t interval_ = 0;
  std::size_t requested_rounds_ = 0;
  std::size_t scale_ = 0;
};

/// Largest R accepted by varying_interval: floor(sqrt(2T)).
std::size_t max_varying_rounds(std::size_t horizon);

}  // namespace dlsgd
