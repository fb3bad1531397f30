#include "dlsgd/schedule.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "dlsgd/error.hpp"

namespace dlsgd {

namespace {

void require_horizon(std::size_t horizon) {
  if (horizon == 0) throw InvalidParameter("horizon T must be at least 1");
}

std::size_t parse_count(std::string_view text, std::string_view strategy) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw InvalidParameter("malformed strategy '" + std::string(strategy) + "'");
  }
  return value;
}

}  // namespace

CommSchedule::CommSchedule(ScheduleKind kind, std::size_t horizon, std::vector<std::size_t> times)
    : kind_(kind), horizon_(horizon), times_(std::move(times)), member_(horizon + 1, 0) {
  for (auto t : times_) member_[t] = 1;
}

CommSchedule CommSchedule::every_step(std::size_t horizon) {
  require_horizon(horizon);
  std::vector<std::size_t> times(horizon);
  for (std::size_t i = 0; i < horizon; ++i) times[i] = i + 1;
  return CommSchedule(ScheduleKind::kEveryStep, horizon, std::move(times));
}

CommSchedule CommSchedule::fixed_interval(std::size_t horizon, std::size_t interval) {
  require_horizon(horizon);
  if (interval == 0 || interval > horizon) {
    throw InvalidParameter("fixed interval H must satisfy 1 <= H <= T");
  }
  const std::size_t rounds = (horizon + interval - 1) / interval;
  std::vector<std::size_t> times;
  times.reserve(rounds);
  for (std::size_t i = 1; i < rounds; ++i) times.push_back(i * interval);
  times.push_back(std::min(rounds * interval, horizon));
  CommSchedule s(ScheduleKind::kFixedInterval, horizon, std::move(times));
  s.interval_ = interval;
  return s;
}

CommSchedule CommSchedule::varying_interval(std::size_t horizon, std::size_t rounds) {
  require_horizon(horizon);
  if (rounds == 0 || rounds > max_varying_rounds(horizon)) {
    throw InvalidParameter("varying schedule needs 1 <= R <= sqrt(2T); got R = " +
                           std::to_string(rounds) + " for T = " + std::to_string(horizon));
  }
  const std::size_t r2 = rounds * rounds;
  const std::size_t a = (2 * horizon + r2 - 1) / r2;
  std::vector<std::size_t> times;
  times.reserve(rounds);
  for (std::size_t i = 1; i <= rounds; ++i) {
    const std::size_t tau = std::min(a * i * (i + 1) / 2, horizon);
    if (times.empty() || times.back() != tau) times.push_back(tau);
  }
  CommSchedule s(ScheduleKind::kVaryingInterval, horizon, std::move(times));
  s.requested_rounds_ = rounds;
  s.scale_ = a;
  return s;
}

CommSchedule CommSchedule::final_only(std::size_t horizon) {
  require_horizon(horizon);
  return CommSchedule(ScheduleKind::kFinalOnly, horizon, {horizon});
}

CommSchedule CommSchedule::parse(std::string_view strategy, std::size_t horizon) {
  if (strategy == "every_step") return every_step(horizon);
  if (strategy == "final_only") return final_only(horizon);
  if (strategy.starts_with("fixed:")) return fixed_interval(horizon, parse_count(strategy.substr(6), strategy));
  if (strategy.starts_with("varying:")) {
    return varying_interval(horizon, parse_count(strategy.substr(8), strategy));
  }
  throw InvalidParameter("unknown strategy '" + std::string(strategy) +
                         "' (expected every_step, fixed:H, varying:R or final_only)");
}

std::string CommSchedule::strategy() const {
  switch (kind_) {
    case ScheduleKind::kEveryStep:
      return "every_step";
    case ScheduleKind::kFixedInterval:
      return "fixed:" + std::to_string(interval_);
    case ScheduleKind::kVaryingInterval:
      return "varying:" + std::to_string(requested_rounds_);
    case ScheduleKind::kFinalOnly:
      return "final_only";
  }
  return {};
}

std::vector<double> CommSchedule::rho_sequence(double rho) const {
  std::vector<double> seq(horizon_, 1.0);
  for (auto t : times_) seq[t - 1] = rho;
  return seq;
}

std::string CommSchedule::to_csv_line() const {
  std::string line;
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (i) line += ',';
    line += std::to_string(times_[i]);
  }
  return line;
}

std::size_t max_varying_rounds(std::size_t horizon) {
  auto r = static_cast<std::size_t>(std::sqrt(2.0 * static_cast<double>(horizon)));
  while (r * r > 2 * horizon) --r;
  while ((r + 1) * (r + 1) <= 2 * horizon) ++r;
  return r;
}

}  // namespace dlsgd
