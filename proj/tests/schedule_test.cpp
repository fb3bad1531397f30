#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "dlsgd/error.hpp"
#include "dlsgd/rng.hpp"
#include "dlsgd/schedule.hpp"

namespace dlsgd {
namespace {

using Times = std::vector<std::size_t>;

Times times_of(const CommSchedule& s) { return Times(s.times().begin(), s.times().end()); }

TEST(EveryStep, Examples) {
  EXPECT_EQ(times_of(CommSchedule::every_step(3)), (Times{1, 2, 3}));
  EXPECT_EQ(times_of(CommSchedule::every_step(1)), (Times{1}));
  EXPECT_EQ(CommSchedule::every_step(2000).rounds(), 2000u);
  EXPECT_THROW(CommSchedule::every_step(0), InvalidParameter);
}

TEST(FixedInterval, Examples) {
  const auto s = CommSchedule::fixed_interval(2000, 50);
  EXPECT_EQ(s.rounds(), 40u);
  EXPECT_EQ(s.times().front(), 50u);
  EXPECT_EQ(s.times().back(), 2000u);
  for (std::size_t i = 0; i < s.rounds(); ++i) EXPECT_EQ(s.times()[i], 50 * (i + 1));
  EXPECT_EQ(times_of(CommSchedule::fixed_interval(10, 10)), (Times{10}));
  EXPECT_EQ(times_of(CommSchedule::fixed_interval(7, 3)), (Times{3, 6, 7}));
  EXPECT_EQ(CommSchedule::fixed_interval(7, 3).interval(), 3u);
  EXPECT_THROW(CommSchedule::fixed_interval(10, 0), InvalidParameter);
  EXPECT_THROW(CommSchedule::fixed_interval(10, 11), InvalidParameter);
}

TEST(VaryingInterval, T2000R40) {
  const auto s = CommSchedule::varying_interval(2000, 40);
  EXPECT_EQ(s.scale(), 3u);
  EXPECT_EQ(s.requested_rounds(), 40u);
  EXPECT_EQ(s.times().back(), 2000u);
  const auto t = times_of(s);
  EXPECT_EQ(Times(t.begin(), t.begin() + 4), (Times{3, 9, 18, 30}));
  // a i (i + 1) / 2 stays below 2000 through i = 36 (1998); 37..40 collapse at the cap.
  EXPECT_EQ(s.rounds(), 37u);
  EXPECT_EQ(t[35], 1998u);
  for (std::size_t i = 1; i + 1 < t.size(); ++i) EXPECT_EQ(t[i] - t[i - 1], 3 * (i + 1));
}

TEST(VaryingInterval, Examples) {
  const auto small = CommSchedule::varying_interval(2, 1);
  EXPECT_EQ(small.scale(), 4u);
  EXPECT_EQ(times_of(small), (Times{2}));

  const auto s = CommSchedule::varying_interval(4000, 40);
  EXPECT_EQ(s.scale(), 5u);
  EXPECT_EQ(s.rounds(), 40u);
  EXPECT_EQ(s.times()[0], 5u);
  EXPECT_EQ(s.times()[1], 15u);
  EXPECT_EQ(s.times()[38], 3900u);
  EXPECT_EQ(s.times()[39], 4000u);

  EXPECT_THROW(CommSchedule::varying_interval(2000, 100), InvalidParameter);
  EXPECT_THROW(CommSchedule::varying_interval(2000, 0), InvalidParameter);
  EXPECT_NO_THROW(CommSchedule::varying_interval(2000, 63));
  EXPECT_THROW(CommSchedule::varying_interval(2000, 64), InvalidParameter);
}

TEST(VaryingInterval, MaxRounds) {
  EXPECT_EQ(max_varying_rounds(2000), 63u);
  EXPECT_EQ(max_varying_rounds(2), 2u);
  EXPECT_EQ(max_varying_rounds(8), 4u);
  EXPECT_EQ(max_varying_rounds(4000), 89u);
  for (std::size_t t = 1; t < 5000; ++t) {
    const auto r = max_varying_rounds(t);
    EXPECT_LE(r * r, 2 * t);
    EXPECT_GT((r + 1) * (r + 1), 2 * t);
  }
}

TEST(VaryingInterval, RandomPairsEndAtHorizon) {
  RngStream rng(77, 0);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t horizon = 1 + rng.index(20000);
    const std::size_t rounds = 1 + rng.index(max_varying_rounds(horizon));
    const auto s = CommSchedule::varying_interval(horizon, rounds);
    const auto t = times_of(s);
    ASSERT_FALSE(t.empty());
    EXPECT_EQ(t.back(), horizon);
    EXPECT_TRUE(std::is_sorted(t.begin(), t.end()));
    EXPECT_EQ(std::adjacent_find(t.begin(), t.end()), t.end());
    EXPECT_LE(t.size(), rounds);
    const std::size_t a = s.scale();
    EXPECT_EQ(a, (2 * horizon + rounds * rounds - 1) / (rounds * rounds));
    for (std::size_t i = 0; i < t.size(); ++i) {
      const std::size_t k = i + 1;
      EXPECT_EQ(t[i], std::min(a * k * (k + 1) / 2, horizon));
    }
  }
}

TEST(FinalOnly, Examples) {
  EXPECT_EQ(times_of(CommSchedule::final_only(1)), (Times{1}));
  EXPECT_EQ(times_of(CommSchedule::final_only(2000)), (Times{2000}));
  EXPECT_EQ(times_of(CommSchedule::final_only(5)), (Times{5}));
}

TEST(RhoSequence, Examples) {
  EXPECT_EQ(CommSchedule::every_step(3).rho_sequence(0.5), (std::vector<double>{0.5, 0.5, 0.5}));
  EXPECT_EQ(CommSchedule::final_only(3).rho_sequence(0.5), (std::vector<double>{1, 1, 0.5}));
  EXPECT_EQ(CommSchedule::fixed_interval(6, 2).rho_sequence(0.3), (std::vector<double>{1, 0.3, 1, 0.3, 1, 0.3}));
}

TEST(RhoSequence, CountsMatchRounds) {
  for (const auto& s : {CommSchedule::every_step(50), CommSchedule::fixed_interval(50, 7),
                        CommSchedule::varying_interval(50, 10), CommSchedule::final_only(50)}) {
    const auto seq = s.rho_sequence(0.4);
    EXPECT_EQ(seq.size(), 50u);
    EXPECT_EQ(static_cast<std::size_t>(std::count_if(seq.begin(), seq.end(), [](double r) { return r < 1.0; })),
              s.rounds());
    for (std::size_t t = 1; t <= 50; ++t) EXPECT_EQ(s.communicates_at(t), seq[t - 1] < 1.0);
  }
  EXPECT_EQ(CommSchedule::fixed_interval(50, 7).rounds(), 8u);
  EXPECT_FALSE(CommSchedule::every_step(5).communicates_at(0));
  EXPECT_FALSE(CommSchedule::every_step(5).communicates_at(6));
}

TEST(Parse, StrategyStrings) {
  EXPECT_EQ(CommSchedule::parse("every_step", 10).kind(), ScheduleKind::kEveryStep);
  EXPECT_EQ(CommSchedule::parse("final_only", 10).kind(), ScheduleKind::kFinalOnly);
  const auto fixed = CommSchedule::parse("fixed:5", 10);
  EXPECT_EQ(fixed.kind(), ScheduleKind::kFixedInterval);
  EXPECT_EQ(fixed.interval(), 5u);
  EXPECT_EQ(CommSchedule::parse("varying:4", 10).kind(), ScheduleKind::kVaryingInterval);
  for (const char* s : {"every_step", "final_only", "fixed:5", "varying:4"}) {
    EXPECT_EQ(CommSchedule::parse(s, 10).strategy(), s);
  }
  for (const char* bad : {"", "fixed", "fixed:", "fixed:x", "fixed:-1", "varying:2.5", "sometimes", "fixed:5:1"}) {
    EXPECT_THROW(CommSchedule::parse(bad, 10), InvalidParameter) << bad;
  }
  EXPECT_THROW(CommSchedule::parse("varying:100", 2000), InvalidParameter);
}

TEST(Serialization, CsvLine) {
  EXPECT_EQ(CommSchedule::fixed_interval(7, 3).to_csv_line(), "3,6,7");
  EXPECT_EQ(CommSchedule::final_only(4).to_csv_line(), "4");
}

}  // namespace
}  // namespace dlsgd
