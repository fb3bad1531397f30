#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace dlsgd {

/// A private random stream. Streams built from distinct (seed, stream_id)
/// pairs are statistically independent; the same pair always reproduces the
/// same sequence.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  /// Standard normal draw.
  double normal() { return normal_(engine_); }

  /// Uniform draw on [0, 1).
  double uniform() { return uniform_(engine_); }

  /// Uniform index in [0, n). n must be positive.
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
  std::uniform_real_distribution<double> uniform_;
};

/// One stream per worker: stream i is RngStream(seed, i).
std::vector<RngStream> make_worker_streams(std::uint64_t seed, std::size_t count);

/// 64-bit FNV-1a, used for config and dataset fingerprints.
class Fnv1a {
 public:
  void update(const void* data, std::size_t size);

  template <typename T>
  void update_value(const T& value) {
    update(&value, sizeof(T));
  }

  std::uint64_t digest() const noexcept { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace dlsgd
