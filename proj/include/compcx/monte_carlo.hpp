#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "compcx/random.hpp"

namespace compcx {

// Streaming mean/variance (Welford), mergeable in a fixed order (Chan et al.).
struct RunningStats {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void push(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }

  void merge(const RunningStats& other) {
    if (other.count == 0) return;
    if (count == 0) {
      *this = other;
      return;
    }
    const double n_a = static_cast<double>(count);
    const double n_b = static_cast<double>(other.count);
    const double n = n_a + n_b;
    const double delta = other.mean - mean;
    mean += delta * n_b / n;
    m2 += other.m2 + delta * delta * n_a * n_b / n;
    count += other.count;
  }

  double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
  double std_error() const {
    return count > 0 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
  }
};

// Means and co-moments of several quantities observed on the same samples.
// Used wherever two estimates share random numbers and the standard error
// of their difference is needed.
class JointStats {
 public:
  JointStats() = default;
  explicit JointStats(std::size_t width)
      : width_(width), mean_(width, 0.0), comoment_(width * width, 0.0) {}

  std::size_t width() const { return width_; }
  std::uint64_t count() const { return count_; }

  template <class Range>
  void push(const Range& xs) {
    ++count_;
    const double n = static_cast<double>(count_);
    if (scratch_.size() != width_) scratch_.assign(width_, 0.0);
    std::size_t i = 0;
    for (double x : xs) {
      scratch_[i] = x - mean_[i];
      ++i;
    }
    for (std::size_t a = 0; a < width_; ++a) {
      for (std::size_t b = 0; b < width_; ++b) {
        comoment_[a * width_ + b] += (n - 1.0) / n * scratch_[a] * scratch_[b];
      }
    }
    for (std::size_t a = 0; a < width_; ++a) mean_[a] += scratch_[a] / n;
  }

  void merge(const JointStats& other) {
    if (other.count_ == 0) return;
    if (count_ == 0) {
      *this = other;
      return;
    }
    const double n_a = static_cast<double>(count_);
    const double n_b = static_cast<double>(other.count_);
    const double n = n_a + n_b;
    for (std::size_t a = 0; a < width_; ++a) {
      for (std::size_t b = 0; b < width_; ++b) {
        const double da = other.mean_[a] - mean_[a];
        const double db = other.mean_[b] - mean_[b];
        comoment_[a * width_ + b] += other.comoment_[a * width_ + b] + da * db * n_a * n_b / n;
      }
    }
    for (std::size_t a = 0; a < width_; ++a) {
      mean_[a] += (other.mean_[a] - mean_[a]) * n_b / n;
    }
    count_ += other.count_;
  }

  double mean(std::size_t a) const { return mean_[a]; }
  double covariance(std::size_t a, std::size_t b) const {
    return count_ > 1 ? comoment_[a * width_ + b] / static_cast<double>(count_ - 1) : 0.0;
  }
  double std_error(std::size_t a) const { return scaled(covariance(a, a)); }

  // Standard error of mean(a) - mean(b) under common random numbers.
  double std_error_of_difference(std::size_t a, std::size_t b) const {
    return scaled(covariance(a, a) + covariance(b, b) - 2.0 * covariance(a, b));
  }

 private:
  double scaled(double var) const {
    return count_ > 0 ? std::sqrt(std::max(var, 0.0) / static_cast<double>(count_)) : 0.0;
  }

  std::size_t width_ = 0;
  std::uint64_t count_ = 0;
  std::vector<double> mean_;
  std::vector<double> comoment_;
  std::vector<double> scratch_;
};

// Monte Carlo mean with its standard error.
struct RevenueEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;

  static RevenueEstimate from(const RunningStats& s, std::uint64_t seed) {
    return {s.mean, s.std_error(), s.count, seed};
  }
  static RevenueEstimate from(const JointStats& s, std::size_t column, std::uint64_t seed) {
    return {s.mean(column), s.std_error(column), s.count(), seed};
  }
};

// Combined standard error of two independent estimates.
inline double combined_std_error(const RevenueEstimate& a, const RevenueEstimate& b) {
  return std::hypot(a.std_error, b.std_error);
}

// Samples per batch. Part of the determinism contract: batch b always draws
// from split_seed(seed, b), whatever the number of workers.
inline constexpr std::uint64_t kBatchSize = 4096;

namespace detail {
inline std::atomic<unsigned>& worker_setting() {
  static std::atomic<unsigned> workers{0};
  return workers;
}
}  // namespace detail

// Number of worker threads for Monte Carlo batches; 0 means one per core.
inline void set_worker_count(unsigned workers) { detail::worker_setting() = workers; }

inline unsigned worker_count() {
  const unsigned configured = detail::worker_setting();
  if (configured != 0) return configured;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs `samples` draws split into fixed batches and merges the per-batch
// states in batch order.
//
// `batch(stream, count, state)` must fill `state` (a copy of `zero`) from
// `count` draws of `stream`. `State` needs `merge(const State&)`.
template <class State, class BatchFn>
State simulate(std::uint64_t samples, std::uint64_t seed, const State& zero, BatchFn&& batch) {
  const std::uint64_t batches = (samples + kBatchSize - 1) / kBatchSize;
  std::vector<State> parts(static_cast<std::size_t>(batches), zero);

  auto run_one = [&](std::uint64_t b) {
    Stream stream(split_seed(seed, b));
    const std::uint64_t count = std::min(kBatchSize, samples - b * kBatchSize);
    batch(stream, count, parts[static_cast<std::size_t>(b)]);
  };

  const unsigned workers =
      static_cast<unsigned>(std::min<std::uint64_t>(worker_count(), std::max<std::uint64_t>(batches, 1)));
  if (workers <= 1) {
    for (std::uint64_t b = 0; b < batches; ++b) run_one(b);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::uint64_t b = next++; b < batches; b = next++) {
          try {
            run_one(b);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = batches;
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  State total = zero;
  for (const auto& part : parts) total.merge(part);
  return total;
}

}  // namespace compcx
