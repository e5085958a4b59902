/*
 * Copyright (c) 2026 The catsplit Authors
 *
 * Licensed under the Apache License, Version 2.0;
 * You may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an 'AS IS' BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

// Deterministic optimization utilities shared by the alignment regressor and
// the head trainers.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>

#include "catsplit/tensor.hpp"

namespace catsplit {

// xoshiro256** seeded through splitmix64. The stream for a given seed is fixed
// across platforms; normal() uses the Box-Muller transform on uniform() draws.
class Prng {
 public:
  explicit Prng(std::uint64_t seed) noexcept;

  std::uint64_t next() noexcept;
  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform() noexcept;
  double normal() noexcept;
  double normal(double mean, double stddev) noexcept { return mean + stddev * normal(); }
  // Uniform on [0, n), unbiased. n must be > 0.
  std::size_t below(std::size_t n) noexcept;

  template <typename T>
  void shuffle(std::span<T> items) noexcept {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

 private:
  std::array<std::uint64_t, 4> state_{};
  std::optional<double> spare_;
};

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

struct AdamWState {
  std::size_t step = 0;
  Vector m;
  Vector v;
  double lr = 1e-3;
  double weight_decay = 0.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamWState for_size(std::size_t n, double lr, double weight_decay);
};

// theta -= lr * (m_hat / (sqrt(v_hat) + eps) + wd * theta), with bias-corrected
// moments. Moment buffers are sized on first use.
void adamw_step(std::span<double> params, std::span<const double> grads, AdamWState& state);

struct CosineSchedule {
  double lr_max = 1e-3;
  double lr_min = 0.0;
  std::size_t total_epochs = 100;

  // lr_min + (lr_max - lr_min) (1 + cos(pi t / T)) / 2 for 0 <= t <= T.
  double at(double epoch) const;
};

double cosine_lr(const CosineSchedule& schedule, double epoch);

enum class StopMode { minimize, maximize };

// Early stopping on an exponential moving average of a per-epoch metric.
class EmaStopper {
 public:
  struct Config {
    double beta = 0.95;
    std::size_t patience = 5;
    double delta = 1e-3;
  };

  explicit EmaStopper(StopMode mode = StopMode::minimize) : EmaStopper(mode, Config{}) {}
  EmaStopper(StopMode mode, Config config) : mode_(mode), config_(config) {}

  // Folds a metric into the average; returns true once `patience` consecutive
  // updates failed to improve on the best average by more than `delta`.
  bool update(double metric);

  bool started() const noexcept { return started_; }
  double ema() const noexcept { return ema_; }
  double best() const noexcept { return best_; }
  std::size_t stale() const noexcept { return stale_; }
  StopMode mode() const noexcept { return mode_; }
  const Config& config() const noexcept { return config_; }

 private:
  StopMode mode_;
  Config config_;
  bool started_ = false;
  double ema_ = 0.0;
  double best_ = 0.0;
  std::size_t stale_ = 0;
};

std::pair<EmaStopper, bool> ema_update(EmaStopper stopper, double metric);

}  // namespace catsplit
