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

#include "catsplit/optim.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "catsplit/error.hpp"
#include "catsplit/kernels.hpp"

namespace catsplit {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Prng::Prng(std::uint64_t seed) noexcept {
  for (auto& s : state_) s = splitmix64(seed);
}

std::uint64_t Prng::next() noexcept {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double Prng::uniform() noexcept {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double Prng::normal() noexcept {
  if (spare_) {
    const double z = *spare_;
    spare_.reset();
    return z;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  return r * std::cos(theta);
}

std::size_t Prng::below(std::size_t n) noexcept {
  const std::uint64_t bound = n;
  const std::uint64_t limit = bound * (UINT64_MAX / bound);
  std::uint64_t x = next();
  while (x >= limit) x = next();
  return static_cast<std::size_t>(x % bound);
}

AdamWState AdamWState::for_size(std::size_t n, double lr, double weight_decay) {
  AdamWState s;
  s.m.assign(n, 0.0);
  s.v.assign(n, 0.0);
  s.lr = lr;
  s.weight_decay = weight_decay;
  return s;
}

void adamw_step(std::span<double> params, std::span<const double> grads, AdamWState& state) {
  if (params.size() != grads.size()) {
    throw ValidationError("adamw: parameter/gradient shape mismatch (" +
                          std::to_string(params.size()) + " vs " + std::to_string(grads.size()) +
                          ")");
  }
  if (state.m.empty() && state.v.empty()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
  }
  if (state.m.size() != params.size() || state.v.size() != params.size()) {
    throw ValidationError("adamw: moment buffers do not match parameter shape");
  }
  ++state.step;
  const auto t = static_cast<double>(state.step);
  kernels::AdamWCoefficients c;
  c.lr = state.lr;
  c.weight_decay = state.weight_decay;
  c.beta1 = state.beta1;
  c.beta2 = state.beta2;
  c.eps = state.eps;
  c.bias_correction1 = 1.0 - std::pow(state.beta1, t);
  c.bias_correction2 = 1.0 - std::pow(state.beta2, t);
  kernels::adamw_update(params, grads, state.m, state.v, c);
}

double CosineSchedule::at(double epoch) const {
  if (total_epochs == 0) throw ValidationError("cosine schedule needs total_epochs >= 1");
  const auto T = static_cast<double>(total_epochs);
  if (!(epoch >= 0.0 && epoch <= T)) {
    throw ValidationError("cosine schedule: epoch " + std::to_string(epoch) +
                          " outside [0, " + std::to_string(total_epochs) + "]");
  }
  return lr_min + 0.5 * (lr_max - lr_min) * (1.0 + std::cos(std::numbers::pi * epoch / T));
}

double cosine_lr(const CosineSchedule& schedule, double epoch) { return schedule.at(epoch); }

bool EmaStopper::update(double metric) {
  if (!std::isfinite(metric)) throw ValidationError("early stopping: non-finite metric");
  if (!started_) {
    started_ = true;
    ema_ = metric;
    best_ = metric;
    stale_ = 0;
    return false;
  }
  ema_ = config_.beta * ema_ + (1.0 - config_.beta) * metric;
  const bool improved = mode_ == StopMode::minimize ? ema_ < best_ - config_.delta
                                                    : ema_ > best_ + config_.delta;
  if (improved) {
    best_ = ema_;
    stale_ = 0;
  } else {
    ++stale_;
  }
  return stale_ >= config_.patience;
}

std::pair<EmaStopper, bool> ema_update(EmaStopper stopper, double metric) {
  const bool stop = stopper.update(metric);
  return {stopper, stop};
}

}  // namespace catsplit
