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

#include "catsplit/lowshot.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "catsplit/error.hpp"
#include "catsplit/kernels.hpp"

namespace catsplit {

CrossEntropy cross_entropy_loss(std::span<const double> logits, std::size_t target) {
  if (target >= logits.size()) {
    throw ValidationError("cross entropy: target index " + std::to_string(target) +
                          " out of range for " + std::to_string(logits.size()) + " classes");
  }
  const double top = *std::max_element(logits.begin(), logits.end());
  CrossEntropy out;
  out.gradient.resize(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out.gradient[i] = std::exp(logits[i] - top);
    sum += out.gradient[i];
  }
  for (auto& g : out.gradient) g /= sum;
  out.loss = std::log(sum) + top - logits[target];
  out.gradient[target] -= 1.0;
  return out;
}

double mean_cross_entropy(const ClassifierHead& head, const LabeledRows& rows) {
  if (rows.samples.empty()) return 0.0;
  Vector logits(head.size());
  double total = 0.0;
  for (std::size_t i = 0; i < rows.samples.size(); ++i) {
    head.logits(rows.features->row(rows.samples[i]), logits);
    total += cross_entropy_loss(logits, rows.targets[i]).loss;
  }
  return total / static_cast<double>(rows.samples.size());
}

TrainingHistory fit_softmax_rows(ClassifierHead& head, std::size_t first_row,
                                 const LabeledRows& train, const SoftmaxTrainConfig& config,
                                 const LabeledRows* monitor) {
  head.validate();
  if (!train.features || train.samples.empty() || train.samples.size() != train.targets.size()) {
    throw ValidationError("softmax training needs a non-empty, aligned sample list");
  }
  if (first_row >= head.size()) throw ValidationError("no trainable rows");
  if (config.batch == 0 || config.max_epochs == 0) {
    throw ValidationError("softmax training: batch and max_epochs must be >= 1");
  }
  const std::size_t d = head.dim();
  const std::size_t trainable = head.size() - first_row;

  auto weights = head.weights.values().subspan(first_row * d, trainable * d);
  std::span<double> biases;
  if (head.bias) biases = std::span(*head.bias).subspan(first_row, trainable);

  auto s_w = AdamWState::for_size(weights.size(), config.lr, config.weight_decay);
  auto s_b = AdamWState::for_size(biases.size(), config.lr, config.weight_decay);
  Vector g_w(weights.size());
  Vector g_b(biases.size());
  Vector logits(head.size());

  const CosineSchedule schedule{config.lr, 0.0, config.max_epochs};
  EmaStopper stopper(StopMode::minimize, config.early_stop);
  Prng rng(config.seed);
  std::vector<std::size_t> order(train.samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainingHistory history;
  for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    const double lr = schedule.at(static_cast<double>(epoch));
    s_w.lr = s_b.lr = lr;
    rng.shuffle(std::span(order));
    for (std::size_t start = 0; start < order.size(); start += config.batch) {
      const auto count = std::min(config.batch, order.size() - start);
      std::fill(g_w.begin(), g_w.end(), 0.0);
      std::fill(g_b.begin(), g_b.end(), 0.0);
      const double scale = 1.0 / static_cast<double>(count);
      for (std::size_t k = start; k < start + count; ++k) {
        const auto x = train.features->row(train.samples[order[k]]);
        head.logits(x, logits);
        const auto ce = cross_entropy_loss(logits, train.targets[order[k]]);
        if (!std::isfinite(ce.loss)) {
          throw Error("softmax training diverged at epoch " + std::to_string(epoch));
        }
        for (std::size_t r = 0; r < trainable; ++r) {
          const double g = ce.gradient[first_row + r] * scale;
          kernels::axpy(g, x, std::span(g_w).subspan(r * d, d));
          if (!g_b.empty()) g_b[r] += g;
        }
      }
      adamw_step(weights, g_w, s_w);
      if (!biases.empty()) adamw_step(biases, g_b, s_b);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.lr = lr;
    rec.loss = mean_cross_entropy(head, train);
    rec.metric = monitor ? mean_cross_entropy(head, *monitor) : rec.loss;
    if (!std::isfinite(rec.loss) || !std::isfinite(rec.metric)) {
      throw Error("softmax training diverged at epoch " + std::to_string(epoch));
    }
    const bool stop = stopper.update(rec.metric);
    rec.ema = stopper.ema();
    rec.best = stopper.best();
    history.epochs.push_back(rec);
    if (config.early_stopping && stop) {
      history.stopped_early = true;
      break;
    }
  }
  return history;
}

std::string_view scope_name(FinetuneScope s) noexcept {
  return s == FinetuneScope::new_only ? "new-only" : "head+new";
}

FinetuneScope parse_scope(std::string_view name) {
  if (name == "new-only") return FinetuneScope::new_only;
  if (name == "head+new") return FinetuneScope::head_and_new;
  throw ValidationError("unknown scope '" + std::string(name) + "' (expected new-only|head+new)");
}

FinetuneResult finetune_split(const ClassifierHead& head, const SplitSpec& split,
                              const FeatureDataset& train, const FinetuneConfig& config,
                              const SplitDependencies& deps, const FeatureDataset* validation) {
  if (config.shots == 0) throw ValidationError("shots must be >= 1");
  train.validate();
  if (train.features.cols() != head.dim()) {
    throw ValidationError("train feature dim does not match head dim");
  }

  std::map<std::string, std::vector<std::size_t>> by_label;
  for (const auto& sub : split.subcategories) by_label[sub.id];
  for (std::size_t i = 0; i < train.size(); ++i) {
    const auto it = by_label.find(train.labels[i]);
    if (it == by_label.end()) {
      throw ValidationError("train label '" + train.labels[i] + "' is not a subcategory of '" +
                            split.coarse_id + "'");
    }
    if (it->second.size() < config.shots) it->second.push_back(i);
  }
  for (const auto& sub : split.subcategories) {
    if (by_label[sub.id].size() < config.shots) {
      throw ValidationError("insufficient shots for '" + sub.id + "': need " +
                            std::to_string(config.shots) + ", found " +
                            std::to_string(by_label[sub.id].size()));
    }
  }

  FinetuneResult result;
  result.edited = split_head(head, split, config.init, deps, config.train.seed);
  auto& edited = result.edited;

  LabeledRows rows;
  rows.features = &train.features;
  for (const auto& sub : split.subcategories) {
    const auto target = edited.head.require_index(sub.id);
    for (const auto i : by_label[sub.id]) {
      rows.samples.push_back(i);
      rows.targets.push_back(target);
    }
  }
  result.shot_indices = rows.samples;

  LabeledRows monitor;
  if (validation) {
    validation->validate();
    monitor.features = &validation->features;
    for (std::size_t i = 0; i < validation->size(); ++i) {
      if (auto idx = edited.head.index_of(validation->labels[i])) {
        monitor.samples.push_back(i);
        monitor.targets.push_back(*idx);
      }
    }
    if (monitor.samples.empty()) {
      throw ValidationError("validation set has no samples with labels in the edited head");
    }
  }

  const std::size_t first_row =
      config.scope == FinetuneScope::new_only ? edited.retained : std::size_t{0};
  result.history = fit_softmax_rows(edited.head, first_row, rows, config.train,
                                    validation ? &monitor : nullptr);
  return result;
}

}  // namespace catsplit
