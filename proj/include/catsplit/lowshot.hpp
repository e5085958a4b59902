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

// Softmax cross-entropy training of head rows on frozen features, and the
// low-shot split built on it: extend the head with new subcategory rows, then
// fit only the rows in scope on a handful of labeled features.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "catsplit/alignment.hpp"
#include "catsplit/data.hpp"
#include "catsplit/head.hpp"
#include "catsplit/head_editor.hpp"
#include "catsplit/optim.hpp"

namespace catsplit {

struct CrossEntropy {
  double loss = 0.0;
  Vector gradient;  // d loss / d logits = softmax - onehot
};

CrossEntropy cross_entropy_loss(std::span<const double> logits, std::size_t target);

struct SoftmaxTrainConfig {
  double lr = 1e-3;
  double weight_decay = 1e-3;
  std::size_t batch = 16;
  std::size_t max_epochs = 100;
  std::uint64_t seed = 0;
  bool early_stopping = true;
  EmaStopper::Config early_stop{};
};

struct LabeledRows {
  const Matrix* features = nullptr;
  std::vector<std::size_t> samples;  // row indices into *features
  std::vector<std::size_t> targets;  // head row index per sample
};

// Mini-batch AdamW with cosine annealing over head rows [first_row, end) and
// their biases; all other rows stay untouched. Early stopping tracks the EMA of
// the mean cross-entropy on `monitor` (the training rows when null).
TrainingHistory fit_softmax_rows(ClassifierHead& head, std::size_t first_row,
                                 const LabeledRows& train, const SoftmaxTrainConfig& config,
                                 const LabeledRows* monitor = nullptr);

double mean_cross_entropy(const ClassifierHead& head, const LabeledRows& rows);

enum class FinetuneScope { new_only, head_and_new };

std::string_view scope_name(FinetuneScope s) noexcept;
FinetuneScope parse_scope(std::string_view name);

struct FinetuneConfig {
  std::size_t shots = 1;
  FinetuneScope scope = FinetuneScope::new_only;
  InitMethod init = InitMethod::coarse_copy;
  SoftmaxTrainConfig train{};
};

struct FinetuneResult {
  EditedHead edited;
  TrainingHistory history;
  std::vector<std::size_t> shot_indices;  // rows of the train set actually used
};

// Uses exactly `shots` samples per subcategory: the first ones in dataset
// order. Every train label must be a subcategory of the split. When
// `validation` is given, its samples with labels in the edited head drive
// early stopping instead of the training loss.
FinetuneResult finetune_split(const ClassifierHead& head, const SplitSpec& split,
                              const FeatureDataset& train, const FinetuneConfig& config,
                              const SplitDependencies& deps,
                              const FeatureDataset* validation = nullptr);

}  // namespace catsplit
