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

// Regressor from text-embedding space to head-weight space.
//
// A one-hidden-layer ReLU MLP is fitted by mini-batch AdamW with cosine
// annealing on (text embedding, weight vector) pairs taken from a modifier
// dictionary and, optionally, from the head's own categories and group
// vectors. It then produces modifier vectors for modifier texts that have no
// dictionary entry.
//
// Checkpoint directory: alignment.json (dims, activation, config, seed,
// tensor names) plus w1.cspl, b1.cspl, w2.cspl, b2.cspl.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "catsplit/data.hpp"
#include "catsplit/dictionary.hpp"
#include "catsplit/head.hpp"
#include "catsplit/optim.hpp"
#include "catsplit/taxonomy.hpp"

namespace catsplit {

struct AlignmentModel {
  Matrix w1;  // hidden x input
  Vector b1;
  Matrix w2;  // output x hidden
  Vector b2;

  std::size_t input_dim() const noexcept { return w1.cols(); }
  std::size_t hidden_dim() const noexcept { return w1.rows(); }
  std::size_t output_dim() const noexcept { return w2.rows(); }

  static AlignmentModel zeros(std::size_t input, std::size_t hidden, std::size_t output);
  // Weights ~ N(0, 1/sqrt(fan_in)), biases zero.
  static AlignmentModel initialized(std::size_t input, std::size_t hidden, std::size_t output,
                                    Prng& rng);

  void validate() const;
  Vector forward(std::span<const double> x) const;

  bool operator==(const AlignmentModel&) const = default;
};

enum class PairComposition { mod, mod_and_cat };

std::string_view composition_name(PairComposition c) noexcept;
PairComposition parse_composition(std::string_view name);

struct TrainingPairs {
  Matrix inputs;   // N x n text embeddings
  Matrix targets;  // N x m weight-space vectors
  std::vector<std::string> texts;
  PairComposition composition = PairComposition::mod;

  std::size_t size() const noexcept { return inputs.rows(); }
};

// mod: one pair per dictionary entry (modifier text -> modifier vector).
// mod+cat: additionally one pair per head category (label text -> weight row)
// and one per group (base text -> group vector).
TrainingPairs build_training_pairs(const ModifierDictionary& dict, const ClassifierHead& head,
                                   const Taxonomy& taxonomy, const TextEmbeddingTable& embeddings,
                                   PairComposition composition);

struct AlignmentConfig {
  std::size_t hidden = 384;
  double lr = 1e-3;
  double weight_decay = 0.0;
  std::size_t batch = 10;
  std::size_t max_epochs = 100;
  std::uint64_t seed = 0;
  bool early_stopping = true;
  EmaStopper::Config early_stop{};
};

struct EpochRecord {
  std::size_t epoch = 0;
  double lr = 0.0;
  double loss = 0.0;    // mean squared L2 error per pair after the epoch
  double metric = 0.0;  // early-stopping metric after the epoch
  double ema = 0.0;
  double best = 0.0;
};

struct TrainingHistory {
  std::vector<EpochRecord> epochs;
  bool stopped_early = false;
};

struct AlignmentResult {
  AlignmentModel model;
  TrainingHistory history;
};

struct AlignmentGradients {
  Matrix w1;
  Vector b1;
  Matrix w2;
  Vector b2;

  static AlignmentGradients zeros_like(const AlignmentModel& model);
};

// Sum over the selected pairs of |g(x) - v|^2. Accumulates gradients into
// `grads` when it is non-null.
double alignment_loss(const AlignmentModel& model, const TrainingPairs& pairs,
                      std::span<const std::size_t> indices, AlignmentGradients* grads);

// Mean cosine similarity between predictions and targets over all pairs; a
// zero-norm prediction or target contributes 0.
double mean_prediction_cosine(const AlignmentModel& model, const TrainingPairs& pairs);

AlignmentResult train_alignment(const TrainingPairs& pairs, const AlignmentConfig& config);

Vector synthesize_modifier(const AlignmentModel& model, std::string_view modifier_text,
                           const TextEmbeddingTable& embeddings);

void save_alignment_model(const AlignmentModel& model, const AlignmentConfig& config,
                          const std::filesystem::path& dir);
AlignmentModel load_alignment_model(const std::filesystem::path& path);

}  // namespace catsplit
