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

// Seeded synthetic category-splitting problems with planted compositional
// structure.
//
// B bases and Mo modifiers get mutually orthonormal directions in feature
// space (Gram-Schmidt on Gaussian draws). Class (i, j) draws features
//   x = b_i + alpha * m_j + N(0, sigma^2 I).
// Text embeddings mirror the structure with their own orthonormal sets:
//   phi("base<i> mod<j>") = normalize(u_i + v_j), phi("mod<j>") = v_j,
//   phi("base<i>") = u_i.
// The classes of one held-out base are collapsed into a single coarse label; a
// softmax head trained on that mixed-granularity label space is the model to
// edit, and a head trained on fully fine labels is the reference oracle.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include "catsplit/alignment.hpp"
#include "catsplit/data.hpp"
#include "catsplit/document.hpp"
#include "catsplit/evaluator.hpp"
#include "catsplit/head.hpp"
#include "catsplit/lowshot.hpp"
#include "catsplit/taxonomy.hpp"

namespace catsplit {

struct SynthConfig {
  std::size_t feature_dim = 64;
  std::size_t text_dim = 32;
  std::size_t bases = 4;
  std::size_t modifiers = 4;
  std::size_t train_per_class = 50;
  std::size_t test_per_class = 50;
  double feature_noise = 0.1;
  double modifier_amplitude = 1.0;
  std::size_t held_out_base = 0;
  std::uint64_t seed = 0;
  // Per-dimension noise on the text-space "video embeddings" used by the
  // vision-language baseline.
  double video_noise = 0.5;
  SoftmaxTrainConfig head_training{1e-3, 0.0, 16, 200, 0, true, {}};

  void validate() const;
  static SynthConfig from_document(const Document& doc);
  Document to_document() const;
};

struct SynthBundle {
  SynthConfig config;
  Taxonomy taxonomy;
  ClassifierHead head;        // mixed granularity, rows in taxonomy row order
  EditedHead oracle;          // fully fine labels, same layout as a split result
  TextEmbeddingTable embeddings;
  FeatureDataset train;
  FeatureDataset eval;
  Matrix eval_video_embeddings;  // one text-space vector per eval sample
  Matrix base_directions;        // B x d
  Matrix modifier_directions;    // Mo x d
  double oracle_split_accuracy = 0.0;
  double oracle_accuracy = 0.0;

  const SplitSpec& split() const { return taxonomy.splits().front(); }
};

// Orthonormalizes the rows of `vectors` in place (modified Gram-Schmidt).
void gram_schmidt(Matrix& vectors);

std::string synth_category_id(std::size_t base, std::size_t modifier);
std::string synth_category_text(std::size_t base, std::size_t modifier);
std::string synth_base_text(std::size_t base);
std::string synth_modifier_text(std::size_t modifier);

SynthBundle generate(const SynthConfig& config);
void write_bundle(const SynthBundle& bundle, const std::filesystem::path& dir);

// Samples of `data` labeled with one of the split's subcategories.
FeatureDataset split_samples(const FeatureDataset& data, const SplitSpec& split);

// Generality of `edited` on the split's eval samples minus the oracle's.
double oracle_eval(const SynthBundle& bundle, const ClassifierHead& edited);

struct PipelineConfig {
  SynthConfig synth;
  InitMethod method = InitMethod::retrieval;
  PairComposition composition = PairComposition::mod_and_cat;
  AlignmentConfig alignment{};
  bool lowshot = false;
  FinetuneConfig finetune{};
};

struct PipelineOutcome {
  SplitMetrics metrics;
  double oracle_gap = 0.0;
  EditedHead edited;
};

// Dictionary -> (alignment) -> split or low-shot fine-tune -> evaluation on an
// already generated bundle. Seeds for alignment / fine-tuning / random init are
// derived from the bundle seed.
PipelineOutcome run_pipeline(const SynthBundle& bundle, const PipelineConfig& config);

PipelineConfig pipeline_config_from_document(const Document& doc);

}  // namespace catsplit
