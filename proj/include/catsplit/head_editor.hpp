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

// Head surgery: replace a coarse category's row with one row per new
// subcategory. New rows are built from the coarse row plus a modifier vector
// (retrieved from the dictionary or synthesized by the alignment model), or
// copied / randomly initialized for the low-shot ablations. Retained rows are
// copied verbatim.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "catsplit/alignment.hpp"
#include "catsplit/data.hpp"
#include "catsplit/dictionary.hpp"
#include "catsplit/head.hpp"
#include "catsplit/taxonomy.hpp"

namespace catsplit {

struct RetrievalResult {
  std::size_t entry = 0;
  double score = 0.0;
};

// argmax over entries of cos(phi(entry modifier), phi(target modifier));
// ties go to the lowest entry index.
RetrievalResult retrieve_modifier(const ModifierDictionary& dict,
                                  const TextEmbeddingTable& embeddings,
                                  std::string_view target_modifier_text);

// argmax of cos(phi(entry label), phi(target label)) + cos(phi(entry modifier),
// phi(target modifier)), unweighted; lowest-index tie-break.
RetrievalResult retrieve_modifier_joint(const ModifierDictionary& dict,
                                        const TextEmbeddingTable& embeddings,
                                        std::string_view target_full_text,
                                        std::string_view target_modifier_text);

struct ComposedRow {
  Vector weight;
  std::optional<double> bias;
};

// w_c + v_m; the bias becomes b_c + bias_delta when both are present.
ComposedRow compose_weight(std::span<const double> coarse_weight,
                           std::optional<double> coarse_bias, const ModifierEntry& entry);
Vector compose_weight(std::span<const double> coarse_weight, const ModifierEntry& entry);

struct SplitDependencies {
  const ModifierDictionary* dictionary = nullptr;
  const TextEmbeddingTable* embeddings = nullptr;
  const AlignmentModel* alignment = nullptr;
};

inline constexpr double kRandomInitStddev = 0.02;

// Labels of the result: original order without the coarse label, then the
// split's subcategories in declaration order. `seed` only matters for
// InitMethod::random.
EditedHead split_head(const ClassifierHead& head, const SplitSpec& split, InitMethod method,
                      const SplitDependencies& deps, std::uint64_t seed = 0);

// Predictions other than coarse_id pass through; predictions equal to coarse_id
// are replaced by the candidate whose text embedding is most cosine-similar to
// the sample's video embedding.
std::vector<std::string> vlm_baseline_assign(std::span<const std::string> base_predictions,
                                             const Matrix& video_embeddings,
                                             std::span<const Subcategory> candidates,
                                             const TextEmbeddingTable& embeddings,
                                             std::string_view coarse_id);

}  // namespace catsplit
