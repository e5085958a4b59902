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

// Linear classification heads and their on-disk form.
//
// A head directory holds:
//   head.json     {"labels": [...], "weights": "weights.cspl", "bias": "bias.cspl",
//                  "edit": {...}}   ("bias" and "edit" optional)
//   weights.cspl  |labels| x d, row i = weight vector of labels[i]
//   bias.cspl     |labels|
//
// Edited heads add an "edit" section: the split target and, per new label,
// how its row was initialized.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "catsplit/tensor.hpp"

namespace catsplit {

class Taxonomy;

// Index of the largest element; ties go to the lowest index.
std::size_t argmax(std::span<const double> values);

struct ClassifierHead {
  std::vector<std::string> labels;
  Matrix weights;
  std::optional<Vector> bias;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t dim() const noexcept { return weights.cols(); }

  // Throws ValidationError on shape mismatch, duplicate labels or empty head.
  void validate() const;
  std::optional<std::size_t> index_of(std::string_view label) const noexcept;
  std::size_t require_index(std::string_view label) const;

  void logits(std::span<const double> x, std::span<double> out) const;
  Vector logits(std::span<const double> x) const;
  std::size_t predict(std::span<const double> x) const;
  const std::string& predict_label(std::span<const double> x) const;

  bool operator==(const ClassifierHead&) const = default;
};

enum class InitMethod { retrieval, joint, alignment, coarse_copy, random };

std::string_view init_method_name(InitMethod m) noexcept;
InitMethod parse_init_method(std::string_view name);

struct Provenance {
  InitMethod method = InitMethod::coarse_copy;
  // Dictionary entry the modifier came from (retrieval / joint).
  std::optional<std::size_t> source_entry;
  std::string source_text;

  bool operator==(const Provenance&) const = default;
};

struct EditedHead {
  ClassifierHead head;
  std::string coarse_id;
  // Rows [0, retained) are carried over from the original head.
  std::size_t retained = 0;
  std::vector<std::pair<std::string, Provenance>> provenance;

  bool operator==(const EditedHead&) const = default;
};

// Head whose label order is the taxonomy's row order.
ClassifierHead head_from_rows(const Taxonomy& taxonomy, Matrix weights,
                              std::optional<Vector> bias = std::nullopt);

void save_head(const ClassifierHead& head, const std::filesystem::path& dir);
void save_edited_head(const EditedHead& edited, const std::filesystem::path& dir);
// Accepts a head directory or the path of its head.json.
ClassifierHead load_head(const std::filesystem::path& path);
// Heads without an "edit" section load with an empty provenance.
EditedHead load_edited_head(const std::filesystem::path& path);

}  // namespace catsplit
