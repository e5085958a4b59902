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

// Modifier dictionary mined from a trained head.
//
// For each pseudo-coarse group the member weight rows are averaged into a
// group vector; every member's offset from that mean is a modifier vector,
// keyed by its modifier text and full label text. Biases, when the head has
// them, go through the same mean/offset arithmetic.
//
// On disk a dictionary is a directory:
//   dictionary.json   entry and group metadata (texts, groups, bias terms)
//   modifiers.cspl    entries x d, in entry order
//   coarse.cspl       groups x d, in group declaration order

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "catsplit/head.hpp"
#include "catsplit/taxonomy.hpp"
#include "catsplit/tensor.hpp"

namespace catsplit {

struct ModifierEntry {
  std::string modifier_text;
  std::string full_text;
  std::string source_group;
  std::string source_label;
  Vector vector;
  std::optional<double> bias_delta;

  bool operator==(const ModifierEntry&) const = default;
};

struct GroupVector {
  std::string group;
  std::string base_text;
  Vector vector;
  std::optional<double> bias;

  bool operator==(const GroupVector&) const = default;
};

struct ModifierDictionary {
  // Ordered by (group declaration order, member declaration order).
  std::vector<ModifierEntry> entries;
  std::vector<GroupVector> coarse_vectors;
  std::size_t dim = 0;

  bool empty() const noexcept { return entries.empty(); }
  const GroupVector* group_vector(std::string_view group) const noexcept;

  bool operator==(const ModifierDictionary&) const = default;
};

// Mean of the group members' rows (and biases).
GroupVector pseudo_coarse_vector(const ClassifierHead& head, const PseudoCoarseGroup& group);

ModifierDictionary build_dictionary(const ClassifierHead& head, const Taxonomy& taxonomy);

void save_dictionary(const ModifierDictionary& dict, const std::filesystem::path& dir);
// Accepts the dictionary directory or its dictionary.json.
ModifierDictionary load_dictionary(const std::filesystem::path& path);

}  // namespace catsplit
