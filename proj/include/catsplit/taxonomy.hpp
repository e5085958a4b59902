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

// Label space, pseudo-coarse groupings and split specifications.
//
// Document schema (JSON):
//
//   {
//     "categories": [
//       {"id": "push_lr", "text": "Pushing something from left to right",
//        "granularity": "fine", "group": "pushing",
//        "tags": ["direction"], "modifier_text": "left to right"},
//       {"id": "push", "text": "Pushing something", "granularity": "coarse"}
//     ],
//     "groups": [{"name": "pushing", "base_text": "pushing something"}],
//     "splits": [
//       {"coarse_id": "push",
//        "subcategories": [{"id": "push_up", "full_text": "Pushing something up",
//                           "modifier_text": "up"}]}
//     ],
//     "row_order": ["push_lr", "push"]
//   }
//
// "group", "tags", "modifier_text" (category and subcategory), "groups",
// "splits" and "row_order" are optional. Groups are assembled from the
// per-category "group" field; the "groups" section only overrides base texts.
// "row_order" lists every category id in the order of head-weight rows and
// defaults to declaration order.

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "catsplit/document.hpp"

namespace catsplit {

enum class Granularity { coarse, fine };

struct Category {
  std::string id;
  std::string text;
  Granularity granularity = Granularity::fine;
  std::optional<std::string> group;
  std::vector<std::string> tags;
  // Explicit in the document, or derived at load for grouped categories.
  std::optional<std::string> modifier_text;

  bool operator==(const Category&) const = default;
};

struct PseudoCoarseGroup {
  std::string name;
  std::string base_text;
  std::vector<std::string> members;  // declaration order

  bool operator==(const PseudoCoarseGroup&) const = default;
};

struct Subcategory {
  std::string id;
  std::string full_text;
  std::string modifier_text;

  bool operator==(const Subcategory&) const = default;
};

struct SplitSpec {
  std::string coarse_id;
  std::vector<Subcategory> subcategories;

  std::vector<std::string> subcategory_ids() const;
  bool operator==(const SplitSpec&) const = default;
};

// Raw split before modifier texts are resolved against the coarse label.
struct SplitDraft {
  std::string coarse_id;
  struct Item {
    std::string id;
    std::string full_text;
    std::optional<std::string> modifier_text;
  };
  std::vector<Item> subcategories;
};

class Taxonomy {
 public:
  Taxonomy() = default;

  // Validates and resolves derived texts. base_text_overrides maps a group name
  // to an explicit base text.
  static Taxonomy build(std::vector<Category> categories,
                        const std::vector<std::pair<std::string, std::string>>& base_text_overrides,
                        const std::vector<SplitDraft>& splits,
                        std::optional<std::vector<std::string>> row_order = std::nullopt);
  static Taxonomy from_document(const Document& doc);
  Document to_document() const;

  const std::vector<Category>& categories() const noexcept { return categories_; }
  const std::vector<PseudoCoarseGroup>& groups() const noexcept { return groups_; }
  const std::vector<SplitSpec>& splits() const noexcept { return splits_; }
  const std::vector<std::string>& row_order() const noexcept { return row_order_; }

  const Category* find(std::string_view id) const noexcept;
  const Category& category(std::string_view id) const;
  const PseudoCoarseGroup* find_group(std::string_view name) const noexcept;
  const SplitSpec& split_for(std::string_view coarse_id) const;

  // Row order with the split's coarse id removed and its subcategories
  // appended: the edited label space.
  std::vector<std::string> labels_after_split(const SplitSpec& split) const;

  bool operator==(const Taxonomy&) const = default;

 private:
  std::vector<Category> categories_;
  std::vector<PseudoCoarseGroup> groups_;
  std::vector<SplitSpec> splits_;
  std::vector<std::string> row_order_;
};

Taxonomy load_taxonomy(const std::filesystem::path& path);
void save_taxonomy(const Taxonomy& taxonomy, const std::filesystem::path& path);

// Lowercased whitespace tokens.
std::vector<std::string> tokenize(std::string_view text);

// Tokens of fine_text with one occurrence of each base_text token removed,
// order preserved, joined by single spaces. Throws "empty modifier" when
// nothing remains.
std::string derive_modifier_text(std::string_view fine_text, std::string_view base_text);

// Longest common token prefix of all member texts. Throws "no shared base"
// when it is empty.
std::string derive_base_text(std::span<const std::string> member_texts);

std::string_view granularity_name(Granularity g) noexcept;

}  // namespace catsplit
