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

#include "catsplit/taxonomy.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include "catsplit/error.hpp"

namespace catsplit {

namespace {

std::string join(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

Granularity parse_granularity(const std::string& s, const std::string& context) {
  if (s == "coarse") return Granularity::coarse;
  if (s == "fine") return Granularity::fine;
  throw ValidationError(context + ": granularity must be 'coarse' or 'fine', got '" + s + "'");
}

}  // namespace

std::string_view granularity_name(Granularity g) noexcept {
  return g == Granularity::coarse ? "coarse" : "fine";
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (const char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      current += static_cast<char>(std::tolower(c));
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::string derive_modifier_text(std::string_view fine_text, std::string_view base_text) {
  auto remaining = tokenize(fine_text);
  for (const auto& base_token : tokenize(base_text)) {
    const auto it = std::find(remaining.begin(), remaining.end(), base_token);
    if (it != remaining.end()) remaining.erase(it);
  }
  if (remaining.empty()) {
    throw ValidationError("empty modifier: '" + std::string(fine_text) + "' minus '" +
                          std::string(base_text) + "'");
  }
  return join(remaining);
}

std::string derive_base_text(std::span<const std::string> member_texts) {
  if (member_texts.size() < 2) throw ValidationError("base text needs at least two members");
  auto prefix = tokenize(member_texts.front());
  for (std::size_t i = 1; i < member_texts.size(); ++i) {
    const auto tokens = tokenize(member_texts[i]);
    std::size_t n = 0;
    while (n < prefix.size() && n < tokens.size() && prefix[n] == tokens[n]) ++n;
    prefix.resize(n);
  }
  if (prefix.empty()) throw ValidationError("no shared base among group member texts");
  return join(prefix);
}

std::vector<std::string> SplitSpec::subcategory_ids() const {
  std::vector<std::string> ids;
  ids.reserve(subcategories.size());
  for (const auto& s : subcategories) ids.push_back(s.id);
  return ids;
}

Taxonomy Taxonomy::build(
    std::vector<Category> categories,
    const std::vector<std::pair<std::string, std::string>>& base_text_overrides,
    const std::vector<SplitDraft>& splits, std::optional<std::vector<std::string>> row_order) {
  Taxonomy t;
  std::set<std::string> ids;
  std::vector<std::string> group_order;
  std::map<std::string, std::vector<std::string>> members;

  for (const auto& c : categories) {
    if (c.id.empty()) throw ValidationError("category with empty id");
    if (c.text.empty()) throw ValidationError("category '" + c.id + "' has empty text");
    if (!ids.insert(c.id).second) throw ValidationError("duplicate id '" + c.id + "'");
    if (c.group) {
      if (c.granularity == Granularity::coarse) {
        throw ValidationError("coarse category '" + c.id + "' cannot belong to group '" +
                              *c.group + "'");
      }
      if (!members.contains(*c.group)) group_order.push_back(*c.group);
      members[*c.group].push_back(c.id);
    }
  }

  std::map<std::string, std::string> overrides;
  for (const auto& [name, base] : base_text_overrides) {
    if (!members.contains(name)) {
      throw ValidationError("base text given for unknown group '" + name + "'");
    }
    if (base.empty()) throw ValidationError("group '" + name + "' has empty base_text");
    overrides[name] = base;
  }

  t.categories_ = std::move(categories);
  auto text_of = [&](const std::string& id) -> const std::string& {
    return std::find_if(t.categories_.begin(), t.categories_.end(),
                        [&](const Category& c) { return c.id == id; })
        ->text;
  };

  for (const auto& name : group_order) {
    const auto& ids_in_group = members[name];
    if (ids_in_group.size() < 2) {
      throw ValidationError("singleton group '" + name + "' (a group needs at least 2 members)");
    }
    PseudoCoarseGroup g{name, {}, ids_in_group};
    if (const auto it = overrides.find(name); it != overrides.end()) {
      g.base_text = it->second;
    } else {
      std::vector<std::string> texts;
      for (const auto& id : ids_in_group) texts.push_back(text_of(id));
      try {
        g.base_text = derive_base_text(texts);
      } catch (const ValidationError& e) {
        throw ValidationError("group '" + name + "': " + e.what());
      }
    }
    t.groups_.push_back(std::move(g));
  }

  for (auto& c : t.categories_) {
    if (!c.group || c.modifier_text) continue;
    const auto* g = t.find_group(*c.group);
    try {
      c.modifier_text = derive_modifier_text(c.text, g->base_text);
    } catch (const ValidationError& e) {
      throw ValidationError("category '" + c.id + "': " + e.what());
    }
  }
  for (const auto& c : t.categories_) {
    if (c.modifier_text && c.modifier_text->empty()) {
      throw ValidationError("category '" + c.id + "' has empty modifier_text");
    }
  }

  std::set<std::string> split_targets;
  for (const auto& draft : splits) {
    const auto* coarse = t.find(draft.coarse_id);
    if (!coarse) throw ValidationError("split target '" + draft.coarse_id + "' is not in the label space");
    if (coarse->granularity != Granularity::coarse) {
      throw ValidationError("split target '" + draft.coarse_id + "' is not coarse-grained");
    }
    if (!split_targets.insert(draft.coarse_id).second) {
      throw ValidationError("duplicate split for '" + draft.coarse_id + "'");
    }
    if (draft.subcategories.size() < 2) {
      throw ValidationError("split of '" + draft.coarse_id + "' needs at least 2 subcategories");
    }
    SplitSpec spec{draft.coarse_id, {}};
    std::set<std::string> sub_ids;
    for (const auto& item : draft.subcategories) {
      if (item.id.empty() || item.full_text.empty()) {
        throw ValidationError("split of '" + draft.coarse_id + "' has a subcategory with empty id or text");
      }
      if (ids.contains(item.id)) {
        throw ValidationError("subcategory id '" + item.id +
                              "' already exists in the label space (S^c ∩ Y ≠ ∅)");
      }
      if (!sub_ids.insert(item.id).second) {
        throw ValidationError("duplicate subcategory id '" + item.id + "'");
      }
      std::string modifier;
      if (item.modifier_text) {
        if (item.modifier_text->empty()) {
          throw ValidationError("subcategory '" + item.id + "' has empty modifier_text");
        }
        modifier = *item.modifier_text;
      } else {
        try {
          modifier = derive_modifier_text(item.full_text, coarse->text);
        } catch (const ValidationError& e) {
          throw ValidationError("subcategory '" + item.id + "': " + e.what());
        }
      }
      spec.subcategories.push_back({item.id, item.full_text, std::move(modifier)});
    }
    t.splits_.push_back(std::move(spec));
  }

  if (row_order) {
    if (row_order->size() != t.categories_.size()) {
      throw ValidationError("row_order must list every category exactly once");
    }
    std::set<std::string> seen;
    for (const auto& id : *row_order) {
      if (!ids.contains(id)) throw ValidationError("row_order names unknown category '" + id + "'");
      if (!seen.insert(id).second) throw ValidationError("row_order repeats '" + id + "'");
    }
    t.row_order_ = std::move(*row_order);
  } else {
    for (const auto& c : t.categories_) t.row_order_.push_back(c.id);
  }
  return t;
}

Taxonomy Taxonomy::from_document(const Document& doc) {
  const std::string ctx = "taxonomy";
  if (!doc.is_object()) throw ValidationError("taxonomy document must be an object");
  const auto& cats = require_field(doc, "categories", ctx);
  if (!cats.is_array()) throw ValidationError("taxonomy: 'categories' must be an array");

  std::vector<Category> categories;
  for (const auto& item : cats) {
    const std::string cctx = "category";
    Category c;
    c.id = require_string(item, "id", cctx);
    const std::string where = "category '" + c.id + "'";
    c.text = require_string(item, "text", where);
    c.granularity = parse_granularity(require_string(item, "granularity", where), where);
    c.group = optional_string(item, "group", where);
    if (item.contains("tags")) c.tags = string_list(item, "tags", where);
    c.modifier_text = optional_string(item, "modifier_text", where);
    categories.push_back(std::move(c));
  }

  std::vector<std::pair<std::string, std::string>> overrides;
  if (doc.contains("groups")) {
    const auto& groups = doc.at("groups");
    if (!groups.is_array()) throw ValidationError("taxonomy: 'groups' must be an array");
    for (const auto& g : groups) {
      const auto name = require_string(g, "name", "group");
      if (auto base = optional_string(g, "base_text", "group '" + name + "'")) {
        overrides.emplace_back(name, *base);
      }
    }
  }

  std::vector<SplitDraft> drafts;
  if (doc.contains("splits")) {
    const auto& splits = doc.at("splits");
    if (!splits.is_array()) throw ValidationError("taxonomy: 'splits' must be an array");
    for (const auto& s : splits) {
      SplitDraft d;
      d.coarse_id = require_string(s, "coarse_id", "split");
      const std::string where = "split of '" + d.coarse_id + "'";
      const auto& subs = require_field(s, "subcategories", where);
      if (!subs.is_array()) throw ValidationError(where + ": 'subcategories' must be an array");
      for (const auto& sub : subs) {
        SplitDraft::Item item;
        item.id = require_string(sub, "id", where);
        item.full_text = require_string(sub, "full_text", where);
        item.modifier_text = optional_string(sub, "modifier_text", where);
        d.subcategories.push_back(std::move(item));
      }
      drafts.push_back(std::move(d));
    }
  }

  std::optional<std::vector<std::string>> row_order;
  if (doc.contains("row_order")) row_order = string_list(doc, "row_order", ctx);

  return build(std::move(categories), overrides, drafts, std::move(row_order));
}

Document Taxonomy::to_document() const {
  Document doc;
  doc["categories"] = Document::array();
  for (const auto& c : categories_) {
    Document item;
    item["id"] = c.id;
    item["text"] = c.text;
    item["granularity"] = std::string(granularity_name(c.granularity));
    if (c.group) item["group"] = *c.group;
    if (!c.tags.empty()) item["tags"] = c.tags;
    if (c.modifier_text) item["modifier_text"] = *c.modifier_text;
    doc["categories"].push_back(std::move(item));
  }
  doc["groups"] = Document::array();
  for (const auto& g : groups_) {
    Document item;
    item["name"] = g.name;
    item["base_text"] = g.base_text;
    doc["groups"].push_back(std::move(item));
  }
  doc["splits"] = Document::array();
  for (const auto& s : splits_) {
    Document item;
    item["coarse_id"] = s.coarse_id;
    item["subcategories"] = Document::array();
    for (const auto& sub : s.subcategories) {
      Document si;
      si["id"] = sub.id;
      si["full_text"] = sub.full_text;
      si["modifier_text"] = sub.modifier_text;
      item["subcategories"].push_back(std::move(si));
    }
    doc["splits"].push_back(std::move(item));
  }
  doc["row_order"] = row_order_;
  return doc;
}

const Category* Taxonomy::find(std::string_view id) const noexcept {
  for (const auto& c : categories_) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

const Category& Taxonomy::category(std::string_view id) const {
  if (const auto* c = find(id)) return *c;
  throw ValidationError("unknown category '" + std::string(id) + "'");
}

const PseudoCoarseGroup* Taxonomy::find_group(std::string_view name) const noexcept {
  for (const auto& g : groups_) {
    if (g.name == name) return &g;
  }
  return nullptr;
}

const SplitSpec& Taxonomy::split_for(std::string_view coarse_id) const {
  for (const auto& s : splits_) {
    if (s.coarse_id == coarse_id) return s;
  }
  throw ValidationError("no split declared for '" + std::string(coarse_id) + "'");
}

std::vector<std::string> Taxonomy::labels_after_split(const SplitSpec& split) const {
  std::vector<std::string> labels;
  labels.reserve(row_order_.size() - 1 + split.subcategories.size());
  for (const auto& id : row_order_) {
    if (id != split.coarse_id) labels.push_back(id);
  }
  for (const auto& s : split.subcategories) labels.push_back(s.id);
  return labels;
}

Taxonomy load_taxonomy(const std::filesystem::path& path) {
  const auto doc = read_document(path);
  try {
    return Taxonomy::from_document(doc);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void save_taxonomy(const Taxonomy& taxonomy, const std::filesystem::path& path) {
  write_document(taxonomy.to_document(), path);
}

}  // namespace catsplit
