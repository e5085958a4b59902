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

#include "catsplit/dictionary.hpp"

#include "catsplit/document.hpp"
#include "catsplit/error.hpp"
#include "catsplit/kernels.hpp"

namespace catsplit {

const GroupVector* ModifierDictionary::group_vector(std::string_view group) const noexcept {
  for (const auto& g : coarse_vectors) {
    if (g.group == group) return &g;
  }
  return nullptr;
}

GroupVector pseudo_coarse_vector(const ClassifierHead& head, const PseudoCoarseGroup& group) {
  if (group.members.empty()) throw ValidationError("group '" + group.name + "' has no members");
  GroupVector out{group.name, group.base_text, Vector(head.dim(), 0.0), std::nullopt};
  double bias_sum = 0.0;
  for (const auto& member : group.members) {
    const auto idx = head.index_of(member);
    if (!idx) {
      throw ValidationError("unknown member '" + member + "' of group '" + group.name +
                            "' (not in head)");
    }
    kernels::axpy(1.0, head.weights.row(*idx), out.vector);
    if (head.bias) bias_sum += (*head.bias)[*idx];
  }
  const double n = static_cast<double>(group.members.size());
  for (auto& x : out.vector) x /= n;
  if (head.bias) out.bias = bias_sum / n;
  return out;
}

ModifierDictionary build_dictionary(const ClassifierHead& head, const Taxonomy& taxonomy) {
  head.validate();
  ModifierDictionary dict;
  dict.dim = head.dim();
  for (const auto& group : taxonomy.groups()) {
    auto coarse = pseudo_coarse_vector(head, group);
    for (const auto& member : group.members) {
      const auto& cat = taxonomy.category(member);
      const auto idx = head.require_index(member);
      ModifierEntry e;
      e.modifier_text = cat.modifier_text ? *cat.modifier_text
                                          : derive_modifier_text(cat.text, group.base_text);
      e.full_text = cat.text;
      e.source_group = group.name;
      e.source_label = member;
      e.vector.assign(head.weights.row(idx).begin(), head.weights.row(idx).end());
      kernels::axpy(-1.0, coarse.vector, e.vector);
      if (head.bias) e.bias_delta = (*head.bias)[idx] - *coarse.bias;
      dict.entries.push_back(std::move(e));
    }
    dict.coarse_vectors.push_back(std::move(coarse));
  }
  return dict;
}

void save_dictionary(const ModifierDictionary& dict, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  Document doc;
  doc["dim"] = dict.dim;
  doc["modifiers"] = "modifiers.cspl";
  doc["coarse"] = "coarse.cspl";
  doc["entries"] = Document::array();
  Matrix vectors(0, dict.dim);
  for (const auto& e : dict.entries) {
    Document item;
    item["modifier_text"] = e.modifier_text;
    item["full_text"] = e.full_text;
    item["source_group"] = e.source_group;
    item["source_label"] = e.source_label;
    if (e.bias_delta) item["bias_delta"] = *e.bias_delta;
    doc["entries"].push_back(std::move(item));
    vectors.append_row(e.vector);
  }
  doc["groups"] = Document::array();
  Matrix coarse(0, dict.dim);
  for (const auto& g : dict.coarse_vectors) {
    Document item;
    item["name"] = g.group;
    item["base_text"] = g.base_text;
    if (g.bias) item["bias"] = *g.bias;
    doc["groups"].push_back(std::move(item));
    coarse.append_row(g.vector);
  }
  if (!dict.entries.empty()) save_tensor(Tensor::from_matrix(vectors), dir / "modifiers.cspl");
  if (!dict.coarse_vectors.empty()) save_tensor(Tensor::from_matrix(coarse), dir / "coarse.cspl");
  write_document(doc, dir / "dictionary.json");
}

ModifierDictionary load_dictionary(const std::filesystem::path& path) {
  const auto manifest = std::filesystem::is_directory(path) ? path / "dictionary.json" : path;
  const auto doc = read_document(manifest);
  const std::string ctx = manifest.string();
  ModifierDictionary dict;
  dict.dim = require_field(doc, "dim", ctx).get<std::size_t>();
  const auto& entries = require_field(doc, "entries", ctx);
  const auto& groups = require_field(doc, "groups", ctx);

  Matrix vectors;
  if (!entries.empty()) {
    vectors = load_tensor(resolve_relative(manifest, require_string(doc, "modifiers", ctx))).to_matrix();
  }
  Matrix coarse;
  if (!groups.empty()) {
    coarse = load_tensor(resolve_relative(manifest, require_string(doc, "coarse", ctx))).to_matrix();
  }
  if (vectors.rows() != entries.size() || (!entries.empty() && vectors.cols() != dict.dim)) {
    throw ValidationError(ctx + ": modifier tensor shape does not match entries");
  }
  if (coarse.rows() != groups.size() || (!groups.empty() && coarse.cols() != dict.dim)) {
    throw ValidationError(ctx + ": coarse tensor shape does not match groups");
  }
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& item = entries[i];
    ModifierEntry e;
    e.modifier_text = require_string(item, "modifier_text", ctx);
    e.full_text = require_string(item, "full_text", ctx);
    e.source_group = require_string(item, "source_group", ctx);
    e.source_label = optional_string(item, "source_label", ctx).value_or("");
    if (item.contains("bias_delta")) e.bias_delta = item.at("bias_delta").get<double>();
    e.vector.assign(vectors.row(i).begin(), vectors.row(i).end());
    dict.entries.push_back(std::move(e));
  }
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto& item = groups[i];
    GroupVector g;
    g.group = require_string(item, "name", ctx);
    g.base_text = require_string(item, "base_text", ctx);
    if (item.contains("bias")) g.bias = item.at("bias").get<double>();
    g.vector.assign(coarse.row(i).begin(), coarse.row(i).end());
    dict.coarse_vectors.push_back(std::move(g));
  }
  return dict;
}

}  // namespace catsplit
