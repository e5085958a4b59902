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

#include "catsplit/head.hpp"

#include <set>

#include "catsplit/document.hpp"
#include "catsplit/error.hpp"
#include "catsplit/kernels.hpp"
#include "catsplit/taxonomy.hpp"

namespace catsplit {

namespace {

std::filesystem::path manifest_path(const std::filesystem::path& path) {
  if (std::filesystem::is_directory(path)) return path / "head.json";
  return path;
}

Document head_manifest(const ClassifierHead& head, const std::filesystem::path& dir) {
  head.validate();
  std::filesystem::create_directories(dir);
  save_tensor(Tensor::from_matrix(head.weights), dir / "weights.cspl");
  Document doc;
  doc["labels"] = head.labels;
  doc["weights"] = "weights.cspl";
  if (head.bias) {
    save_tensor(Tensor::from_vector(*head.bias), dir / "bias.cspl");
    doc["bias"] = "bias.cspl";
  }
  return doc;
}

}  // namespace

std::size_t argmax(std::span<const double> values) {
  if (values.empty()) throw ValidationError("argmax of an empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

void ClassifierHead::validate() const {
  if (labels.empty()) throw ValidationError("classifier head has no labels");
  if (weights.rows() != labels.size()) {
    throw ValidationError("head weight rows (" + std::to_string(weights.rows()) +
                          ") do not match label count (" + std::to_string(labels.size()) + ")");
  }
  if (weights.cols() == 0) throw ValidationError("head feature dim must be >= 1");
  if (bias && bias->size() != labels.size()) {
    throw ValidationError("head bias length does not match label count");
  }
  std::set<std::string_view> seen;
  for (const auto& l : labels) {
    if (!seen.insert(l).second) throw ValidationError("duplicate head label '" + l + "'");
  }
}

std::optional<std::size_t> ClassifierHead::index_of(std::string_view label) const noexcept {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) return i;
  }
  return std::nullopt;
}

std::size_t ClassifierHead::require_index(std::string_view label) const {
  if (auto i = index_of(label)) return *i;
  throw ValidationError("label '" + std::string(label) + "' is not in the head");
}

void ClassifierHead::logits(std::span<const double> x, std::span<double> out) const {
  if (x.size() != dim()) {
    throw ValidationError("feature dim " + std::to_string(x.size()) + " does not match head dim " +
                          std::to_string(dim()));
  }
  kernels::gemv(weights.values(), weights.rows(), weights.cols(), x, out);
  if (bias) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += (*bias)[i];
  }
}

Vector ClassifierHead::logits(std::span<const double> x) const {
  Vector out(labels.size());
  logits(x, out);
  return out;
}

std::size_t ClassifierHead::predict(std::span<const double> x) const { return argmax(logits(x)); }

const std::string& ClassifierHead::predict_label(std::span<const double> x) const {
  return labels[predict(x)];
}

std::string_view init_method_name(InitMethod m) noexcept {
  switch (m) {
    case InitMethod::retrieval: return "retrieval";
    case InitMethod::joint: return "joint";
    case InitMethod::alignment: return "alignment";
    case InitMethod::coarse_copy: return "coarse-copy";
    case InitMethod::random: return "random";
  }
  return "unknown";
}

InitMethod parse_init_method(std::string_view name) {
  for (const auto m : {InitMethod::retrieval, InitMethod::joint, InitMethod::alignment,
                       InitMethod::coarse_copy, InitMethod::random}) {
    if (init_method_name(m) == name) return m;
  }
  throw ValidationError("unknown method '" + std::string(name) +
                        "' (expected retrieval|joint|alignment|coarse-copy|random)");
}

ClassifierHead head_from_rows(const Taxonomy& taxonomy, Matrix weights,
                              std::optional<Vector> bias) {
  ClassifierHead head{taxonomy.row_order(), std::move(weights), std::move(bias)};
  head.validate();
  return head;
}

void save_head(const ClassifierHead& head, const std::filesystem::path& dir) {
  write_document(head_manifest(head, dir), dir / "head.json");
}

void save_edited_head(const EditedHead& edited, const std::filesystem::path& dir) {
  auto doc = head_manifest(edited.head, dir);
  Document edit;
  edit["coarse_id"] = edited.coarse_id;
  edit["retained"] = edited.retained;
  edit["provenance"] = Document::array();
  for (const auto& [label, p] : edited.provenance) {
    Document item;
    item["label"] = label;
    item["method"] = std::string(init_method_name(p.method));
    if (p.source_entry) item["source_entry"] = *p.source_entry;
    if (!p.source_text.empty()) item["source_text"] = p.source_text;
    edit["provenance"].push_back(std::move(item));
  }
  doc["edit"] = std::move(edit);
  write_document(doc, dir / "head.json");
}

ClassifierHead load_head(const std::filesystem::path& path) {
  return load_edited_head(path).head;
}

EditedHead load_edited_head(const std::filesystem::path& path) {
  const auto manifest = manifest_path(path);
  const auto doc = read_document(manifest);
  const std::string ctx = manifest.string();
  EditedHead out;
  out.head.labels = string_list(doc, "labels", ctx);
  out.head.weights = load_tensor(resolve_relative(manifest, require_string(doc, "weights", ctx)))
                         .to_matrix();
  if (auto bias = optional_string(doc, "bias", ctx)) {
    out.head.bias = load_tensor(resolve_relative(manifest, *bias)).to_vector();
  }
  try {
    out.head.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(ctx + ": " + e.what());
  }
  out.retained = out.head.size();
  if (doc.contains("edit")) {
    const auto& edit = doc.at("edit");
    out.coarse_id = require_string(edit, "coarse_id", ctx);
    out.retained = require_field(edit, "retained", ctx).get<std::size_t>();
    for (const auto& item : require_field(edit, "provenance", ctx)) {
      Provenance p;
      p.method = parse_init_method(require_string(item, "method", ctx));
      if (item.contains("source_entry")) p.source_entry = item.at("source_entry").get<std::size_t>();
      p.source_text = optional_string(item, "source_text", ctx).value_or("");
      out.provenance.emplace_back(require_string(item, "label", ctx), std::move(p));
    }
  }
  return out;
}

}  // namespace catsplit
