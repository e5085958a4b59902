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

#include "catsplit/data.hpp"

#include "catsplit/document.hpp"
#include "catsplit/error.hpp"

namespace catsplit {

namespace {

std::filesystem::path tensor_beside(const std::filesystem::path& document) {
  auto p = document;
  p.replace_extension(".cspl");
  return p;
}

}  // namespace

TextEmbeddingTable::TextEmbeddingTable(std::vector<std::string> keys, Matrix vectors)
    : keys_(std::move(keys)), vectors_(std::move(vectors)) {
  if (keys_.size() != vectors_.rows()) {
    throw ValidationError("embedding table: " + std::to_string(keys_.size()) + " keys but " +
                          std::to_string(vectors_.rows()) + " rows");
  }
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    if (!index_.emplace(keys_[i], i).second) {
      throw ValidationError("embedding table: duplicate key '" + keys_[i] + "'");
    }
    if (l2_norm(vectors_.row(i)) == 0.0) {
      throw ValidationError("embedding table: zero-norm row for key '" + keys_[i] + "'");
    }
  }
}

bool TextEmbeddingTable::contains(std::string_view key) const {
  return index_.contains(std::string(key));
}

std::span<const double> TextEmbeddingTable::lookup(std::string_view key) const {
  const auto it = index_.find(std::string(key));
  if (it == index_.end()) throw ValidationError("missing embedding key '" + std::string(key) + "'");
  return vectors_.row(it->second);
}

TextEmbeddingTable load_embedding_table(const std::filesystem::path& document) {
  const auto doc = read_document(document);
  const std::string ctx = document.string();
  auto keys = string_list(doc, "keys", ctx);
  const auto tensor_path = doc.contains("tensor")
                               ? resolve_relative(document, require_string(doc, "tensor", ctx))
                               : tensor_beside(document);
  auto vectors = load_tensor(tensor_path).to_matrix();
  try {
    return TextEmbeddingTable(std::move(keys), std::move(vectors));
  } catch (const ValidationError& e) {
    throw ValidationError(ctx + ": " + e.what());
  }
}

void save_embedding_table(const TextEmbeddingTable& table, const std::filesystem::path& document) {
  const auto tensor_path = tensor_beside(document);
  save_tensor(Tensor::from_matrix(table.vectors()), tensor_path);
  Document doc;
  doc["keys"] = table.keys();
  doc["tensor"] = tensor_path.filename().string();
  write_document(doc, document);
}

void FeatureDataset::validate() const {
  if (labels.empty()) throw ValidationError("feature dataset is empty");
  if (features.rows() != labels.size()) {
    throw ValidationError("feature dataset: " + std::to_string(labels.size()) + " labels but " +
                          std::to_string(features.rows()) + " feature rows");
  }
}

FeatureDataset load_feature_dataset(const std::filesystem::path& document) {
  const auto doc = read_document(document);
  const std::string ctx = document.string();
  FeatureDataset data;
  data.labels = string_list(doc, "labels", ctx);
  const auto role = optional_string(doc, "role", ctx).value_or("train");
  if (role == "train") {
    data.role = DatasetRole::train;
  } else if (role == "eval") {
    data.role = DatasetRole::eval;
  } else {
    throw ValidationError(ctx + ": role must be 'train' or 'eval'");
  }
  const auto tensor_path = doc.contains("tensor")
                               ? resolve_relative(document, require_string(doc, "tensor", ctx))
                               : tensor_beside(document);
  data.features = load_tensor(tensor_path).to_matrix();
  try {
    data.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(ctx + ": " + e.what());
  }
  return data;
}

void save_feature_dataset(const FeatureDataset& data, const std::filesystem::path& document) {
  data.validate();
  const auto tensor_path = tensor_beside(document);
  save_tensor(Tensor::from_matrix(data.features), tensor_path);
  Document doc;
  doc["role"] = data.role == DatasetRole::train ? "train" : "eval";
  doc["labels"] = data.labels;
  doc["tensor"] = tensor_path.filename().string();
  write_document(doc, document);
}

}  // namespace catsplit
