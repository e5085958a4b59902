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

// Text-embedding tables and feature datasets.
//
// Both are stored as a key/label document plus a CSPL tensor whose rows align
// with the document's list:
//
//   embeddings.json  {"keys": ["left to right", ...], "tensor": "embeddings.cspl"}
//   train.json       {"role": "train", "labels": ["push_lr", ...], "tensor": "train.cspl"}
//
// The "tensor" path is relative to the document. Keys are matched exactly;
// any text normalization has to happen before export.

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "catsplit/tensor.hpp"

namespace catsplit {

class TextEmbeddingTable {
 public:
  TextEmbeddingTable() = default;
  // Throws ValidationError on duplicate keys, a row-count mismatch or a
  // zero-norm row.
  TextEmbeddingTable(std::vector<std::string> keys, Matrix vectors);

  std::size_t size() const noexcept { return keys_.size(); }
  std::size_t dim() const noexcept { return vectors_.cols(); }
  const std::vector<std::string>& keys() const noexcept { return keys_; }
  const Matrix& vectors() const noexcept { return vectors_; }

  bool contains(std::string_view key) const;
  // Throws ValidationError "missing embedding key '<key>'".
  std::span<const double> lookup(std::string_view key) const;

 private:
  std::vector<std::string> keys_;
  Matrix vectors_;
  std::unordered_map<std::string, std::size_t> index_;
};

TextEmbeddingTable load_embedding_table(const std::filesystem::path& document);
void save_embedding_table(const TextEmbeddingTable& table, const std::filesystem::path& document);

enum class DatasetRole { train, eval };

struct FeatureDataset {
  Matrix features;  // N x d pooled features
  std::vector<std::string> labels;
  DatasetRole role = DatasetRole::train;

  std::size_t size() const noexcept { return labels.size(); }
  void validate() const;
};

FeatureDataset load_feature_dataset(const std::filesystem::path& document);
void save_feature_dataset(const FeatureDataset& data, const std::filesystem::path& document);

}  // namespace catsplit
