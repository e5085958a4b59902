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

#include "catsplit/head_editor.hpp"

#include "catsplit/error.hpp"
#include "catsplit/kernels.hpp"
#include "catsplit/optim.hpp"

namespace catsplit {

namespace {

const ModifierDictionary& need_dictionary(const SplitDependencies& deps, InitMethod m) {
  if (!deps.dictionary) {
    throw ValidationError("method " + std::string(init_method_name(m)) +
                          " requires a modifier dictionary (--dict)");
  }
  return *deps.dictionary;
}

const TextEmbeddingTable& need_embeddings(const SplitDependencies& deps, InitMethod m) {
  if (!deps.embeddings) {
    throw ValidationError("method " + std::string(init_method_name(m)) +
                          " requires a text embedding table (--emb)");
  }
  return *deps.embeddings;
}

const AlignmentModel& need_alignment(const SplitDependencies& deps, InitMethod m) {
  if (!deps.alignment) {
    throw ValidationError("method " + std::string(init_method_name(m)) +
                          " requires an alignment model (--align)");
  }
  return *deps.alignment;
}

}  // namespace

RetrievalResult retrieve_modifier(const ModifierDictionary& dict,
                                  const TextEmbeddingTable& embeddings,
                                  std::string_view target_modifier_text) {
  if (dict.empty()) throw ValidationError("empty dictionary");
  const auto query = embeddings.lookup(target_modifier_text);
  RetrievalResult best{0, 0.0};
  for (std::size_t i = 0; i < dict.entries.size(); ++i) {
    const double s = cosine_similarity(embeddings.lookup(dict.entries[i].modifier_text), query);
    if (i == 0 || s > best.score) best = {i, s};
  }
  return best;
}

RetrievalResult retrieve_modifier_joint(const ModifierDictionary& dict,
                                        const TextEmbeddingTable& embeddings,
                                        std::string_view target_full_text,
                                        std::string_view target_modifier_text) {
  if (dict.empty()) throw ValidationError("empty dictionary");
  const auto full_query = embeddings.lookup(target_full_text);
  const auto mod_query = embeddings.lookup(target_modifier_text);
  RetrievalResult best{0, 0.0};
  for (std::size_t i = 0; i < dict.entries.size(); ++i) {
    const auto& e = dict.entries[i];
    const double s = cosine_similarity(embeddings.lookup(e.full_text), full_query) +
                     cosine_similarity(embeddings.lookup(e.modifier_text), mod_query);
    if (i == 0 || s > best.score) best = {i, s};
  }
  return best;
}

ComposedRow compose_weight(std::span<const double> coarse_weight,
                           std::optional<double> coarse_bias, const ModifierEntry& entry) {
  if (coarse_weight.size() != entry.vector.size()) {
    throw ValidationError("compose: coarse weight dim " + std::to_string(coarse_weight.size()) +
                          " != modifier dim " + std::to_string(entry.vector.size()));
  }
  ComposedRow row{Vector(coarse_weight.begin(), coarse_weight.end()), coarse_bias};
  kernels::axpy(1.0, entry.vector, row.weight);
  if (row.bias && entry.bias_delta) *row.bias += *entry.bias_delta;
  return row;
}

Vector compose_weight(std::span<const double> coarse_weight, const ModifierEntry& entry) {
  return compose_weight(coarse_weight, std::nullopt, entry).weight;
}

EditedHead split_head(const ClassifierHead& head, const SplitSpec& split, InitMethod method,
                      const SplitDependencies& deps, std::uint64_t seed) {
  head.validate();
  const auto coarse_idx = head.index_of(split.coarse_id);
  if (!coarse_idx) throw ValidationError("unknown coarse id '" + split.coarse_id + "' (not in head)");
  for (const auto& sub : split.subcategories) {
    if (head.index_of(sub.id)) {
      throw ValidationError("subcategory id '" + sub.id + "' already exists in the head");
    }
  }

  // Resolve every dependency before touching the head.
  const ModifierDictionary* dict = nullptr;
  const TextEmbeddingTable* emb = nullptr;
  const AlignmentModel* align = nullptr;
  switch (method) {
    case InitMethod::retrieval:
    case InitMethod::joint:
      dict = &need_dictionary(deps, method);
      emb = &need_embeddings(deps, method);
      if (dict->dim != head.dim()) throw ValidationError("dictionary dim does not match head dim");
      break;
    case InitMethod::alignment:
      align = &need_alignment(deps, method);
      emb = &need_embeddings(deps, method);
      if (align->output_dim() != head.dim()) {
        throw ValidationError("alignment model output dim does not match head dim");
      }
      break;
    case InitMethod::coarse_copy:
    case InitMethod::random:
      break;
  }

  const auto w_c = head.weights.row(*coarse_idx);
  const std::optional<double> b_c =
      head.bias ? std::optional<double>((*head.bias)[*coarse_idx]) : std::nullopt;

  EditedHead out;
  out.coarse_id = split.coarse_id;
  out.head.weights = Matrix(0, head.dim());
  if (head.bias) out.head.bias.emplace();
  for (std::size_t i = 0; i < head.size(); ++i) {
    if (i == *coarse_idx) continue;
    out.head.labels.push_back(head.labels[i]);
    out.head.weights.append_row(head.weights.row(i));
    if (head.bias) out.head.bias->push_back((*head.bias)[i]);
  }
  out.retained = out.head.size();

  Prng rng(seed);
  for (const auto& sub : split.subcategories) {
    ComposedRow row;
    Provenance prov;
    prov.method = method;
    switch (method) {
      case InitMethod::retrieval:
      case InitMethod::joint: {
        const auto r = method == InitMethod::retrieval
                           ? retrieve_modifier(*dict, *emb, sub.modifier_text)
                           : retrieve_modifier_joint(*dict, *emb, sub.full_text, sub.modifier_text);
        const auto& entry = dict->entries[r.entry];
        row = compose_weight(w_c, b_c, entry);
        prov.source_entry = r.entry;
        prov.source_text = entry.full_text;
        break;
      }
      case InitMethod::alignment: {
        ModifierEntry synthesized;
        synthesized.modifier_text = sub.modifier_text;
        synthesized.vector = synthesize_modifier(*align, sub.modifier_text, *emb);
        row = compose_weight(w_c, b_c, synthesized);
        prov.source_text = sub.modifier_text;
        break;
      }
      case InitMethod::coarse_copy:
        row = {Vector(w_c.begin(), w_c.end()), b_c};
        break;
      case InitMethod::random:
        row.weight.resize(head.dim());
        for (auto& x : row.weight) x = rng.normal(0.0, kRandomInitStddev);
        if (head.bias) row.bias = 0.0;
        break;
    }
    out.head.labels.push_back(sub.id);
    out.head.weights.append_row(row.weight);
    if (head.bias) out.head.bias->push_back(row.bias.value_or(0.0));
    out.provenance.emplace_back(sub.id, std::move(prov));
  }
  out.head.validate();
  return out;
}

std::vector<std::string> vlm_baseline_assign(std::span<const std::string> base_predictions,
                                             const Matrix& video_embeddings,
                                             std::span<const Subcategory> candidates,
                                             const TextEmbeddingTable& embeddings,
                                             std::string_view coarse_id) {
  if (video_embeddings.rows() != base_predictions.size()) {
    throw ValidationError("baseline: " + std::to_string(base_predictions.size()) +
                          " predictions but " + std::to_string(video_embeddings.rows()) +
                          " video embeddings");
  }
  if (candidates.empty()) throw ValidationError("baseline: no candidate subcategories");
  std::vector<std::span<const double>> candidate_vectors;
  for (const auto& c : candidates) candidate_vectors.push_back(embeddings.lookup(c.full_text));

  std::vector<std::string> out;
  out.reserve(base_predictions.size());
  for (std::size_t i = 0; i < base_predictions.size(); ++i) {
    if (base_predictions[i] != coarse_id) {
      out.push_back(base_predictions[i]);
      continue;
    }
    std::size_t best = 0;
    double best_score = 0.0;
    for (std::size_t j = 0; j < candidate_vectors.size(); ++j) {
      const double s = cosine_similarity(video_embeddings.row(i), candidate_vectors[j]);
      if (j == 0 || s > best_score) {
        best = j;
        best_score = s;
      }
    }
    out.push_back(candidates[best].id);
  }
  return out;
}

}  // namespace catsplit
