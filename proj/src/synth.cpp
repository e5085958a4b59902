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

#include "catsplit/synth.hpp"

#include <algorithm>
#include <cmath>

#include "catsplit/dictionary.hpp"
#include "catsplit/error.hpp"
#include "catsplit/head_editor.hpp"
#include "catsplit/kernels.hpp"

namespace catsplit {

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed ^ (stream * 0xD1B54A32D192ED03ULL);
  return splitmix64(s);
}

constexpr std::uint64_t kHeadStream = 1;
constexpr std::uint64_t kOracleStream = 2;
constexpr std::uint64_t kAlignmentStream = 3;
constexpr std::uint64_t kFinetuneStream = 4;

Matrix gaussian_rows(std::size_t rows, std::size_t cols, Prng& rng) {
  Matrix m(rows, cols);
  for (auto& x : m.values()) x = rng.normal();
  return m;
}

Vector normalized(Vector v) {
  const double n = l2_norm(v);
  for (auto& x : v) x /= n;
  return v;
}

void read_train_config(const Document& doc, SoftmaxTrainConfig& cfg) {
  cfg.lr = doc.value("lr", cfg.lr);
  cfg.weight_decay = doc.value("weight_decay", cfg.weight_decay);
  cfg.batch = doc.value("batch", cfg.batch);
  cfg.max_epochs = doc.value("max_epochs", cfg.max_epochs);
  cfg.early_stopping = doc.value("early_stopping", cfg.early_stopping);
}

Document train_config_document(const SoftmaxTrainConfig& cfg) {
  Document d;
  d["lr"] = cfg.lr;
  d["weight_decay"] = cfg.weight_decay;
  d["batch"] = cfg.batch;
  d["max_epochs"] = cfg.max_epochs;
  d["early_stopping"] = cfg.early_stopping;
  return d;
}

// Fits a zero-initialized head with bias over `labels` on the given rows.
ClassifierHead fit_head(std::vector<std::string> labels, const Matrix& features,
                        const std::vector<std::string>& sample_labels,
                        SoftmaxTrainConfig cfg, std::uint64_t seed) {
  ClassifierHead head;
  head.weights = Matrix(labels.size(), features.cols());
  head.bias = Vector(labels.size(), 0.0);
  head.labels = std::move(labels);
  LabeledRows rows;
  rows.features = &features;
  for (std::size_t i = 0; i < sample_labels.size(); ++i) {
    rows.samples.push_back(i);
    rows.targets.push_back(head.require_index(sample_labels[i]));
  }
  cfg.seed = seed;
  fit_softmax_rows(head, 0, rows, cfg);
  return head;
}

}  // namespace

FeatureDataset split_samples(const FeatureDataset& data, const SplitSpec& split) {
  const auto ids = split.subcategory_ids();
  FeatureDataset out;
  out.role = data.role;
  out.features = Matrix(0, data.features.cols());
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (std::find(ids.begin(), ids.end(), data.labels[i]) == ids.end()) continue;
    out.features.append_row(data.features.row(i));
    out.labels.push_back(data.labels[i]);
  }
  return out;
}

void SynthConfig::validate() const {
  if (bases < 2) throw ValidationError("synth config: bases must be >= 2");
  if (modifiers < 2) throw ValidationError("synth config: modifiers must be >= 2");
  if (feature_dim < bases + modifiers) {
    throw ValidationError("synth config: feature_dim must be >= bases + modifiers");
  }
  if (text_dim < bases + modifiers) {
    throw ValidationError("synth config: text_dim must be >= bases + modifiers");
  }
  if (held_out_base >= bases) throw ValidationError("synth config: held_out_base out of range");
  if (train_per_class == 0 || test_per_class == 0) {
    throw ValidationError("synth config: samples per class must be >= 1");
  }
  if (!(feature_noise >= 0.0) || !(video_noise >= 0.0) || !std::isfinite(modifier_amplitude)) {
    throw ValidationError("synth config: noise levels must be >= 0 and amplitude finite");
  }
}

SynthConfig SynthConfig::from_document(const Document& doc) {
  SynthConfig c;
  if (!doc.is_object()) throw ValidationError("synth config must be an object");
  try {
    c.feature_dim = doc.value("feature_dim", c.feature_dim);
    c.text_dim = doc.value("text_dim", c.text_dim);
    c.bases = doc.value("bases", c.bases);
    c.modifiers = doc.value("modifiers", c.modifiers);
    c.train_per_class = doc.value("train_per_class", c.train_per_class);
    c.test_per_class = doc.value("test_per_class", c.test_per_class);
    c.feature_noise = doc.value("feature_noise", c.feature_noise);
    c.modifier_amplitude = doc.value("modifier_amplitude", c.modifier_amplitude);
    c.held_out_base = doc.value("held_out_base", c.held_out_base);
    c.seed = doc.value("seed", c.seed);
    c.video_noise = doc.value("video_noise", c.video_noise);
    if (doc.contains("head_training")) read_train_config(doc.at("head_training"), c.head_training);
  } catch (const nlohmann::json::type_error& e) {
    throw ValidationError(std::string("synth config: ") + e.what());
  }
  c.validate();
  return c;
}

Document SynthConfig::to_document() const {
  Document d;
  d["feature_dim"] = feature_dim;
  d["text_dim"] = text_dim;
  d["bases"] = bases;
  d["modifiers"] = modifiers;
  d["train_per_class"] = train_per_class;
  d["test_per_class"] = test_per_class;
  d["feature_noise"] = feature_noise;
  d["modifier_amplitude"] = modifier_amplitude;
  d["held_out_base"] = held_out_base;
  d["seed"] = seed;
  d["video_noise"] = video_noise;
  d["head_training"] = train_config_document(head_training);
  return d;
}

void gram_schmidt(Matrix& vectors) {
  for (std::size_t i = 0; i < vectors.rows(); ++i) {
    auto vi = vectors.row(i);
    for (std::size_t j = 0; j < i; ++j) {
      const double proj = kernels::dot(vectors.row(j), vi);
      kernels::axpy(-proj, vectors.row(j), vi);
    }
    const double n = l2_norm(vi);
    if (n < 1e-12) throw ValidationError("gram-schmidt: linearly dependent draws");
    for (auto& x : vi) x /= n;
  }
}

std::string synth_category_id(std::size_t base, std::size_t modifier) {
  return "b" + std::to_string(base) + "_m" + std::to_string(modifier);
}
std::string synth_category_text(std::size_t base, std::size_t modifier) {
  return synth_base_text(base) + " " + synth_modifier_text(modifier);
}
std::string synth_base_text(std::size_t base) { return "base" + std::to_string(base); }
std::string synth_modifier_text(std::size_t modifier) { return "mod" + std::to_string(modifier); }

SynthBundle generate(const SynthConfig& config) {
  config.validate();
  const auto B = config.bases;
  const auto Mo = config.modifiers;
  const auto held = config.held_out_base;
  const std::string coarse_id = "b" + std::to_string(held);

  SynthBundle out;
  out.config = config;
  Prng rng(config.seed);

  // Planted directions: rows [0, B) bases, [B, B+Mo) modifiers.
  auto feature_dirs = gaussian_rows(B + Mo, config.feature_dim, rng);
  gram_schmidt(feature_dirs);
  auto text_dirs = gaussian_rows(B + Mo, config.text_dim, rng);
  gram_schmidt(text_dirs);
  out.base_directions = Matrix(0, config.feature_dim);
  out.modifier_directions = Matrix(0, config.feature_dim);
  for (std::size_t i = 0; i < B; ++i) out.base_directions.append_row(feature_dirs.row(i));
  for (std::size_t j = 0; j < Mo; ++j) out.modifier_directions.append_row(feature_dirs.row(B + j));

  // Taxonomy.
  std::vector<Category> categories;
  for (std::size_t i = 0; i < B; ++i) {
    if (i == held) {
      categories.push_back({coarse_id, synth_base_text(i), Granularity::coarse, std::nullopt,
                            {"synthetic"}, std::nullopt});
      continue;
    }
    for (std::size_t j = 0; j < Mo; ++j) {
      categories.push_back({synth_category_id(i, j), synth_category_text(i, j), Granularity::fine,
                            synth_base_text(i), {}, std::nullopt});
    }
  }
  SplitDraft split{coarse_id, {}};
  for (std::size_t j = 0; j < Mo; ++j) {
    split.subcategories.push_back({synth_category_id(held, j), synth_category_text(held, j),
                                   std::nullopt});
  }
  out.taxonomy = Taxonomy::build(std::move(categories), {}, {split});

  // Text embeddings.
  std::vector<std::string> keys;
  Matrix emb(0, config.text_dim);
  for (std::size_t i = 0; i < B; ++i) {
    for (std::size_t j = 0; j < Mo; ++j) {
      Vector v(text_dirs.row(i).begin(), text_dirs.row(i).end());
      kernels::axpy(1.0, text_dirs.row(B + j), v);
      keys.push_back(synth_category_text(i, j));
      emb.append_row(normalized(std::move(v)));
    }
  }
  for (std::size_t j = 0; j < Mo; ++j) {
    keys.push_back(synth_modifier_text(j));
    emb.append_row(text_dirs.row(B + j));
  }
  for (std::size_t i = 0; i < B; ++i) {
    keys.push_back(synth_base_text(i));
    emb.append_row(text_dirs.row(i));
  }
  out.embeddings = TextEmbeddingTable(std::move(keys), std::move(emb));

  // Features.
  auto draw = [&](FeatureDataset& ds, std::size_t per_class) {
    ds.features = Matrix(0, config.feature_dim);
    Vector x(config.feature_dim);
    for (std::size_t i = 0; i < B; ++i) {
      for (std::size_t j = 0; j < Mo; ++j) {
        for (std::size_t s = 0; s < per_class; ++s) {
          for (std::size_t k = 0; k < x.size(); ++k) {
            x[k] = out.base_directions(i, k) +
                   config.modifier_amplitude * out.modifier_directions(j, k) +
                   config.feature_noise * rng.normal();
          }
          ds.features.append_row(x);
          ds.labels.push_back(synth_category_id(i, j));
        }
      }
    }
  };
  out.train.role = DatasetRole::train;
  draw(out.train, config.train_per_class);
  out.eval.role = DatasetRole::eval;
  draw(out.eval, config.test_per_class);

  // Video embeddings for the vision-language baseline.
  out.eval_video_embeddings = Matrix(0, config.text_dim);
  for (std::size_t r = 0; r < out.eval.size(); ++r) {
    const auto& label = out.eval.labels[r];
    const auto sep = label.find("_m");
    const auto i = std::stoul(label.substr(1, sep - 1));
    const auto j = std::stoul(label.substr(sep + 2));
    auto v = Vector(out.embeddings.lookup(synth_category_text(i, j)).begin(),
                    out.embeddings.lookup(synth_category_text(i, j)).end());
    for (auto& x : v) x += config.video_noise * rng.normal();
    out.eval_video_embeddings.append_row(v);
  }

  // Mixed-granularity head: held-out fine labels collapse onto the coarse label.
  std::vector<std::string> mixed_labels;
  for (const auto& l : out.train.labels) {
    mixed_labels.push_back(l.rfind(coarse_id + "_", 0) == 0 ? coarse_id : l);
  }
  out.head = fit_head(out.taxonomy.row_order(), out.train.features, mixed_labels,
                      config.head_training, derive_seed(config.seed, kHeadStream));

  // Oracle: same trainer, fully fine labels, laid out like a split result.
  const auto& spec = out.taxonomy.splits().front();
  out.oracle.coarse_id = coarse_id;
  out.oracle.retained = out.taxonomy.row_order().size() - 1;
  out.oracle.head = fit_head(out.taxonomy.labels_after_split(spec), out.train.features,
                             out.train.labels, config.head_training,
                             derive_seed(config.seed, kOracleStream));
  for (const auto& sub : spec.subcategories) {
    out.oracle.provenance.emplace_back(sub.id, Provenance{InitMethod::coarse_copy, std::nullopt, "oracle"});
  }
  out.oracle_split_accuracy = generality(out.oracle.head, spec, out.eval).value();
  const auto predictions = predict_labels(out.oracle.head, out.eval.features);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) correct += predictions[i] == out.eval.labels[i];
  out.oracle_accuracy = static_cast<double>(correct) / static_cast<double>(predictions.size());
  return out;
}

void write_bundle(const SynthBundle& bundle, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  save_taxonomy(bundle.taxonomy, dir / "taxonomy.json");
  save_head(bundle.head, dir / "head");
  save_edited_head(bundle.oracle, dir / "oracle_head");
  save_embedding_table(bundle.embeddings, dir / "embeddings.json");
  save_feature_dataset(bundle.train, dir / "train.json");
  save_feature_dataset(bundle.eval, dir / "eval.json");
  save_tensor(Tensor::from_matrix(bundle.eval_video_embeddings), dir / "eval_video_embeddings.cspl");
  Document doc;
  doc["config"] = bundle.config.to_document();
  doc["coarse_id"] = bundle.split().coarse_id;
  doc["oracle_split_accuracy"] = bundle.oracle_split_accuracy;
  doc["oracle_accuracy"] = bundle.oracle_accuracy;
  doc["files"] = {{"taxonomy", "taxonomy.json"},
                  {"head", "head/head.json"},
                  {"oracle_head", "oracle_head/head.json"},
                  {"embeddings", "embeddings.json"},
                  {"train", "train.json"},
                  {"eval", "eval.json"},
                  {"eval_video_embeddings", "eval_video_embeddings.cspl"}};
  write_document(doc, dir / "bundle.json");
}

double oracle_eval(const SynthBundle& bundle, const ClassifierHead& edited) {
  if (edited.dim() != bundle.config.feature_dim) {
    throw ValidationError("oracle_eval: head dim " + std::to_string(edited.dim()) +
                          " does not match bundle feature dim " +
                          std::to_string(bundle.config.feature_dim));
  }
  return generality(edited, bundle.split(), bundle.eval).value() - bundle.oracle_split_accuracy;
}

PipelineOutcome run_pipeline(const SynthBundle& bundle, const PipelineConfig& config) {
  const auto& split = bundle.split();
  const auto seed = bundle.config.seed;
  const auto init = config.lowshot ? config.finetune.init : config.method;

  ModifierDictionary dict;
  AlignmentModel align;
  SplitDependencies deps;
  if (init == InitMethod::retrieval || init == InitMethod::joint ||
      init == InitMethod::alignment) {
    dict = build_dictionary(bundle.head, bundle.taxonomy);
    deps.dictionary = &dict;
    deps.embeddings = &bundle.embeddings;
  }
  if (init == InitMethod::alignment) {
    const auto pairs = build_training_pairs(dict, bundle.head, bundle.taxonomy, bundle.embeddings,
                                            config.composition);
    auto acfg = config.alignment;
    acfg.seed = derive_seed(seed, kAlignmentStream);
    align = train_alignment(pairs, acfg).model;
    deps.alignment = &align;
  }

  PipelineOutcome out;
  const auto init_seed = derive_seed(seed, kFinetuneStream);
  if (config.lowshot) {
    auto fcfg = config.finetune;
    fcfg.train.seed = init_seed;
    out.edited = finetune_split(bundle.head, split, split_samples(bundle.train, split), fcfg, deps)
                     .edited;
  } else {
    out.edited = split_head(bundle.head, split, config.method, deps, init_seed);
  }
  out.metrics = evaluate_split(bundle.head, out.edited, split, bundle.eval);
  out.metrics.method = std::string(init_method_name(init));
  if (config.lowshot) out.metrics.method += "+finetune:" + std::string(scope_name(config.finetune.scope));
  out.metrics.seed = seed;
  out.oracle_gap = oracle_eval(bundle, out.edited.head);
  return out;
}

PipelineConfig pipeline_config_from_document(const Document& doc) {
  PipelineConfig c;
  if (!doc.is_object()) throw ValidationError("pipeline config must be an object");
  try {
    c.synth = SynthConfig::from_document(doc.contains("synth") ? doc.at("synth") : Document::object());
    if (doc.contains("method")) c.method = parse_init_method(doc.at("method").get<std::string>());
    if (doc.contains("composition")) {
      c.composition = parse_composition(doc.at("composition").get<std::string>());
    }
    if (doc.contains("alignment")) {
      const auto& a = doc.at("alignment");
      c.alignment.hidden = a.value("hidden", c.alignment.hidden);
      c.alignment.lr = a.value("lr", c.alignment.lr);
      c.alignment.weight_decay = a.value("weight_decay", c.alignment.weight_decay);
      c.alignment.batch = a.value("batch", c.alignment.batch);
      c.alignment.max_epochs = a.value("max_epochs", c.alignment.max_epochs);
      c.alignment.early_stopping = a.value("early_stopping", c.alignment.early_stopping);
    }
    c.lowshot = doc.value("lowshot", c.lowshot);
    if (doc.contains("finetune")) {
      const auto& f = doc.at("finetune");
      c.finetune.shots = f.value("shots", c.finetune.shots);
      if (f.contains("scope")) c.finetune.scope = parse_scope(f.at("scope").get<std::string>());
      if (f.contains("init")) c.finetune.init = parse_init_method(f.at("init").get<std::string>());
      read_train_config(f, c.finetune.train);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("pipeline config: ") + e.what());
  }
  return c;
}

}  // namespace catsplit
