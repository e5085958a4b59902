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

#include "catsplit/alignment.hpp"

#include <cmath>
#include <numeric>

#include "catsplit/document.hpp"
#include "catsplit/error.hpp"
#include "catsplit/kernels.hpp"

namespace catsplit {

namespace {

void fill_gaussian(Matrix& m, double stddev, Prng& rng) {
  for (auto& x : m.values()) x = rng.normal(0.0, stddev);
}

struct Activations {
  Vector pre;
  Vector hidden;
  Vector output;
};

void forward_into(const AlignmentModel& model, std::span<const double> x, Activations& a) {
  a.pre.resize(model.hidden_dim());
  a.hidden.resize(model.hidden_dim());
  a.output.resize(model.output_dim());
  kernels::gemv(model.w1.values(), model.w1.rows(), model.w1.cols(), x, a.pre);
  for (std::size_t j = 0; j < a.pre.size(); ++j) {
    a.pre[j] += model.b1[j];
    a.hidden[j] = a.pre[j] > 0.0 ? a.pre[j] : 0.0;
  }
  kernels::gemv(model.w2.values(), model.w2.rows(), model.w2.cols(), a.hidden, a.output);
  for (std::size_t i = 0; i < a.output.size(); ++i) a.output[i] += model.b2[i];
}

double safe_cosine(std::span<const double> a, std::span<const double> b) {
  const double na = l2_norm(a);
  const double nb = l2_norm(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return kernels::dot(a, b) / (na * nb);
}

void zero(Matrix& m) {
  for (auto& x : m.values()) x = 0.0;
}
void zero(Vector& v) {
  for (auto& x : v) x = 0.0;
}

}  // namespace

std::string_view composition_name(PairComposition c) noexcept {
  return c == PairComposition::mod ? "mod" : "mod+cat";
}

PairComposition parse_composition(std::string_view name) {
  if (name == "mod") return PairComposition::mod;
  if (name == "mod+cat") return PairComposition::mod_and_cat;
  throw ValidationError("unknown pair composition '" + std::string(name) +
                        "' (expected mod|mod+cat)");
}

AlignmentModel AlignmentModel::zeros(std::size_t input, std::size_t hidden, std::size_t output) {
  return {Matrix(hidden, input), Vector(hidden, 0.0), Matrix(output, hidden), Vector(output, 0.0)};
}

AlignmentModel AlignmentModel::initialized(std::size_t input, std::size_t hidden,
                                           std::size_t output, Prng& rng) {
  auto model = zeros(input, hidden, output);
  fill_gaussian(model.w1, 1.0 / std::sqrt(static_cast<double>(input)), rng);
  fill_gaussian(model.w2, 1.0 / std::sqrt(static_cast<double>(hidden)), rng);
  return model;
}

void AlignmentModel::validate() const {
  if (input_dim() == 0 || hidden_dim() == 0 || output_dim() == 0) {
    throw ValidationError("alignment model has an empty layer");
  }
  if (b1.size() != hidden_dim() || w2.cols() != hidden_dim() || b2.size() != output_dim()) {
    throw ValidationError("alignment model layer shapes are inconsistent");
  }
}

Vector AlignmentModel::forward(std::span<const double> x) const {
  if (x.size() != input_dim()) {
    throw ValidationError("alignment input dim " + std::to_string(x.size()) + " != " +
                          std::to_string(input_dim()));
  }
  Activations a;
  forward_into(*this, x, a);
  return std::move(a.output);
}

TrainingPairs build_training_pairs(const ModifierDictionary& dict, const ClassifierHead& head,
                                   const Taxonomy& taxonomy, const TextEmbeddingTable& embeddings,
                                   PairComposition composition) {
  TrainingPairs pairs;
  pairs.composition = composition;
  pairs.inputs = Matrix(0, embeddings.dim());
  pairs.targets = Matrix(0, dict.dim);
  auto add = [&](const std::string& text, std::span<const double> target) {
    pairs.inputs.append_row(embeddings.lookup(text));
    pairs.targets.append_row(target);
    pairs.texts.push_back(text);
  };
  for (const auto& e : dict.entries) add(e.modifier_text, e.vector);
  if (composition == PairComposition::mod_and_cat) {
    if (head.dim() != dict.dim) {
      throw ValidationError("head dim does not match dictionary dim");
    }
    for (std::size_t i = 0; i < head.size(); ++i) {
      add(taxonomy.category(head.labels[i]).text, head.weights.row(i));
    }
    for (const auto& g : dict.coarse_vectors) add(g.base_text, g.vector);
  }
  return pairs;
}

AlignmentGradients AlignmentGradients::zeros_like(const AlignmentModel& model) {
  return {Matrix(model.w1.rows(), model.w1.cols()), Vector(model.b1.size(), 0.0),
          Matrix(model.w2.rows(), model.w2.cols()), Vector(model.b2.size(), 0.0)};
}

double alignment_loss(const AlignmentModel& model, const TrainingPairs& pairs,
                      std::span<const std::size_t> indices, AlignmentGradients* grads) {
  Activations a;
  Vector residual(model.output_dim());
  Vector d_hidden(model.hidden_dim());
  double loss = 0.0;
  for (const auto idx : indices) {
    const auto x = pairs.inputs.row(idx);
    const auto target = pairs.targets.row(idx);
    forward_into(model, x, a);
    for (std::size_t i = 0; i < residual.size(); ++i) residual[i] = a.output[i] - target[i];
    loss += kernels::dot(residual, residual);
    if (!grads) continue;

    zero(d_hidden);
    for (std::size_t i = 0; i < residual.size(); ++i) {
      const double dy = 2.0 * residual[i];
      kernels::axpy(dy, a.hidden, grads->w2.row(i));
      grads->b2[i] += dy;
      kernels::axpy(dy, model.w2.row(i), d_hidden);
    }
    for (std::size_t j = 0; j < d_hidden.size(); ++j) {
      if (a.pre[j] <= 0.0) continue;
      kernels::axpy(d_hidden[j], x, grads->w1.row(j));
      grads->b1[j] += d_hidden[j];
    }
  }
  return loss;
}

double mean_prediction_cosine(const AlignmentModel& model, const TrainingPairs& pairs) {
  if (pairs.size() == 0) return 0.0;
  Activations a;
  double total = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    forward_into(model, pairs.inputs.row(i), a);
    total += safe_cosine(a.output, pairs.targets.row(i));
  }
  return total / static_cast<double>(pairs.size());
}

AlignmentResult train_alignment(const TrainingPairs& pairs, const AlignmentConfig& config) {
  if (pairs.size() == 0) throw ValidationError("alignment training needs at least one pair");
  if (config.batch == 0 || config.max_epochs == 0 || config.hidden == 0) {
    throw ValidationError("alignment config: batch, max_epochs and hidden must be >= 1");
  }
  Prng rng(config.seed);
  AlignmentResult result;
  auto& model = result.model;
  model = AlignmentModel::initialized(pairs.inputs.cols(), config.hidden, pairs.targets.cols(), rng);

  auto s_w1 = AdamWState::for_size(model.w1.values().size(), config.lr, config.weight_decay);
  auto s_b1 = AdamWState::for_size(model.b1.size(), config.lr, config.weight_decay);
  auto s_w2 = AdamWState::for_size(model.w2.values().size(), config.lr, config.weight_decay);
  auto s_b2 = AdamWState::for_size(model.b2.size(), config.lr, config.weight_decay);
  const CosineSchedule schedule{config.lr, 0.0, config.max_epochs};
  EmaStopper stopper(StopMode::maximize, config.early_stop);

  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto grads = AlignmentGradients::zeros_like(model);
  std::vector<std::size_t> all(order);

  for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    const double lr = schedule.at(static_cast<double>(epoch));
    s_w1.lr = s_b1.lr = s_w2.lr = s_b2.lr = lr;
    rng.shuffle(std::span(order));
    for (std::size_t start = 0; start < order.size(); start += config.batch) {
      const auto count = std::min(config.batch, order.size() - start);
      zero(grads.w1);
      zero(grads.b1);
      zero(grads.w2);
      zero(grads.b2);
      const double batch_loss =
          alignment_loss(model, pairs, std::span(order).subspan(start, count), &grads);
      if (!std::isfinite(batch_loss)) {
        throw Error("alignment training diverged at epoch " + std::to_string(epoch) +
                    " (non-finite loss); try a smaller learning rate");
      }
      adamw_step(model.w1.values(), grads.w1.values(), s_w1);
      adamw_step(model.b1, grads.b1, s_b1);
      adamw_step(model.w2.values(), grads.w2.values(), s_w2);
      adamw_step(model.b2, grads.b2, s_b2);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.lr = lr;
    rec.loss = alignment_loss(model, pairs, all, nullptr) / static_cast<double>(pairs.size());
    if (!std::isfinite(rec.loss)) {
      throw Error("alignment training diverged at epoch " + std::to_string(epoch) +
                  " (non-finite loss); try a smaller learning rate");
    }
    rec.metric = mean_prediction_cosine(model, pairs);
    const bool stop = stopper.update(rec.metric);
    rec.ema = stopper.ema();
    rec.best = stopper.best();
    result.history.epochs.push_back(rec);
    if (config.early_stopping && stop) {
      result.history.stopped_early = true;
      break;
    }
  }
  return result;
}

Vector synthesize_modifier(const AlignmentModel& model, std::string_view modifier_text,
                           const TextEmbeddingTable& embeddings) {
  return model.forward(embeddings.lookup(modifier_text));
}

void save_alignment_model(const AlignmentModel& model, const AlignmentConfig& config,
                          const std::filesystem::path& dir) {
  model.validate();
  std::filesystem::create_directories(dir);
  save_tensor(Tensor::from_matrix(model.w1), dir / "w1.cspl");
  save_tensor(Tensor::from_vector(model.b1), dir / "b1.cspl");
  save_tensor(Tensor::from_matrix(model.w2), dir / "w2.cspl");
  save_tensor(Tensor::from_vector(model.b2), dir / "b2.cspl");
  Document doc;
  doc["input_dim"] = model.input_dim();
  doc["hidden_dim"] = model.hidden_dim();
  doc["output_dim"] = model.output_dim();
  doc["activation"] = "relu";
  doc["config"] = {{"lr", config.lr},
                   {"weight_decay", config.weight_decay},
                   {"batch", config.batch},
                   {"max_epochs", config.max_epochs},
                   {"early_stopping", config.early_stopping}};
  doc["seed"] = config.seed;
  doc["tensors"] = {{"w1", "w1.cspl"}, {"b1", "b1.cspl"}, {"w2", "w2.cspl"}, {"b2", "b2.cspl"}};
  write_document(doc, dir / "alignment.json");
}

AlignmentModel load_alignment_model(const std::filesystem::path& path) {
  const auto manifest = std::filesystem::is_directory(path) ? path / "alignment.json" : path;
  const auto doc = read_document(manifest);
  const std::string ctx = manifest.string();
  if (require_string(doc, "activation", ctx) != "relu") {
    throw ValidationError(ctx + ": unsupported activation");
  }
  const auto& tensors = require_field(doc, "tensors", ctx);
  auto load = [&](const char* key) {
    return load_tensor(resolve_relative(manifest, require_string(tensors, key, ctx)));
  };
  AlignmentModel model{load("w1").to_matrix(), load("b1").to_vector(), load("w2").to_matrix(),
                       load("b2").to_vector()};
  try {
    model.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(ctx + ": " + e.what());
  }
  if (model.input_dim() != require_field(doc, "input_dim", ctx).get<std::size_t>() ||
      model.hidden_dim() != require_field(doc, "hidden_dim", ctx).get<std::size_t>() ||
      model.output_dim() != require_field(doc, "output_dim", ctx).get<std::size_t>()) {
    throw ValidationError(ctx + ": tensor shapes disagree with manifest dims");
  }
  return model;
}

}  // namespace catsplit
