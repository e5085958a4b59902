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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "catsplit/error.hpp"
#include "catsplit/lowshot.hpp"
#include "test_support.hpp"

namespace catsplit {
namespace {

TEST(CrossEntropy, UniformLogits) {
  const auto ce = cross_entropy_loss(Vector(4, 0.7), 2);
  EXPECT_NEAR(ce.loss, std::log(4.0), 1e-12);
  EXPECT_NEAR(ce.gradient[2], 0.25 - 1.0, 1e-12);
  EXPECT_NEAR(ce.gradient[0], 0.25, 1e-12);
}

TEST(CrossEntropy, Saturation) {
  EXPECT_NEAR(cross_entropy_loss(Vector{100, 0, 0}, 0).loss, 0.0, 1e-40);
  EXPECT_NEAR(cross_entropy_loss(Vector{1000, 0}, 1).loss, 1000.0, 1e-9);
}

TEST(CrossEntropy, GradientSumsToZeroAndTargetChecked) {
  Prng rng(61);
  for (int t = 0; t < 100; ++t) {
    const auto z = testing::random_vector(2 + rng.below(10), rng, 5.0);
    const auto ce = cross_entropy_loss(z, rng.below(z.size()));
    EXPECT_NEAR(std::accumulate(ce.gradient.begin(), ce.gradient.end(), 0.0), 0.0, 1e-12);
  }
  EXPECT_THROW(cross_entropy_loss(Vector{1, 2}, 2), ValidationError);
}

TEST(CrossEntropy, GradientMatchesFiniteDifferences) {
  Prng rng(62);
  const double h = 1e-4;
  for (int t = 0; t < 20; ++t) {
    auto z = testing::random_vector(3 + rng.below(6), rng, 2.0);
    const auto target = rng.below(z.size());
    const auto ce = cross_entropy_loss(z, target);
    for (std::size_t i = 0; i < z.size(); ++i) {
      const double keep = z[i];
      z[i] = keep + h;
      const double up = cross_entropy_loss(z, target).loss;
      z[i] = keep - h;
      const double down = cross_entropy_loss(z, target).loss;
      z[i] = keep;
      const double numeric = (up - down) / (2 * h);
      EXPECT_LT(std::abs(numeric - ce.gradient[i]) / std::max(std::abs(numeric), 1e-6), 1e-3);
    }
  }
}

// Head [c, a] in 4 dims; c is split into s1, s2 whose samples point along
// separate axes.
struct Problem {
  ClassifierHead head{{"c", "a"}, Matrix{{0.5, 0.5, 0, 0}, {0, 0, 1, 0}}, Vector{0.0, 0.0}};
  SplitSpec split{"c", {{"s1", "go one", "one"}, {"s2", "go two", "two"}}};
  FeatureDataset train{Matrix{{1, 0, 0, 0.1}, {0, 1, 0, -0.1}, {0.9, 0.1, 0, 0}, {0.1, 0.9, 0, 0}},
                       {"s1", "s2", "s1", "s2"},
                       DatasetRole::train};
};

TEST(Finetune, NewOnlyKeepsRetainedRowsAndSeparatesClasses) {
  Problem p;
  FinetuneConfig cfg;
  cfg.train.lr = 0.05;
  cfg.train.early_stopping = false;
  const auto r = finetune_split(p.head, p.split, p.train, cfg, {});
  const auto& e = r.edited;
  EXPECT_EQ(e.head.labels, (std::vector<std::string>{"a", "s1", "s2"}));
  EXPECT_EQ(Vector(e.head.weights.row(0).begin(), e.head.weights.row(0).end()),
            (Vector{0, 0, 1, 0}));
  EXPECT_EQ((*e.head.bias)[0], 0.0);
  EXPECT_EQ(r.shot_indices, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(e.head.predict_label(p.train.features.row(0)), "s1");
  EXPECT_EQ(e.head.predict_label(p.train.features.row(1)), "s2");
  EXPECT_EQ(r.history.epochs.size(), 100u);
}

TEST(Finetune, ShotsAreFirstInDatasetOrder) {
  Problem p;
  FinetuneConfig cfg;
  cfg.shots = 2;
  cfg.train.max_epochs = 2;
  EXPECT_EQ(finetune_split(p.head, p.split, p.train, cfg, {}).shot_indices,
            (std::vector<std::size_t>{0, 2, 1, 3}));
}

TEST(Finetune, HeadAndNewMovesRetainedRows) {
  Problem p;
  FinetuneConfig cfg;
  cfg.scope = FinetuneScope::head_and_new;
  cfg.train.early_stopping = false;
  cfg.train.max_epochs = 10;
  const auto e = finetune_split(p.head, p.split, p.train, cfg, {}).edited;
  EXPECT_NE(Vector(e.head.weights.row(0).begin(), e.head.weights.row(0).end()),
            (Vector{0, 0, 1, 0}));
}

TEST(Finetune, InsufficientShotsAndForeignLabels) {
  Problem p;
  FinetuneConfig cfg;
  cfg.shots = 3;
  EXPECT_THROW_WITH(finetune_split(p.head, p.split, p.train, cfg, {}), ValidationError,
                    "insufficient shots");
  cfg.shots = 1;
  auto only_s1 = p.train;
  only_s1.labels = {"s1", "s1", "s1", "s1"};
  EXPECT_THROW_WITH(finetune_split(p.head, p.split, only_s1, cfg, {}), ValidationError,
                    "insufficient shots for 's2'");
  auto foreign = p.train;
  foreign.labels[3] = "a";
  EXPECT_THROW_WITH(finetune_split(p.head, p.split, foreign, cfg, {}), ValidationError,
                    "is not a subcategory");
  cfg.shots = 0;
  EXPECT_THROW(finetune_split(p.head, p.split, p.train, cfg, {}), ValidationError);
}

TEST(Finetune, ValidationSetDrivesEarlyStopping) {
  Problem p;
  FinetuneConfig cfg;
  FeatureDataset val{Matrix{{1, 0, 0, 0}, {0, 0, 1, 0}}, {"s1", "a"}, DatasetRole::eval};
  const auto r = finetune_split(p.head, p.split, p.train, cfg, {}, &val);
  const auto& last = r.history.epochs.back();
  EXPECT_NE(last.metric, last.loss);
  FeatureDataset unrelated{Matrix{{1, 0, 0, 0}}, {"zzz"}, DatasetRole::eval};
  EXPECT_THROW(finetune_split(p.head, p.split, p.train, cfg, {}, &unrelated), ValidationError);
}

TEST(Finetune, Deterministic) {
  Problem p;
  FinetuneConfig cfg;
  cfg.init = InitMethod::random;
  cfg.train.seed = 4;
  EXPECT_EQ(finetune_split(p.head, p.split, p.train, cfg, {}).edited,
            finetune_split(p.head, p.split, p.train, cfg, {}).edited);
}

TEST(FitSoftmax, LearnsSeparableProblem) {
  Prng rng(63);
  Matrix x(0, 3);
  LabeledRows rows;
  rows.features = &x;
  for (std::size_t i = 0; i < 60; ++i) {
    const auto cls = i % 3;
    Vector v(3);
    for (std::size_t k = 0; k < 3; ++k) v[k] = (k == cls ? 1.0 : 0.0) + 0.05 * rng.normal();
    x.append_row(v);
    rows.samples.push_back(i);
    rows.targets.push_back(cls);
  }
  ClassifierHead h{{"x", "y", "z"}, Matrix(3, 3), Vector(3, 0.0)};
  SoftmaxTrainConfig cfg;
  cfg.lr = 0.05;
  const auto before = mean_cross_entropy(h, rows);
  fit_softmax_rows(h, 0, rows, cfg);
  EXPECT_LT(mean_cross_entropy(h, rows), before);
  for (std::size_t i = 0; i < 60; ++i) EXPECT_EQ(h.predict(x.row(i)), rows.targets[i]);
}

TEST(Scope, Names) {
  EXPECT_EQ(parse_scope("new-only"), FinetuneScope::new_only);
  EXPECT_EQ(parse_scope("head+new"), FinetuneScope::head_and_new);
  EXPECT_THROW(parse_scope("all"), ValidationError);
}

}  // namespace
}  // namespace catsplit
