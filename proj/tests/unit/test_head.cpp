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

#include "catsplit/error.hpp"
#include "catsplit/head.hpp"
#include "catsplit/taxonomy.hpp"
#include "test_support.hpp"

namespace catsplit {
namespace {

using testing::TempDir;

ClassifierHead three_labels() {
  return ClassifierHead{{"a", "b", "c"}, Matrix{{1, 0}, {0, 1}, {1, 1}}, Vector{0.0, 0.5, -0.25}};
}

TEST(Argmax, TiesGoToLowestIndex) {
  EXPECT_EQ(argmax(Vector{1, 3, 3, 2}), 1u);
  EXPECT_EQ(argmax(Vector{0, 0, 0}), 0u);
  EXPECT_THROW(argmax(Vector{}), ValidationError);
}

TEST(Head, LogitsAddBias) {
  const auto h = three_labels();
  const auto z = h.logits(Vector{2, 1});
  EXPECT_EQ(z, (Vector{2.0, 1.5, 2.75}));
  EXPECT_EQ(h.predict_label(Vector{2, 1}), "c");
}

TEST(Head, ValidateCatchesShapeAndDuplicates) {
  auto h = three_labels();
  h.labels[2] = "a";
  EXPECT_THROW_WITH(h.validate(), ValidationError, "duplicate head label");
  h = three_labels();
  h.bias = Vector{1.0};
  EXPECT_THROW(h.validate(), ValidationError);
  h = three_labels();
  h.labels.pop_back();
  EXPECT_THROW(h.validate(), ValidationError);
  EXPECT_THROW(three_labels().logits(Vector{1, 2, 3}), ValidationError);
}

TEST(Head, RequireIndex) {
  const auto h = three_labels();
  EXPECT_EQ(h.require_index("b"), 1u);
  EXPECT_THROW_WITH(h.require_index("z"), ValidationError, "not in the head");
}

TEST(Head, SaveLoadRoundtrip) {
  TempDir dir("head");
  const auto h = three_labels();
  save_head(h, dir / "h");
  EXPECT_EQ(load_head(dir / "h"), h);
  EXPECT_EQ(load_head(dir / "h" / "head.json"), h);
  const auto edited = load_edited_head(dir / "h");
  EXPECT_TRUE(edited.coarse_id.empty());
  EXPECT_EQ(edited.retained, 3u);
}

TEST(Head, HeadWithoutBias) {
  TempDir dir("head");
  auto h = three_labels();
  h.bias.reset();
  save_head(h, dir / "h");
  EXPECT_FALSE(std::filesystem::exists(dir / "h" / "bias.cspl"));
  EXPECT_EQ(load_head(dir / "h"), h);
}

TEST(Head, EditedHeadRoundtrip) {
  TempDir dir("head");
  EditedHead e;
  e.head = three_labels();
  e.coarse_id = "x";
  e.retained = 1;
  e.provenance = {{"b", Provenance{InitMethod::retrieval, 4, "left to right"}},
                  {"c", Provenance{InitMethod::random, std::nullopt, ""}}};
  save_edited_head(e, dir / "e");
  EXPECT_EQ(load_edited_head(dir / "e"), e);
}

TEST(Head, FromRowsUsesTaxonomyOrder) {
  const auto t = testing::small_taxonomy();
  Matrix w(5, 2, 1.0);
  const auto h = head_from_rows(t, w);
  EXPECT_EQ(h.labels, t.row_order());
  EXPECT_THROW(head_from_rows(t, Matrix(4, 2)), ValidationError);
}

TEST(InitMethodNames, RoundTrip) {
  for (auto m : {InitMethod::retrieval, InitMethod::joint, InitMethod::alignment,
                 InitMethod::coarse_copy, InitMethod::random}) {
    EXPECT_EQ(parse_init_method(init_method_name(m)), m);
  }
  EXPECT_EQ(init_method_name(InitMethod::coarse_copy), "coarse-copy");
  EXPECT_THROW(parse_init_method("copy"), ValidationError);
}

}  // namespace
}  // namespace catsplit
