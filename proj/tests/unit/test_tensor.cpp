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
#include <cstring>
#include <limits>

#include "catsplit/error.hpp"
#include "catsplit/tensor.hpp"
#include "test_support.hpp"

namespace catsplit {
namespace {

using testing::TempDir;

// Layout built by hand, independent of encode_tensor.
std::vector<std::uint8_t> manual_file(const char* magic, std::vector<std::uint64_t> dims,
                                      std::vector<float> values, std::uint32_t version = 1) {
  std::vector<std::uint8_t> out(magic, magic + 4);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(version >> (8 * i)));
  out.push_back(0);
  out.push_back(static_cast<std::uint8_t>(dims.size()));
  out.push_back(0);
  out.push_back(0);
  for (auto d : dims) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(d >> (8 * i)));
  }
  for (float f : values) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
  }
  return out;
}

TEST(Tensor, Rank2HeaderIs28BytesAndPayload24) {
  Tensor t{{2, 3}, {1, 2, 3, 4, 5, 6}};
  const auto bytes = encode_tensor(t);
  EXPECT_EQ(bytes.size(), 28u + 24u);
  EXPECT_EQ(bytes, manual_file("CSPL", {2, 3}, {1, 2, 3, 4, 5, 6}));
}

TEST(Tensor, SaveLoadRoundtripKeepsValues) {
  TempDir dir("tensor");
  const Tensor t{{2}, {1.5f, -2.0f}};
  save_tensor(t, dir / "v.cspl");
  EXPECT_EQ(load_tensor(dir / "v.cspl"), t);
}

TEST(Tensor, NanIsRejectedOnSave) {
  TempDir dir("tensor");
  const Tensor t{{2}, {1.0f, std::numeric_limits<float>::quiet_NaN()}};
  EXPECT_THROW_WITH(save_tensor(t, dir / "bad.cspl"), ValidationError, "non-finite element");
}

TEST(Tensor, InfinityIsRejectedOnLoad) {
  const auto bytes = manual_file("CSPL", {1}, {std::numeric_limits<float>::infinity()});
  EXPECT_THROW_WITH(decode_tensor(bytes), ValidationError, "non-finite element");
}

TEST(Tensor, BadMagic) {
  EXPECT_THROW_WITH(decode_tensor(manual_file("XSPL", {1}, {1.0f})), ValidationError, "bad magic");
}

TEST(Tensor, TruncatedPayloadNamesRequiredBytes) {
  auto bytes = manual_file("CSPL", {3}, {1.0f, 2.0f});
  EXPECT_THROW_WITH(decode_tensor(bytes), ValidationError, "truncated payload (needs 12");
}

TEST(Tensor, TrailingBytesRejected) {
  auto bytes = manual_file("CSPL", {1}, {1.0f});
  bytes.push_back(0);
  EXPECT_THROW_WITH(decode_tensor(bytes), ValidationError, "trailing bytes");
}

TEST(Tensor, UnsupportedVersionAndDtype) {
  EXPECT_THROW_WITH(decode_tensor(manual_file("CSPL", {1}, {1.0f}, 2)), ValidationError,
                    "unsupported version");
  auto bytes = manual_file("CSPL", {1}, {1.0f});
  bytes[8] = 7;
  EXPECT_THROW_WITH(decode_tensor(bytes), ValidationError, "unsupported dtype");
}

TEST(Tensor, TruncatedHeader) {
  auto bytes = manual_file("CSPL", {2, 2}, {1, 0, 0, 1});
  bytes.resize(20);
  EXPECT_THROW_WITH(decode_tensor(bytes), ValidationError, "truncated header");
  bytes.resize(5);
  EXPECT_THROW_WITH(decode_tensor(bytes), ValidationError, "truncated header");
}

TEST(Tensor, IdentityMatrixFile) {
  TempDir dir("tensor");
  testing::write_bytes(dir / "eye.cspl", manual_file("CSPL", {2, 2}, {1, 0, 0, 1}));
  const auto m = load_tensor(dir / "eye.cspl").to_matrix();
  EXPECT_EQ(m, (Matrix{{1, 0}, {0, 1}}));
}

TEST(Tensor, MissingFileIsIoError) {
  EXPECT_THROW(load_tensor("/nonexistent/dir/x.cspl"), IoError);
}

TEST(Tensor, LoadErrorNamesPath) {
  TempDir dir("tensor");
  testing::write_bytes(dir / "m.cspl", manual_file("XSPL", {1}, {1.0f}));
  EXPECT_THROW_WITH(load_tensor(dir / "m.cspl"), ValidationError, "m.cspl: bad magic");
}

TEST(Tensor, RandomRoundtripProperty) {
  TempDir dir("tensor");
  Prng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    Tensor t;
    if (rng.below(2) == 0) {
      t.dims = {1 + rng.below(40)};
    } else {
      t.dims = {1 + rng.below(12), 1 + rng.below(12)};
    }
    std::size_t n = 1;
    for (auto d : t.dims) n *= d;
    for (std::size_t i = 0; i < n; ++i) t.data.push_back(static_cast<float>(rng.normal() * 1e3));
    EXPECT_EQ(decode_tensor(encode_tensor(t)), t);
    if (trial % 20 == 0) {
      save_tensor(t, dir / "r.cspl");
      EXPECT_EQ(load_tensor(dir / "r.cspl"), t);
    }
  }
}

TEST(Tensor, MatrixConversionNarrowsToFloat) {
  const Matrix m{{0.1, 0.2}, {0.3, 0.4}};
  const auto back = Tensor::from_matrix(m).to_matrix();
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(back.values()[i], static_cast<double>(static_cast<float>(m.values()[i])));
  }
}

TEST(Matrix, AppendRowRejectsWidthMismatch) {
  Matrix m{{1, 2}};
  EXPECT_THROW(m.append_row(Vector{1, 2, 3}), ValidationError);
}

TEST(Cosine, SpecExamples) {
  EXPECT_DOUBLE_EQ(cosine_similarity(Vector{1, 0}, Vector{1, 0}), 1.0);
  EXPECT_DOUBLE_EQ(cosine_similarity(Vector{1, 0}, Vector{0, 1}), 0.0);
  EXPECT_DOUBLE_EQ(cosine_similarity(Vector{2, 0}, Vector{1, 0}), 1.0);
}

TEST(Cosine, ErrorsOnZeroNormAndLengthMismatch) {
  EXPECT_THROW_WITH(cosine_similarity(Vector{0, 0}, Vector{1, 0}), ValidationError, "zero-norm");
  EXPECT_THROW_WITH(cosine_similarity(Vector{1}, Vector{1, 0}), ValidationError, "length mismatch");
}

TEST(Cosine, SymmetricScaleInvariantAndBounded) {
  Prng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const auto n = 1 + rng.below(50);
    const auto a = testing::random_vector(n, rng);
    const auto b = testing::random_vector(n, rng);
    const double c = cosine_similarity(a, b);
    EXPECT_GE(c, -1.0);
    EXPECT_LE(c, 1.0);
    EXPECT_EQ(c, cosine_similarity(b, a));
    Vector scaled = a;
    const double s = 0.1 + 10.0 * rng.uniform();
    for (auto& x : scaled) x *= s;
    EXPECT_NEAR(cosine_similarity(scaled, b), c, 1e-12);
  }
}

}  // namespace
}  // namespace catsplit
