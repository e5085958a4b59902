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

// The CSPL tensor container and the in-memory vector/matrix values built on
// top of it.
//
// File layout (all integers little-endian):
//
//   offset  size       field
//   0       4          magic "CSPL"
//   4       4          version (u32, = 1)
//   8       1          dtype code (u8, 0 = f32 LE)
//   9       1          rank (u8, 1 or 2)
//   10      2          reserved (u16, = 0)
//   12      8 * rank   dims (u64 each)
//   ...     4 * prod   payload, row-major f32 LE
//
// Rank-2 tensors are stored one category / label / sample per row.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <span>
#include <vector>

namespace catsplit {

using Vector = std::vector<double>;

// Row-major dense matrix of doubles. All arithmetic in the library runs in
// double; values are narrowed to f32 only when written to a CSPL file.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }
  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  // Appends a row; the first append on an empty matrix fixes the column count.
  void append_row(std::span<const double> values);
  // Copy of the selected rows, in the given order.
  Matrix select_rows(std::span<const std::size_t> indices) const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct Tensor {
  std::vector<std::uint64_t> dims;
  std::vector<float> data;

  std::size_t rank() const noexcept { return dims.size(); }
  // Throws ValidationError if any Tensor invariant is violated.
  void validate() const;

  static Tensor from_vector(std::span<const double> values);
  static Tensor from_matrix(const Matrix& m);
  // Rank 1 only.
  Vector to_vector() const;
  // Rank 2, or rank 1 viewed as a single row.
  Matrix to_matrix() const;

  bool operator==(const Tensor&) const = default;
};

inline constexpr std::size_t kTensorHeaderFixedBytes = 12;

void save_tensor(const Tensor& t, const std::filesystem::path& path);
Tensor load_tensor(const std::filesystem::path& path);

// Byte-level codec used by save/load; exposed for tests.
std::vector<std::uint8_t> encode_tensor(const Tensor& t);
Tensor decode_tensor(std::span<const std::uint8_t> bytes);

// a.b / (|a| |b|). Throws on length mismatch or a zero-norm input.
double cosine_similarity(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> a);

}  // namespace catsplit
