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

#include "catsplit/tensor.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

#include "catsplit/error.hpp"
#include "catsplit/kernels.hpp"

namespace catsplit {

static_assert(std::numeric_limits<float>::is_iec559, "f32 must be IEEE-754");

namespace {

constexpr std::uint8_t kMagic[4] = {'C', 'S', 'P', 'L'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint8_t kDtypeF32 = 0;

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  using U = std::make_unsigned_t<T>;
  auto bits = static_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::uint8_t>(bits & 0xFFu));
    bits = static_cast<U>(bits >> 8);
  }
}

template <typename T>
T get_le(const std::uint8_t* in) {
  T value = 0;
  for (std::size_t i = sizeof(T); i-- > 0;) {
    value = static_cast<T>((value << 8) | in[i]);
  }
  return value;
}

std::uint64_t checked_product(std::span<const std::uint64_t> dims) {
  std::uint64_t total = 1;
  for (const auto d : dims) {
    if (d == 0) throw ValidationError("tensor dim must be >= 1");
    if (total > std::numeric_limits<std::uint64_t>::max() / d) {
      throw ValidationError("tensor dims overflow");
    }
    total *= d;
  }
  return total;
}

void require_finite(std::span<const float> data) {
  for (const float x : data) {
    if (!std::isfinite(x)) throw ValidationError("non-finite element");
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  for (const auto& r : rows) append_row(std::vector<double>(r));
}

void Matrix::append_row(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) {
    cols_ = values.size();
  } else if (values.size() != cols_) {
    throw ValidationError("row length " + std::to_string(values.size()) +
                          " does not match matrix width " + std::to_string(cols_));
  }
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

Matrix Matrix::select_rows(std::span<const std::size_t> indices) const {
  Matrix out(0, cols_);
  out.data_.reserve(indices.size() * cols_);
  for (const auto i : indices) out.append_row(row(i));
  return out;
}

void Tensor::validate() const {
  if (rank() != 1 && rank() != 2) throw ValidationError("tensor rank must be 1 or 2");
  const auto n = checked_product(dims);
  if (n != data.size()) throw ValidationError("tensor data length does not match dims");
  require_finite(data);
}

Tensor Tensor::from_vector(std::span<const double> values) {
  Tensor t;
  t.dims = {values.size()};
  t.data.reserve(values.size());
  for (const double x : values) t.data.push_back(static_cast<float>(x));
  return t;
}

Tensor Tensor::from_matrix(const Matrix& m) {
  Tensor t;
  t.dims = {m.rows(), m.cols()};
  t.data.reserve(m.rows() * m.cols());
  for (const double x : m.values()) t.data.push_back(static_cast<float>(x));
  return t;
}

Vector Tensor::to_vector() const {
  if (rank() != 1) throw ValidationError("expected a rank-1 tensor");
  return Vector(data.begin(), data.end());
}

Matrix Tensor::to_matrix() const {
  if (rank() != 1 && rank() != 2) throw ValidationError("expected a rank-1 or rank-2 tensor");
  const std::size_t rows = rank() == 2 ? dims[0] : 1;
  const std::size_t cols = rank() == 2 ? dims[1] : dims[0];
  Matrix m(rows, cols);
  auto out = m.values();
  for (std::size_t i = 0; i < data.size(); ++i) out[i] = data[i];
  return m;
}

std::vector<std::uint8_t> encode_tensor(const Tensor& t) {
  t.validate();
  std::vector<std::uint8_t> out;
  out.reserve(kTensorHeaderFixedBytes + 8 * t.rank() + 4 * t.data.size());
  for (const auto c : kMagic) out.push_back(static_cast<std::uint8_t>(c));
  put_le<std::uint32_t>(out, kVersion);
  out.push_back(kDtypeF32);
  out.push_back(static_cast<std::uint8_t>(t.rank()));
  put_le<std::uint16_t>(out, 0);
  for (const auto d : t.dims) put_le<std::uint64_t>(out, d);
  for (const float x : t.data) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(x));
  return out;
}

Tensor decode_tensor(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kTensorHeaderFixedBytes) throw ValidationError("truncated header");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw ValidationError("bad magic");
  const auto version = get_le<std::uint32_t>(bytes.data() + 4);
  if (version != kVersion) {
    throw ValidationError("unsupported version " + std::to_string(version));
  }
  if (bytes[8] != kDtypeF32) {
    throw ValidationError("unsupported dtype code " + std::to_string(bytes[8]));
  }
  const std::size_t rank = bytes[9];
  if (rank != 1 && rank != 2) throw ValidationError("tensor rank must be 1 or 2");
  if (get_le<std::uint16_t>(bytes.data() + 10) != 0) {
    throw ValidationError("reserved header field must be zero");
  }
  const std::size_t header = kTensorHeaderFixedBytes + 8 * rank;
  if (bytes.size() < header) throw ValidationError("truncated header");

  Tensor t;
  for (std::size_t i = 0; i < rank; ++i) {
    t.dims.push_back(get_le<std::uint64_t>(bytes.data() + kTensorHeaderFixedBytes + 8 * i));
  }
  const auto count = checked_product(t.dims);
  const auto payload = bytes.size() - header;
  if (count > payload / 4) {
    throw ValidationError("truncated payload (needs " + std::to_string(4 * count) +
                          " bytes, found " + std::to_string(payload) + ")");
  }
  if (payload != 4 * count) throw ValidationError("trailing bytes after payload");

  t.data.resize(count);
  const std::uint8_t* p = bytes.data() + header;
  for (std::size_t i = 0; i < count; ++i) {
    t.data[i] = std::bit_cast<float>(get_le<std::uint32_t>(p + 4 * i));
  }
  require_finite(t.data);
  return t;
}

void save_tensor(const Tensor& t, const std::filesystem::path& path) {
  const auto bytes = encode_tensor(t);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

Tensor load_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  try {
    return decode_tensor(bytes);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

double l2_norm(std::span<const double> a) { return std::sqrt(kernels::dot(a, a)); }

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ValidationError("cosine similarity: length mismatch (" + std::to_string(a.size()) +
                          " vs " + std::to_string(b.size()) + ")");
  }
  const double na = l2_norm(a);
  const double nb = l2_norm(b);
  if (na == 0.0 || nb == 0.0) throw ValidationError("cosine similarity: zero-norm input");
  const double c = kernels::dot(a, b) / (na * nb);
  return std::clamp(c, -1.0, 1.0);
}

}  // namespace catsplit
