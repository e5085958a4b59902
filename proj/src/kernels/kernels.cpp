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

#include "catsplit/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "catsplit/error.hpp"

namespace catsplit::kernels {

namespace scalar {

double dot(const double* a, const double* b, std::size_t n) noexcept {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void adamw(double* p, const double* g, double* m, double* v, std::size_t n,
           const AdamWCoefficients& c) noexcept {
  const double one_minus_b1 = 1.0 - c.beta1;
  const double one_minus_b2 = 1.0 - c.beta2;
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = c.beta1 * m[i] + one_minus_b1 * g[i];
    v[i] = c.beta2 * v[i] + one_minus_b2 * (g[i] * g[i]);
    const double m_hat = m[i] / c.bias_correction1;
    const double v_hat = v[i] / c.bias_correction2;
    const double update = m_hat / (std::sqrt(v_hat) + c.eps) + c.weight_decay * p[i];
    p[i] = p[i] - c.lr * update;
  }
}

}  // namespace scalar

namespace {

struct Table {
  Isa isa;
  double (*dot)(const double*, const double*, std::size_t) noexcept;
  void (*axpy)(double, const double*, double*, std::size_t) noexcept;
  void (*adamw)(double*, const double*, double*, double*, std::size_t,
                const AdamWCoefficients&) noexcept;
};

constexpr Table kScalar{Isa::scalar, &scalar::dot, &scalar::axpy, &scalar::adamw};
constexpr Table kAvx2{Isa::avx2, &avx2::dot, &avx2::axpy, &avx2::adamw};
constexpr Table kNeon{Isa::neon, &neon::dot, &neon::axpy, &neon::adamw};

const Table& table_for(Isa isa) {
  switch (isa) {
    case Isa::avx2: return kAvx2;
    case Isa::neon: return kNeon;
    case Isa::scalar: break;
  }
  return kScalar;
}

Isa detect() noexcept {
  if (const char* env = std::getenv("CATSPLIT_ISA")) {
    const std::string want(env);
    if (want == "scalar") return Isa::scalar;
    if (want == "avx2" && isa_supported(Isa::avx2)) return Isa::avx2;
    if (want == "neon" && isa_supported(Isa::neon)) return Isa::neon;
  }
  if (isa_supported(Isa::avx2)) return Isa::avx2;
  if (isa_supported(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

const Table*& active() {
  static const Table* current = &table_for(detect());
  return current;
}

void check_same(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw ValidationError(std::string(what) + ": length mismatch (" + std::to_string(a) +
                          " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
    case Isa::scalar: break;
  }
  return "scalar";
}

bool isa_supported(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() noexcept { return active()->isa; }

void set_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw ValidationError("ISA not supported on this CPU: " + std::string(isa_name(isa)));
  }
  active() = &table_for(isa);
}

double dot(std::span<const double> a, std::span<const double> b) {
  check_same(a.size(), b.size(), "dot");
  return active()->dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  check_same(x.size(), y.size(), "axpy");
  active()->axpy(alpha, x.data(), y.data(), x.size());
}

void gemv(std::span<const double> matrix, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<double> out) {
  check_same(matrix.size(), rows * cols, "gemv matrix");
  check_same(x.size(), cols, "gemv input");
  check_same(out.size(), rows, "gemv output");
  const auto kernel = active()->dot;
  for (std::size_t r = 0; r < rows; ++r) {
    out[r] = kernel(matrix.data() + r * cols, x.data(), cols);
  }
}

void adamw_update(std::span<double> params, std::span<const double> grads,
                  std::span<double> m, std::span<double> v,
                  const AdamWCoefficients& c) {
  check_same(params.size(), grads.size(), "adamw grads");
  check_same(params.size(), m.size(), "adamw first moment");
  check_same(params.size(), v.size(), "adamw second moment");
  active()->adamw(params.data(), grads.data(), m.data(), v.data(), params.size(), c);
}

}  // namespace catsplit::kernels
