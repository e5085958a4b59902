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

// Dense double-precision kernels used by every hot loop in the library.
//
// Each kernel exists as a scalar reference implementation plus vectorized
// variants (AVX2+FMA on x86-64, NEON on AArch64). The variant is chosen once
// at startup from the CPU's capabilities and may be overridden with the
// CATSPLIT_ISA environment variable ("scalar", "avx2", "neon") or set_isa().
//
// Within one process and one ISA every kernel is deterministic. The scalar and
// vector reductions (dot, gemv) sum in different orders, so they agree only to
// rounding; the elementwise kernels (axpy without FMA contraction, adamw) are
// bit-identical across variants.

#include <cstddef>
#include <span>
#include <string_view>

namespace catsplit::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa) noexcept;
bool isa_supported(Isa isa) noexcept;
Isa active_isa() noexcept;
// Throws ValidationError when the requested ISA is not available on this CPU.
void set_isa(Isa isa);

struct AdamWCoefficients {
  double lr = 1e-3;
  double weight_decay = 0.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double bias_correction1 = 1.0;  // 1 - beta1^t
  double bias_correction2 = 1.0;  // 1 - beta2^t
};

double dot(std::span<const double> a, std::span<const double> b);
// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
// out[r] = dot(W[r, :], x) for a row-major rows x cols matrix.
void gemv(std::span<const double> matrix, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<double> out);
// Decoupled-weight-decay Adam update over one contiguous parameter block.
void adamw_update(std::span<double> params, std::span<const double> grads,
                  std::span<double> m, std::span<double> v,
                  const AdamWCoefficients& c);

// Variant entry points. No size checks; callers go through the dispatching
// functions above unless they are testing a specific variant.
namespace scalar {
double dot(const double* a, const double* b, std::size_t n) noexcept;
void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept;
void adamw(double* p, const double* g, double* m, double* v, std::size_t n,
           const AdamWCoefficients& c) noexcept;
}  // namespace scalar

namespace avx2 {
double dot(const double* a, const double* b, std::size_t n) noexcept;
void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept;
void adamw(double* p, const double* g, double* m, double* v, std::size_t n,
           const AdamWCoefficients& c) noexcept;
}  // namespace avx2

namespace neon {
double dot(const double* a, const double* b, std::size_t n) noexcept;
void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept;
void adamw(double* p, const double* g, double* m, double* v, std::size_t n,
           const AdamWCoefficients& c) noexcept;
}  // namespace neon

}  // namespace catsplit::kernels
