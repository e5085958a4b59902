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

#if defined(__aarch64__)

#include <arm_neon.h>

namespace catsplit::kernels::neon {

double dot(const double* a, const double* b, std::size_t n) noexcept {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void adamw(double* p, const double* g, double* m, double* v, std::size_t n,
           const AdamWCoefficients& c) noexcept {
  const float64x2_t b1 = vdupq_n_f64(c.beta1);
  const float64x2_t b2 = vdupq_n_f64(c.beta2);
  const float64x2_t omb1 = vdupq_n_f64(1.0 - c.beta1);
  const float64x2_t omb2 = vdupq_n_f64(1.0 - c.beta2);
  const float64x2_t bc1 = vdupq_n_f64(c.bias_correction1);
  const float64x2_t bc2 = vdupq_n_f64(c.bias_correction2);
  const float64x2_t eps = vdupq_n_f64(c.eps);
  const float64x2_t wd = vdupq_n_f64(c.weight_decay);
  const float64x2_t lr = vdupq_n_f64(c.lr);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t gi = vld1q_f64(g + i);
    const float64x2_t pi = vld1q_f64(p + i);
    const float64x2_t mi = vaddq_f64(vmulq_f64(b1, vld1q_f64(m + i)), vmulq_f64(omb1, gi));
    const float64x2_t vi =
        vaddq_f64(vmulq_f64(b2, vld1q_f64(v + i)), vmulq_f64(omb2, vmulq_f64(gi, gi)));
    vst1q_f64(m + i, mi);
    vst1q_f64(v + i, vi);
    const float64x2_t m_hat = vdivq_f64(mi, bc1);
    const float64x2_t v_hat = vdivq_f64(vi, bc2);
    const float64x2_t step =
        vaddq_f64(vdivq_f64(m_hat, vaddq_f64(vsqrtq_f64(v_hat), eps)), vmulq_f64(wd, pi));
    vst1q_f64(p + i, vsubq_f64(pi, vmulq_f64(lr, step)));
  }
  if (i < n) scalar::adamw(p + i, g + i, m + i, v + i, n - i, c);
}

}  // namespace catsplit::kernels::neon

#else

namespace catsplit::kernels::neon {

double dot(const double* a, const double* b, std::size_t n) noexcept {
  return scalar::dot(a, b, n);
}
void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept {
  scalar::axpy(alpha, x, y, n);
}
void adamw(double* p, const double* g, double* m, double* v, std::size_t n,
           const AdamWCoefficients& c) noexcept {
  scalar::adamw(p, g, m, v, n, c);
}

}  // namespace catsplit::kernels::neon

#endif
