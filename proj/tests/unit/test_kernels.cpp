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

#include "catsplit/error.hpp"
#include "catsplit/kernels.hpp"
#include "test_support.hpp"

namespace catsplit {
namespace {

using testing::random_vector;
namespace k = kernels;

bool bitwise_equal(const Vector& a, const Vector& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

double naive_dot(const Vector& a, const Vector& b) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<long double>(a[i]) * b[i];
  return static_cast<double>(s);
}

class VariantTest : public ::testing::TestWithParam<k::Isa> {
 protected:
  void SetUp() override {
    if (!k::isa_supported(GetParam())) GTEST_SKIP() << k::isa_name(GetParam()) << " unavailable";
  }
  double dot(const Vector& a, const Vector& b) const {
    switch (GetParam()) {
      case k::Isa::avx2: return k::avx2::dot(a.data(), b.data(), a.size());
      case k::Isa::neon: return k::neon::dot(a.data(), b.data(), a.size());
      default: return k::scalar::dot(a.data(), b.data(), a.size());
    }
  }
  void axpy(double alpha, const Vector& x, Vector& y) const {
    switch (GetParam()) {
      case k::Isa::avx2: return k::avx2::axpy(alpha, x.data(), y.data(), x.size());
      case k::Isa::neon: return k::neon::axpy(alpha, x.data(), y.data(), x.size());
      default: return k::scalar::axpy(alpha, x.data(), y.data(), x.size());
    }
  }
  void adamw(Vector& p, const Vector& g, Vector& m, Vector& v, const k::AdamWCoefficients& c) const {
    switch (GetParam()) {
      case k::Isa::avx2: return k::avx2::adamw(p.data(), g.data(), m.data(), v.data(), p.size(), c);
      case k::Isa::neon: return k::neon::adamw(p.data(), g.data(), m.data(), v.data(), p.size(), c);
      default: return k::scalar::adamw(p.data(), g.data(), m.data(), v.data(), p.size(), c);
    }
  }
};

TEST_P(VariantTest, DotMatchesExtendedPrecisionSum) {
  Prng rng(11);
  for (std::size_t n : {0, 1, 3, 4, 7, 8, 15, 16, 17, 63, 64, 65, 1000}) {
    const auto a = random_vector(n, rng);
    const auto b = random_vector(n, rng);
    const double ref = naive_dot(a, b);
    EXPECT_NEAR(dot(a, b), ref, 1e-12 * (1.0 + std::sqrt(static_cast<double>(n)))) << "n=" << n;
  }
}

TEST_P(VariantTest, DotAgreesWithScalarToRounding) {
  Prng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = rng.below(300);
    const auto a = random_vector(n, rng);
    const auto b = random_vector(n, rng);
    double mag = 0.0;
    for (std::size_t i = 0; i < n; ++i) mag += std::abs(a[i] * b[i]);
    EXPECT_NEAR(dot(a, b), k::scalar::dot(a.data(), b.data(), n), 1e-14 * (1.0 + mag));
  }
}

TEST_P(VariantTest, AxpyIsBitwiseEqualToScalar) {
  Prng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = rng.below(200);
    const auto x = random_vector(n, rng);
    auto y = random_vector(n, rng);
    auto y_ref = y;
    const double alpha = rng.normal();
    axpy(alpha, x, y);
    k::scalar::axpy(alpha, x.data(), y_ref.data(), n);
    EXPECT_TRUE(bitwise_equal(y, y_ref)) << "n=" << n;
  }
}

TEST_P(VariantTest, AdamwIsBitwiseEqualToScalar) {
  Prng rng(14);
  for (int trial = 0; trial < 30; ++trial) {
    const auto n = rng.below(150);
    auto p = random_vector(n, rng);
    auto m = random_vector(n, rng, 0.1);
    auto v = random_vector(n, rng, 0.1);
    for (auto& x : v) x = std::abs(x);
    const auto g = random_vector(n, rng);
    auto p_ref = p, m_ref = m, v_ref = v;
    const k::AdamWCoefficients c{1e-3, 1e-2, 0.9, 0.999, 1e-8, 1.0 - std::pow(0.9, 3),
                                 1.0 - std::pow(0.999, 3)};
    adamw(p, g, m, v, c);
    k::scalar::adamw(p_ref.data(), g.data(), m_ref.data(), v_ref.data(), n, c);
    EXPECT_TRUE(bitwise_equal(p, p_ref));
    EXPECT_TRUE(bitwise_equal(m, m_ref));
    EXPECT_TRUE(bitwise_equal(v, v_ref));
  }
}

INSTANTIATE_TEST_SUITE_P(Isa, VariantTest,
                         ::testing::Values(k::Isa::scalar, k::Isa::avx2, k::Isa::neon),
                         [](const auto& info) { return std::string(k::isa_name(info.param)); });

TEST(Kernels, ScalarAlwaysSupported) { EXPECT_TRUE(k::isa_supported(k::Isa::scalar)); }

TEST(Kernels, SetIsaSwitchesAndRejectsUnsupported) {
  const auto before = k::active_isa();
  k::set_isa(k::Isa::scalar);
  EXPECT_EQ(k::active_isa(), k::Isa::scalar);
  for (auto isa : {k::Isa::avx2, k::Isa::neon}) {
    if (!k::isa_supported(isa)) EXPECT_THROW(k::set_isa(isa), ValidationError);
  }
  k::set_isa(before);
}

TEST(Kernels, DispatchChecksLengths) {
  Vector a(3), b(4);
  EXPECT_THROW(k::dot(a, b), ValidationError);
  EXPECT_THROW(k::axpy(1.0, a, b), ValidationError);
  Vector out(2);
  EXPECT_THROW(k::gemv(a, 2, 2, Vector(2), out), ValidationError);
}

TEST(Kernels, GemvComputesRowDots) {
  const Vector w{1, 2, 3, 4, 5, 6};
  const Vector x{1, 0, -1};
  Vector out(2);
  k::gemv(w, 2, 3, x, out);
  EXPECT_DOUBLE_EQ(out[0], -2.0);
  EXPECT_DOUBLE_EQ(out[1], -2.0);
}

}  // namespace
}  // namespace catsplit
