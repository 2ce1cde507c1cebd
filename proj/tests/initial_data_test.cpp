#include "lrnls/initial_data.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"

namespace lrnls {
namespace {

TEST(Coefficient, SobolevSeries) {
  const auto spec = InitialDataSpec::sobolev(2.0);
  EXPECT_DOUBLE_EQ(coefficient(spec, 1).real(), 0.1);
  EXPECT_EQ(coefficient(spec, 0), Complex{});
  EXPECT_EQ(coefficient(InitialDataSpec::sobolev(0.3), 0), Complex{});
  // 2^{-2.51} = 0.1755556...
  EXPECT_NEAR(coefficient(spec, 2).real(), 0.01755556, 1e-8);
  EXPECT_NEAR(coefficient(spec, 2).real(), 0.1 * std::exp2(-2.51), 1e-17);
  for (int k = 1; k < 50; ++k) EXPECT_EQ(coefficient(spec, k), coefficient(spec, -k));
}

TEST(Coefficient, OtherKinds) {
  const auto plane = InitialDataSpec::plane(3, 0.5);
  EXPECT_EQ(coefficient(plane, 3), Complex(0.5));
  EXPECT_EQ(coefficient(plane, -3), Complex{});
  const auto constant = InitialDataSpec::constant(2.0);
  EXPECT_EQ(coefficient(constant, 0), Complex(2.0));
  EXPECT_EQ(coefficient(constant, 1), Complex{});
  InitialDataSpec custom;
  custom.kind = InitialKind::custom_coefficients;
  custom.custom = {{-2, Complex(0, 1)}, {5, 3.0}};
  EXPECT_EQ(coefficient(custom, -2), Complex(0, 1));
  EXPECT_EQ(coefficient(custom, 4), Complex{});
  EXPECT_EQ(effective_tail_cutoff(custom, 1), 5);
}

TEST(Spec, Validation) {
  EXPECT_THROW(InitialDataSpec::sobolev(0.0).validate(), std::invalid_argument);
  EXPECT_THROW(InitialDataSpec::sobolev(-1.0).validate(), std::invalid_argument);
  auto spec = InitialDataSpec::sobolev(1.0);
  spec.tail_cutoff = 0;
  EXPECT_THROW(spec.validate(), std::invalid_argument);
  EXPECT_NO_THROW(InitialDataSpec::plane(2).validate());
  EXPECT_EQ(parse_initial_kind("plane"), InitialKind::plane_wave);
  EXPECT_EQ(parse_initial_kind(to_string(InitialKind::custom_coefficients)), InitialKind::custom_coefficients);
  EXPECT_THROW(parse_initial_kind("gaussian"), std::invalid_argument);
}

TEST(Spec, DefaultTail) {
  const auto spec = InitialDataSpec::sobolev(1.0);
  EXPECT_EQ(effective_tail_cutoff(spec, 8), 1 << 14);
  EXPECT_EQ(effective_tail_cutoff(spec, 4096), 16 * 4096);
  auto fixed = spec;
  fixed.tail_cutoff = 300;
  EXPECT_EQ(effective_tail_cutoff(fixed, 4096), 300);
}

TEST(SampleOnGrid, SimpleStates) {
  const auto constant = sample_on_grid(InitialDataSpec::constant(1.5), 7, 0);
  for (const auto& v : constant.values()) EXPECT_NEAR(std::abs(v - 1.5), 0.0, 1e-15);

  const auto plane = sample_on_grid(InitialDataSpec::plane(1), 5, 1);
  for (long n = -2; n <= 2; ++n) {
    EXPECT_NEAR(std::abs(plane[n] - std::polar(1.0, 2 * std::numbers::pi * double(n) / 5.0)), 0.0, 1e-15);
  }
}

TEST(SampleOnGrid, MatchesDirectSeriesSummation) {
  const auto spec = InitialDataSpec::sobolev(1.0);
  const int tail = 400;
  const long m = 9;
  const auto samples = sample_on_grid(spec, m, tail);
  for (long n = -m / 2; n <= m / 2; ++n) {
    Complex acc{};
    for (int k = -tail; k <= tail; ++k) {
      acc += coefficient(spec, k) * std::polar(1.0, double(k) * 2 * std::numbers::pi * double(n) / double(m));
    }
    EXPECT_NEAR(std::abs(samples[n] - acc), 0.0, 1e-13) << n;
  }
}

TEST(SampleOnGrid, InterpolatedModeCollectsAliases) {
  // alpha=2, N=8: mode 1 of the 33-point interpolant is sum_j c_{1+33j}.
  const auto spec = InitialDataSpec::sobolev(2.0);
  const int tail = 1 << 14;
  const long m = 33;
  const auto coeffs = DftPlan(m).forward(sample_on_grid(spec, m, tail));
  Complex folded{};
  for (long j = -tail; j <= tail; ++j) {
    const long k = 1 + m * j;
    if (std::abs(k) <= tail) folded += coefficient(spec, static_cast<int>(k));
  }
  EXPECT_NEAR(std::abs(coeffs[1] - folded), 0.0, 1e-14);
  // The alias sum is dominated by k = -32 and k = 34.
  const double alias = std::abs(coeffs[1] - 0.1);
  EXPECT_GT(alias, 3e-5);
  EXPECT_LT(alias, 5e-5);
}

TEST(SampleOnGrid, TailDoublingWithinTailBound) {
  const auto spec = InitialDataSpec::sobolev(2.0);
  const int tail = 1 << 14;
  const auto a = sample_on_grid(spec, 33, tail);
  const auto b = sample_on_grid(spec, 33, 2 * tail);
  const double change = oracle::max_abs_diff(a.values(), b.values());
  // Both signs of k contribute sum_{k>K} k^{-2.51} <= K^{-1.51}/1.51.
  const double bound = 0.2 * std::pow(double(tail), -1.51) / 1.51;
  EXPECT_LE(change, bound);
  EXPECT_GE(change, 0.5 * bound);
}

TEST(TruncatedField, CopiesCoefficients) {
  const auto spec = InitialDataSpec::sobolev(1.0);
  const auto f = truncated_field(spec, 6);
  EXPECT_EQ(f.cutoff(), 6);
  for (int k = -6; k <= 6; ++k) EXPECT_EQ(f.coeff(k), coefficient(spec, k));
}

TEST(SobolevSeries, LiesInHAlphaOnly) {
  // Dyadic blocks of 2 pi sum (1+k^2)^s |c_k|^2 shrink for s = alpha and
  // grow once s exceeds alpha by 0.1.
  for (double alpha : {1.0, 2.0}) {
    const auto spec = InitialDataSpec::sobolev(alpha);
    auto block = [&](double s, long lo) {
      double sum = 0.0;
      for (long k = lo; k < 2 * lo; ++k) sum += 2 * std::pow(1.0 + double(k * k), s) * std::norm(coefficient(spec, int(k)));
      return 2 * std::numbers::pi * sum;
    };
    double previous = block(alpha, 1 << 8);
    for (long lo = 1 << 9; lo <= (1 << 14); lo *= 2) {
      const double next = block(alpha, lo);
      EXPECT_LT(next, previous);
      previous = next;
    }
    EXPECT_GT(block(alpha + 0.1, 1 << 14), block(alpha + 0.1, 1 << 8));
  }
}

}  // namespace
}  // namespace lrnls
