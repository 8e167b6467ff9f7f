#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "wgf/measures.hpp"

using namespace wgf;

namespace {

ReferenceProfile two_bumps() { return ReferenceProfile({0.0, 1.0, 2.0, 3.0}, {1.0, 0.0, 1.0}); }

}  // namespace

TEST(InverseCDF, RejectsUnsortedAndNonFinite) {
  EXPECT_THROW(InverseCDF({0.0, 1.0, 0.5}), StateError);
  EXPECT_THROW(InverseCDF({0.0, NAN}), StateError);
  EXPECT_THROW(InverseCDF(std::vector<double>{}), ShapeError);
}

TEST(InverseCDF, MidpointGridAndSlope) {
  const InverseCDF X = InverseCDF::uniform(0.0, 2.0, 4);
  EXPECT_DOUBLE_EQ(X.z(0), 0.125);
  EXPECT_DOUBLE_EQ(X[3], 1.75);
  EXPECT_NEAR(X.min_slope(), 2.0, 1e-14);
  EXPECT_NEAR(X.mean(), 1.0, 1e-15);
  EXPECT_TRUE(std::isinf(InverseCDF({3.0}).min_slope()));
}

TEST(ReferenceProfile, MassAndBound) {
  const ReferenceProfile p({0.0, 1.0, 1.5}, {1.0, 3.0});
  EXPECT_NEAR(p.mass(), 2.5, 1e-15);
  EXPECT_EQ(p.density_bound(), 3.0);
  EXPECT_THROW(ReferenceProfile({0.0, 1.0}, {1.0, 2.0}), ShapeError);
  EXPECT_THROW(ReferenceProfile({0.0, 0.0}, {1.0}), InputError);
  EXPECT_THROW(ReferenceProfile({0.0, 1.0}, {-1.0}), InputError);
  EXPECT_THROW(ReferenceProfile({0.0, 1.0}, {0.0}), InputError);
}

TEST(ReferenceProfile, CdfExamples) {
  EXPECT_DOUBLE_EQ(ReferenceProfile::uniform(0.0, 1.0, 1.0).cdf(0.5), 0.5);
  EXPECT_EQ(two_bumps().cdf(-1.0), 0.0);
  EXPECT_DOUBLE_EQ(ReferenceProfile::uniform(0.0, 1.0, 2.0).cdf(0.75), 1.5);
  EXPECT_DOUBLE_EQ(two_bumps().cdf(10.0), 2.0);
}

TEST(ReferenceProfile, PseudoInverseExamples) {
  EXPECT_DOUBLE_EQ(ReferenceProfile::uniform(0.0, 1.0, 1.0).pseudo_inverse(0.25), 0.25);
  EXPECT_DOUBLE_EQ(two_bumps().pseudo_inverse(1.0), 2.0);
  EXPECT_DOUBLE_EQ(ReferenceProfile::uniform(0.0, 1.0, 2.0).pseudo_inverse(1.5), 0.75);
  EXPECT_DOUBLE_EQ(two_bumps().pseudo_inverse(0.0), 0.0);
  EXPECT_THROW(two_bumps().pseudo_inverse(2.0), DomainError);
  EXPECT_THROW(two_bumps().pseudo_inverse(-0.1), DomainError);
  EXPECT_DOUBLE_EQ(two_bumps().lower_quantile(1.0), 1.0);
  EXPECT_DOUBLE_EQ(two_bumps().lower_quantile(2.0), 3.0);
}

TEST(ReferenceProfile, PseudoInverseMatchesBisectionOracle) {
  const std::vector<double> b{-1.0, -0.3, 0.4, 0.4 + 1e-3, 2.0};
  const std::vector<double> d{0.5, 2.0, 0.0, 0.7};
  const ReferenceProfile p(b, d);
  const auto o = oracle::pieces(b, d);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, p.mass());
  for (int k = 0; k < 200; ++k) {
    const double zeta = u(rng);
    EXPECT_NEAR(p.pseudo_inverse(zeta), oracle::quantile(o, zeta), 1e-12) << zeta;
    const double x = -1.5 + 4.0 * (zeta / p.mass());
    EXPECT_NEAR(p.cdf(x), oracle::cdf(o, x), 1e-14);
  }
}

TEST(ReferenceProfile, ConvolutionsMatchAdaptiveQuadrature) {
  const std::vector<double> b{0.0, 1.0, 1.5};
  const std::vector<double> d{1.0, 3.0};
  const ReferenceProfile p(b, d);
  const auto o = oracle::pieces(b, d);
  for (double s : {-0.5, 0.3, 1.0, 1.7}) {
    for (double x : {-0.7, 0.2, 1.0, 1.2, 2.4}) {
      EXPECT_NEAR(p.abs_power_convolution(s, x), oracle::abs_power_integral(o, s, x), 1e-9) << s << " " << x;
    }
  }
  EXPECT_NEAR(p.absolute_moment(1.0), oracle::abs_power_integral(o, 1.0, 0.0), 1e-12);
  EXPECT_NEAR(p.first_moment(), 0.5 + 3.0 * (1.5 * 1.5 - 1.0) / 2.0, 1e-14);
}

TEST(MassQuadrature, ValidatesWeights) {
  EXPECT_THROW(MassQuadrature({0.5}, {0.9}, 1.0), InputError);
  EXPECT_THROW(MassQuadrature({0.5, 0.4}, {0.5, 0.5}, 1.0), InputError);
  EXPECT_THROW(MassQuadrature({1.5}, {1.0}, 1.0), InputError);
  const MassQuadrature q = MassQuadrature::midpoint(2.0, 4);
  EXPECT_DOUBLE_EQ(q.nodes()[0], 0.25);
  EXPECT_DOUBLE_EQ(q.weights()[3], 0.5);
}

TEST(Wasserstein, Examples) {
  const InverseCDF a = InverseCDF::uniform(0.0, 1.0, 100);
  const InverseCDF b = InverseCDF::from_function(100, [](double z) { return z + 0.3; });
  EXPECT_NEAR(wasserstein(a, b, 2.0), 0.3, 1e-14);
  EXPECT_NEAR(wasserstein(a, b, 1.5), 0.3, 1e-14);
  EXPECT_EQ(wasserstein(a, a, 3.0), 0.0);
  const InverseCDF c = InverseCDF::from_function(1000, [](double z) { return z; });
  const InverseCDF e = InverseCDF::from_function(1000, [](double z) { return 2.0 * z; });
  EXPECT_NEAR(wasserstein(c, e, 2.0), 1.0 / std::sqrt(3.0), 1e-3);
  EXPECT_NEAR(wasserstein(c, e, INFINITY), 0.9995, 1e-12);
  EXPECT_THROW(wasserstein(a, c, 2.0), ShapeError);
  EXPECT_THROW(wasserstein(a, b, 0.5), DomainError);
  EXPECT_NEAR(wasserstein_to_point(a, 0.5, 2.0), std::sqrt(1.0 / 12.0), 1e-4);
}

TEST(Moment, Examples) {
  EXPECT_EQ(moment(InverseCDF(std::vector<double>(10, 0.0)), 1.3), 0.0);
  EXPECT_NEAR(moment(InverseCDF::from_function(1000, [](double z) { return z; }), 2.0), 1.0 / 3.0, 1e-4);
  EXPECT_NEAR(moment(InverseCDF(std::vector<double>(5, -2.5)), 1.0), 2.5, 1e-15);
  EXPECT_THROW(moment(InverseCDF({1.0}), 0.0), DomainError);
}

TEST(ConvolveKernel, Examples) {
  const ReferenceProfile p = ReferenceProfile::uniform(0.0, 1.0, 1.0);
  const MassQuadrature q = MassQuadrature::midpoint(1.0, 200);
  EXPECT_NEAR(convolve_kernel(p, q, [](double) { return 1.0; }, 3.0), 1.0, 1e-14);
  EXPECT_NEAR(convolve_kernel(p, q, [](double u) { return u; }, 1.0), 0.5, 1e-12);
  EXPECT_NEAR(convolve_kernel(p, q, [](double u) { return u * u * u; }, 0.5), 0.0, 1e-10);
  const SampledProfile s(p, 200);
  EXPECT_NEAR(convolve_kernel(s, [](double u) { return u; }, 1.0), 0.5, 1e-12);
}

TEST(WindowedMass, CountsNodes) {
  const InverseCDF X = InverseCDF::uniform(0.0, 1.0, 10);
  EXPECT_DOUBLE_EQ(windowed_mass(X, 0.0, 0.5), 0.5);
  EXPECT_DOUBLE_EQ(windowed_mass(X, 2.0, 3.0), 0.0);
}

TEST(SampleNormalized, IsTheNormalizedQuantile) {
  const ReferenceProfile p = ReferenceProfile::uniform(0.0, 1.0, 2.0);
  const InverseCDF X = sample_normalized(p, 8);
  for (std::size_t i = 0; i < X.size(); ++i) EXPECT_NEAR(X[i], X.z(i), 1e-15);
}
