#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "matterwave/envelope.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace matterwave;

namespace {

const auto ctx = PhysicalContext::natural(-1.0, 100.0);
const auto carrier = CarrierState::from_wavenumber(ctx, 5.0);

SampledEnvelope phase_shifted(const SampledEnvelope& env, double phi, double scale = 1.0) {
  std::vector<Complex> v(env.values().begin(), env.values().end());
  for (auto& x : v) x *= std::polar(scale, phi);
  return env.evolved(std::move(v), 0.0, 0.0);
}

}  // namespace

TEST(MakeGaussian, VarianceAndNorm) {
  const Grid g(4096, 256.0);
  const auto env = make_gaussian(g, carrier, 0.0, 1.0);
  EXPECT_NEAR(norm(env), 1.0, 1e-12);
  EXPECT_NEAR(variance(env), 1.0, 0.005);
  EXPECT_NEAR(centroid(env), 0.0, 1e-12);
}

TEST(MakeGaussian, CentroidFollowsCenter) {
  const Grid g(4096, 256.0);
  EXPECT_NEAR(centroid(make_gaussian(g, carrier, 3.0, 1.0)), 3.0, 0.005);
}

TEST(MakeGaussian, ChirpedBandwidthMatchesClosedForm) {
  const Grid g(4096, 64.0);
  const double sigma = 0.5, beta = 0.8;
  const auto env = make_gaussian(g, carrier, 0.0, sigma, beta);
  EXPECT_NEAR(spectral_rms_width(env), oracle::chirped_gaussian_k_rms(sigma, beta), 1e-9);
  EXPECT_NEAR(oracle::chirped_gaussian_k_rms(sigma, beta), std::sqrt(1.64), 1e-15);
}

TEST(MakeGaussian, Guards) {
  const Grid g(1024, 256.0);  // step 0.25
  EXPECT_THROW(make_gaussian(g, carrier, 0.0, 0.9), SamplingError);
  EXPECT_NO_THROW(make_gaussian(g, carrier, 0.0, 1.1));
  EXPECT_THROW(make_gaussian(g, carrier, 60.0, 2.0), SupportError);
  EXPECT_THROW(make_gaussian(g, carrier, 0.0, -1.0), InvalidArgument);
}

TEST(AsymmetricPair, SkewnessMatchesQuadratureOracle) {
  const Grid g(8192, 256.0);
  const auto env = make_asymmetric_pair(g, carrier, 6.0, 1.0, 0.5);
  const oracle::TwoHumpDensity density{6.0, 1.0, 0.5};
  EXPECT_NEAR(skewness(env), density.skewness(), 1e-6);
  EXPECT_GT(skewness(env), 0.0);  // the larger hump sits at -sep/2
  EXPECT_NEAR(central_moment(env, 2), density.central_moment(2), 1e-6);
  EXPECT_NEAR(central_moment(env, 3), density.central_moment(3), 1e-6);
  EXPECT_NEAR(central_moment(env, 4), density.central_moment(4), 1e-6);
  EXPECT_NEAR(centroid(env), density.mean(), 1e-6);
}

TEST(AsymmetricPair, SymmetricCaseHasZeroSkew) {
  const Grid g(4096, 256.0);
  EXPECT_NEAR(skewness(make_asymmetric_pair(g, carrier, 6.0, 1.0, 1.0)), 0.0, 1e-10);
}

TEST(AsymmetricPair, Guards) {
  const Grid g(4096, 256.0);
  EXPECT_THROW(make_asymmetric_pair(g, carrier, 2.5, 1.0, 0.5), InvalidArgument);
  EXPECT_THROW(make_asymmetric_pair(g, carrier, 6.0, 1.0, 0.0), InvalidArgument);
  EXPECT_THROW(make_asymmetric_pair(g, carrier, 6.0, 1.0, 1.5), InvalidArgument);
  EXPECT_THROW(make_asymmetric_pair(g, carrier, 120.0, 1.0, 0.5), SupportError);
}

TEST(Metrics, SecondMomentOfWideGaussian) {
  const Grid g(4096, 256.0);
  EXPECT_NEAR(central_moment(make_gaussian(g, carrier, 0.0, 2.0), 2), 4.0, 4.0 * 0.005);
}

TEST(Metrics, RejectsNonFiniteSamples) {
  const Grid g(8, 8.0);
  std::vector<Complex> v(8, Complex(1.0, 0.0));
  v[3] = Complex(std::nan(""), 0.0);
  EXPECT_THROW(SampledEnvelope(g, v, carrier), InvalidArgument);
  v[3] = Complex(0.0, INFINITY);
  EXPECT_THROW(SampledEnvelope(g, v, carrier), InvalidArgument);
}

TEST(Fidelity, GlobalPhaseInvariance) {
  const Grid g(4096, 256.0);
  const auto env = make_asymmetric_pair(g, carrier, 6.0, 1.0, 0.5);
  for (double phi : {0.3, 1.0, -2.5, std::numbers::pi})
    EXPECT_NEAR(fidelity(env, phase_shifted(env, phi)), 1.0, 1e-12);
}

TEST(Fidelity, DisjointSupport) {
  const Grid g(4096, 256.0);
  EXPECT_LT(fidelity(make_gaussian(g, carrier, -5.0, 1.0), make_gaussian(g, carrier, 5.0, 1.0)), 1e-6);
}

TEST(Fidelity, GaussianWidthMismatchMatchesOverlapIntegral) {
  // |<a|b>|^2 = 2 s1 s2 / (s1^2 + s2^2) = 0.8; the unsquared overlap is 0.8944.
  const Grid g(4096, 256.0);
  const double f = fidelity(make_gaussian(g, carrier, 0.0, 1.0), make_gaussian(g, carrier, 0.0, 2.0));
  EXPECT_NEAR(f, oracle::gaussian_overlap_squared(1.0, 2.0), 1e-3);
  EXPECT_NEAR(std::sqrt(f), 0.8944, 1e-3);
}

TEST(Fidelity, SymmetricAndScaleInvariantProperty) {
  const Grid g(2048, 128.0);
  gen::for_all(21, 50, [&](gen::Source& s, int i) {
    const auto a = make_gaussian(g, carrier, s.uniform(-5, 5), s.uniform(0.5, 3.0), s.uniform(-0.3, 0.3));
    const auto b = make_asymmetric_pair(g, carrier, s.uniform(4.0, 10.0), s.uniform(0.5, 1.2), s.uniform(0.1, 1.0));
    const double f = fidelity(a, b);
    ASSERT_NEAR(f, fidelity(b, a), 1e-14) << gen::label(21, i);
    ASSERT_NEAR(f, fidelity(phase_shifted(a, s.uniform(-3, 3), s.uniform(0.1, 10.0)), b), 1e-12) << gen::label(21, i);
    ASSERT_GE(f, 0.0);
    ASSERT_LE(f, 1.0);
  });
}

TEST(Fidelity, RejectsGridMismatch) {
  const auto a = make_gaussian(Grid(1024, 128.0), carrier, 0.0, 1.0);
  const auto b = make_gaussian(Grid(2048, 128.0), carrier, 0.0, 1.0);
  EXPECT_THROW(fidelity(a, b), InvalidArgument);
}

TEST(Spectrum, ParsevalProperty) {
  gen::for_all(22, 60, [&](gen::Source& s, int i) {
    const Grid g(1u << s.integer(8, 13), s.uniform(64.0, 512.0));
    const double sigma = s.uniform(5.0, 8.0) * g.xi_step();
    const auto env = s.coin() ? make_gaussian(g, carrier, s.uniform(-4, 4), sigma, s.uniform(-0.5, 0.5) / (sigma * sigma))
                              : make_asymmetric_pair(g, carrier, 5.0 * sigma, sigma, s.uniform(0.2, 1.0));
    ASSERT_NEAR(spectral_norm(env), norm(env), 1e-12) << gen::label(22, i);
  });
}

TEST(Spectrum, BandEdgeEnclosesRequestedMass) {
  const Grid g(4096, 256.0);
  const auto env = make_gaussian(g, carrier, 0.0, 1.0);
  // |psi~|^2 ~ exp(-2 k^2): tail beyond K is erfc(sqrt(2) K).
  const double K = spectral_band_edge(env, 1e-8);
  EXPECT_LT(std::erfc(std::sqrt(2.0) * (K + g.k_step())), 1e-8);
  EXPECT_GT(std::erfc(std::sqrt(2.0) * (K - 2.0 * g.k_step())), 1e-8);
}

TEST(Rescale, UnitIsIdentity) {
  const Grid g(4096, 256.0);
  const auto env = make_asymmetric_pair(g, carrier, 6.0, 1.0, 0.5);
  const auto out = rescale(env, 1.0);
  for (std::size_t j = 0; j < g.size(); ++j) ASSERT_LT(std::abs(out.values()[j] - env.values()[j]), 1e-12);
}

TEST(Rescale, MinusOneMirrors) {
  const Grid g(4096, 256.0);
  const auto env = make_asymmetric_pair(g, carrier, 6.0, 1.0, 0.5);
  const auto out = rescale(env, -1.0);
  EXPECT_NEAR(skewness(out), -skewness(env), 1e-12);
  EXPECT_NEAR(norm(out), 1.0, 1e-12);
}

TEST(Rescale, MomentScalingForMinusTwo) {
  const Grid g(4096, 256.0);
  const auto env = make_asymmetric_pair(g, carrier, 6.0, 1.0, 0.5);
  const auto out = rescale(env, -2.0);
  const oracle::TwoHumpDensity density{6.0, 1.0, 0.5};
  EXPECT_NEAR(variance(out), 4.0 * density.central_moment(2), 1e-6);
  EXPECT_NEAR(central_moment(out, 3), -8.0 * density.central_moment(3), 1e-5);
  EXPECT_NEAR(skewness(out), -density.skewness(), 1e-6);
  EXPECT_NEAR(norm(out), 1.0, 1e-9);
}

TEST(Rescale, MatchesDirectEvaluationOfStretchedGaussian) {
  const Grid g(2048, 128.0);
  const auto env = make_gaussian(g, carrier, 1.0, 1.5, 0.2);
  const double M = 2.7;
  const auto out = rescale(env, M);
  const auto direct = make_gaussian(g, carrier, M * 1.0, M * 1.5, 0.2 / (M * M));
  EXPECT_NEAR(fidelity(out, direct), 1.0, 1e-12);
}

TEST(Rescale, RoundTripProperty) {
  const Grid g(4096, 256.0);
  gen::for_all(23, 40, [&](gen::Source& s, int i) {
    const double M = s.sign() * s.log_uniform(0.25, 4.0);
    const double sigma = s.uniform(0.8, 1.5);
    const auto env = make_asymmetric_pair(g, carrier, s.uniform(3.2, 6.0) * sigma, sigma, s.uniform(0.2, 1.0));
    const auto back = rescale(rescale(env, M), 1.0 / M);
    ASSERT_GE(fidelity(back, env), 1.0 - 1e-9) << gen::label(23, i) << " M=" << M;
    ASSERT_NEAR(norm(rescale(env, M)), 1.0, 1e-9) << gen::label(23, i) << " M=" << M;
  });
}

TEST(Rescale, Guards) {
  const Grid g(1024, 64.0);
  const auto env = make_gaussian(g, carrier, 0.0, 1.0);
  EXPECT_THROW(rescale(env, 0.0), InvalidArgument);
  EXPECT_THROW(rescale(env, 16.0), SupportError);
  const auto coarse = make_gaussian(Grid(256, 64.0), carrier, 0.0, 1.5);
  EXPECT_THROW(rescale(coarse, 0.1), SamplingError);
}

TEST(Fwhm, GaussianWidth) {
  const Grid g(8192, 256.0);
  const double sigma = 2.0;
  EXPECT_NEAR(fwhm(make_gaussian(g, carrier, 0.0, sigma)), 2.0 * std::sqrt(2.0 * std::log(2.0)) * sigma, 1e-4);
}
