#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "matterwave/imaging.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace matterwave;

namespace {

constexpr double pi = std::numbers::pi;

// Natural units with k0 = v_g = 5 and a velocity-matched lens at k_m = 1:
// f = k0 / (Gamma0 k_m^2) = 5 / Gamma0, and a = L1 / 2k0.
const auto ctx = PhysicalContext::natural(-1.0, 100.0);
const auto carrier = CarrierState::from_wavenumber(ctx, 5.0);

LensSpec lens_with_gamma(double gamma0, double k_m = 1.0) {
  // Gamma0 = E0 L / omega_m with L = 10, omega_m = 5 k_m.
  return build_lens(gamma0 * 5.0 * k_m / 10.0, 5.0 * k_m, SlowFactor{20.0}, 10.0, ctx, carrier);
}

/// Lens giving input coefficient `a` at magnification M.
LensSpec lens_for(double a, double M) {
  const double L1 = 2.0 * carrier.k0() * a;
  const double f = L1 / (1.0 - 1.0 / M);
  return lens_with_gamma(carrier.k0() / f);
}

ImagingDesign design_for(const LensSpec& spec, double M) {
  return design_for_magnification(M, lens_design(spec)->focal_length, ctx, carrier);
}

}  // namespace

TEST(SolveImaging, ThinLensExamples) {
  const auto d = solve_imaging(2.0, 1.0, ctx, carrier);
  EXPECT_NEAR(d.L2, 2.0, 1e-14);
  EXPECT_NEAR(d.magnification, -1.0, 1e-14);
  EXPECT_NEAR(solve_imaging(3.0, 1.0, ctx, carrier).L2, 1.5, 1e-14);
  EXPECT_NEAR(solve_imaging(3.0, 1.0, ctx, carrier).magnification, -0.5, 1e-14);
  EXPECT_NEAR(solve_imaging(1.25, 1.0, ctx, carrier).L2, 5.0, 1e-13);
  EXPECT_NEAR(solve_imaging(1.25, 1.0, ctx, carrier).magnification, -4.0, 1e-13);
  EXPECT_DOUBLE_EQ(d.coeff_a, d.L1 / (2.0 * carrier.k0()));
  EXPECT_DOUBLE_EQ(d.coeff_c, 1.0 / (2.0 * carrier.k0()));
  EXPECT_DOUBLE_EQ(d.tau1, d.L1 / carrier.v_group());
}

TEST(SolveImaging, Rejections) {
  EXPECT_THROW(solve_imaging(1.0, 1.0, ctx, carrier), InvalidArgument);
  EXPECT_THROW(solve_imaging(1.0, std::numeric_limits<double>::infinity(), ctx, carrier), InvalidArgument);
  EXPECT_THROW(solve_imaging(1.0, 0.0, ctx, carrier), InvalidArgument);
  EXPECT_THROW(solve_imaging(-1.0, 1.0, ctx, carrier), InvalidArgument);
  EXPECT_THROW(design_for_magnification(0.0, 1.0, ctx, carrier), InvalidArgument);
  EXPECT_THROW(design_from_times(0.0, 1.0, 1.0, ctx, carrier), InvalidArgument);
}

TEST(SolveImaging, VirtualImageIsFlagged) {
  const auto d = solve_imaging(0.5, 1.0, ctx, carrier);
  EXPECT_TRUE(d.virtual_image);
  EXPECT_LT(d.L2, 0.0);
  EXPECT_GT(d.magnification, 0.0);
}

TEST(SolveImaging, ImagingConditionProperty) {
  gen::for_all(51, 300, [&](gen::Source& s, int i) {
    const double f = s.log_uniform(1e-3, 1e3);
    const double M = -s.log_uniform(0.1, 10.0);
    const auto d = design_for_magnification(M, f, ctx, carrier);
    ASSERT_NEAR(imaging_residual(d), 0.0, 1e-12) << gen::label(51, i);
    ASSERT_NEAR(d.magnification / M, 1.0, 1e-12) << gen::label(51, i);
    ASSERT_NEAR(d.L2 / (d.L1 * std::abs(M)), 1.0, 1e-12) << gen::label(51, i);
    ASSERT_FALSE(d.virtual_image);
  });
}

TEST(SolveImaging, ResidualIsNonzeroOffFocus) {
  const auto d = design_from_times(1.0, 1.0, 1.0, ctx, carrier);  // L1 = L2 = 5 with f = 1
  EXPECT_NEAR(imaging_residual(d), 1.0 - 2.0 / 5.0, 1e-14);
}

TEST(Pipeline, UnitMagnificationReproducesInput) {
  const Grid g(32768, 6400.0);
  const auto spec = lens_for(256.0, -1.0);
  const auto d = design_for(spec, -1.0);
  const auto env0 = make_asymmetric_pair(g, carrier, 3.5, 1.0, 0.5);
  const auto out = run_pipeline(env0, d, spec, ctx);
  EXPECT_GE(fidelity(out, image_reference(env0, d)), 1.0 - 1e-10);
  EXPECT_GE(fidelity(out, rescale(env0, -1.0)), 0.9999);
}

class LiteralImaging : public ::testing::TestWithParam<double> {};

TEST_P(LiteralImaging, MatchesStretchedInputAtHighFresnelNumber) {
  const double M = GetParam();
  const Grid g(32768, 6400.0);
  const auto spec = lens_for(256.0, M);
  const auto d = design_for(spec, M);
  for (const auto& env0 : {make_gaussian(g, carrier, 0.0, 1.0), make_asymmetric_pair(g, carrier, 3.5, 1.0, 0.5)}) {
    const auto out = run_pipeline(env0, d, spec, ctx);
    EXPECT_TRUE(out.warnings().empty());
    EXPECT_GE(fidelity(out, rescale(env0, M)), 0.999) << "M=" << M;
    EXPECT_GE(fidelity(out, image_reference(env0, d)), 1.0 - 1e-10) << "M=" << M;
  }
}

INSTANTIATE_TEST_SUITE_P(Magnifications, LiteralImaging, ::testing::Values(-0.5, -1.0, -2.0, -4.0));

TEST(Pipeline, CurvatureCorrectedImageProperty) {
  const Grid g(8192, 1024.0);
  gen::for_all(52, 24, [&](gen::Source& s, int i) {
    const double M = -s.log_uniform(0.5, 3.0);
    const auto spec = lens_for(s.uniform(5.0, 40.0), M);
    const auto d = design_for(spec, M);
    const double sigma = s.uniform(1.0, 2.0);
    const auto env0 = s.coin() ? make_gaussian(g, carrier, s.uniform(-3.0, 3.0), sigma, s.uniform(-0.1, 0.1))
                               : make_asymmetric_pair(g, carrier, s.uniform(3.2, 5.0) * sigma, sigma, s.uniform(0.2, 1.0));
    const auto out = run_pipeline(env0, d, spec, ctx);
    ASSERT_GE(fidelity(out, image_reference(env0, d)), 1.0 - 1e-9) << gen::label(52, i) << " M=" << M;
    ASSERT_NEAR(norm(out), 1.0, 1e-12) << gen::label(52, i);
  });
}

TEST(Pipeline, EstimatedMagnificationFromMoments) {
  const Grid g(16384, 2048.0);
  for (double M : {-0.5, -2.0, -3.0}) {
    const auto spec = lens_for(64.0, M);
    const auto d = design_for(spec, M);
    const auto env0 = make_asymmetric_pair(g, carrier, 3.5, 1.0, 0.5);
    const auto est = estimate_magnification(env0, run_pipeline(env0, d, spec, ctx));
    ASSERT_TRUE(est.sign.has_value());
    EXPECT_EQ(*est.sign, -1);
    EXPECT_NEAR(est.value() / M, 1.0, 0.02) << "M=" << M;
  }
  const auto symmetric = make_gaussian(g, carrier, 0.0, 1.0);
  EXPECT_FALSE(estimate_magnification(symmetric, symmetric).sign.has_value());
}

TEST(Pipeline, TimeReversalRecoversInput) {
  const Grid g(8192, 1024.0);
  const double M = -2.0;
  const auto spec = lens_for(30.0, M);
  const auto d = design_for(spec, M);
  const auto env0 = make_asymmetric_pair(g, carrier, 4.0, 1.0, 0.3);
  const auto out = run_pipeline(env0, d, spec, ctx);
  const auto undo_lens = build_lens(spec.E0(), spec.omega_m(), SlowFactor{20.0}, spec.L(), ctx, carrier, spec.theta() + pi);
  auto back = propagate(out, DispersionSegment::from_time(ctx, carrier, -d.tau2, true), ctx);
  back = apply_lens(back, undo_lens);
  back = propagate(back, DispersionSegment::from_time(ctx, carrier, -d.tau1, true), ctx);
  double worst = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) worst = std::max(worst, std::abs(back.values()[j] - env0.values()[j]));
  EXPECT_LT(worst, 1e-10);
  EXPECT_NEAR(back.elapsed_time(), 0.0, 1e-9);
}

TEST(Pipeline, RemovingTheLensLeavesOneFlight) {
  const Grid g(4096, 512.0);
  const auto env0 = make_gaussian(g, carrier, 0.0, 1.0);
  const auto flat = lens_with_gamma(0.0);
  auto two = propagate(env0, DispersionSegment::from_time(ctx, carrier, 4.0), ctx);
  two = apply_lens(two, flat, {LensMode::full_cosine});
  two = propagate(two, DispersionSegment::from_time(ctx, carrier, 6.0), ctx);
  const auto one = propagate(env0, DispersionSegment::from_time(ctx, carrier, 10.0), ctx);
  EXPECT_GE(fidelity(one, two), 1.0 - 1e-12);
  const auto d = design_from_times(4.0, 6.0, 1.0, ctx, carrier);
  EXPECT_THROW(run_pipeline(env0, d, flat, ctx), InvalidArgument);
}

TEST(Pipeline, ClockAndPhaseBookkeeping) {
  const Grid g(8192, 1024.0);
  const auto spec = lens_for(20.0, -2.0);
  const auto d = design_for(spec, -2.0);
  const auto env0 = make_gaussian(g, carrier, 0.0, 1.0);
  const auto out = run_pipeline(env0, d, spec, ctx);
  EXPECT_NEAR(out.elapsed_time(), d.tau1 + d.tau2, 1e-12);
  const double tl = spec.transit_time();
  const auto with_transit = run_pipeline(env0, d, spec, ctx, {LensMode::quadratic, Aperture::none(), tl});
  EXPECT_NEAR(with_transit.elapsed_time(), d.tau1 + d.tau2 + tl, 1e-12);
  EXPECT_NEAR(with_transit.global_phase(), carrier.omega0() * (d.tau1 + d.tau2 + tl) + spec.Gamma0(), 1e-9);
  for (std::size_t j = 0; j < g.size(); ++j) ASSERT_EQ(with_transit.values()[j], out.values()[j]);
}

TEST(Pipeline, Rejections) {
  const Grid g(4096, 512.0);
  const auto spec = lens_for(20.0, -2.0);
  const auto env0 = make_gaussian(g, carrier, 0.0, 1.0);
  const double f = lens_design(spec)->focal_length;
  EXPECT_THROW(run_pipeline(env0, design_for_magnification(-2.0, 1.1 * f, ctx, carrier), spec, ctx), InvalidArgument);
  EXPECT_THROW(run_pipeline(env0, solve_imaging(0.5 * f, f, ctx, carrier), spec, ctx), InvalidArgument);
  const auto other = CarrierState::from_wavenumber(ctx, 4.0);
  EXPECT_THROW(run_pipeline(make_gaussian(g, other, 0.0, 1.0), design_for(spec, -2.0), spec, ctx), InvalidArgument);
}

TEST(Resolution, UnaperturedBlurEqualsProbe) {
  const Grid g(32768, 200.0);
  const auto spec = lens_with_gamma(8.0);
  const auto d = design_for(spec, -4.0);
  const double probe = lens_design(spec)->resolution_input_scale / 20.0;
  const auto r = resolution_experiment(g, d, spec, ctx, probe, Aperture::none());
  EXPECT_NEAR(r.input_referred_blur / r.probe_fwhm, 1.0, 0.05);
}

TEST(Resolution, DefaultApertureTracksDiffractionLimit) {
  const Grid g(32768, 200.0);
  const auto spec = lens_with_gamma(8.0);
  const auto d = design_for(spec, -4.0);
  const double probe = lens_design(spec)->resolution_input_scale / 20.0;
  const auto r = resolution_experiment(g, d, spec, ctx, probe, Aperture::lens_default(spec));
  EXPECT_GT(r.ratio, 0.5);
  EXPECT_LT(r.ratio, 2.0);
  EXPECT_NEAR(r.predicted, carrier.lambda0() * std::abs(lens_design(spec)->f_number), 1e-12);
  // Hard-edged slit: Fraunhofer blur 2 * 1.39156 * 4a / D.
  EXPECT_NEAR(r.input_referred_blur / oracle::rect_aperture_blur(d.coeff_a, 1.0 / spec.k_m()), 1.0, 0.05);
}

TEST(Resolution, HalvingApertureDoublesBlur) {
  const Grid g(32768, 200.0);
  const auto spec = lens_with_gamma(8.0);
  const auto d = design_for(spec, -4.0);
  const double probe = lens_design(spec)->resolution_input_scale / 20.0;
  const auto full = resolution_experiment(g, d, spec, ctx, probe, Aperture::hard(1.0));
  const auto half = resolution_experiment(g, d, spec, ctx, probe, Aperture::hard(0.5));
  EXPECT_NEAR(half.input_referred_blur / full.input_referred_blur, 2.0, 0.2);
}

TEST(Resolution, RejectsWideProbe) {
  const Grid g(16384, 100.0);
  const auto spec = lens_with_gamma(8.0);
  const auto d = design_for(spec, -4.0);
  EXPECT_THROW(resolution_experiment(g, d, spec, ctx, lens_design(spec)->resolution_input_scale, Aperture::none()),
               InvalidArgument);
}

TEST(Aberration, FidelityFallsWithLensWidth) {
  const Grid g(32768, 128.0);
  const auto spec = lens_with_gamma(150.0);
  const auto d = design_for(spec, -4.0);
  std::vector<double> widths;
  for (int i = 1; i <= 10; ++i) widths.push_back(input_width_for_lens_width(d, 0.1 * i));
  const auto rows = aberration_sweep(g, d, spec, ctx, widths);
  ASSERT_EQ(rows.size(), 10u);
  for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_NEAR(rows[i].lens_width, 0.1 * (i + 1), 1e-6);
  EXPECT_GT(rows.front().fidelity, 0.9999);
  EXPECT_LT(rows.back().fidelity, 0.5);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LE(rows[i].fidelity, rows[i - 1].fidelity + 1e-12);
}

TEST(Aberration, LensWidthInversion) {
  const auto d = design_for(lens_with_gamma(150.0), -4.0);
  const double s = input_width_for_lens_width(d, 0.5);
  EXPECT_NEAR(std::sqrt(s * s + d.coeff_a * d.coeff_a / (s * s)), 0.5, 1e-14);
  EXPECT_GE(s * s, d.coeff_a);
  EXPECT_THROW(input_width_for_lens_width(d, 0.5 * std::sqrt(2.0 * d.coeff_a)), InvalidArgument);
}
