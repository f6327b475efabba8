#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "matterwave/carrier.hpp"
#include "matterwave/dispersion.hpp"
#include "matterwave/envelope.hpp"
#include "matterwave/errors.hpp"
#include "matterwave/lens.hpp"
#include "matterwave/units.hpp"

namespace matterwave {

/// Dispersion (L1) -> lens (f) -> dispersion (L2). The coefficients
/// a = L1/2k0, b = L2/2k0, c = f/2k0 are the quadratic-phase constants of the
/// two flights and of the lens.
struct ImagingDesign {
  double L1 = 0.0;
  double L2 = 0.0;
  double tau1 = 0.0;
  double tau2 = 0.0;
  double focal_length = 0.0;
  double magnification = 0.0;
  double coeff_a = 0.0;
  double coeff_b = 0.0;
  double coeff_c = 0.0;
  double k0 = 0.0;
  bool virtual_image = false;
};

namespace detail {

inline ImagingDesign make_design(double L1, double L2, double focal, const PhysicalContext& ctx,
                                 const CarrierState& carrier) {
  ImagingDesign d;
  d.L1 = L1;
  d.L2 = L2;
  d.tau1 = L1 / carrier.v_group();
  d.tau2 = L2 / carrier.v_group();
  d.focal_length = focal;
  d.magnification = -L2 / L1;
  d.coeff_a = ctx.diffusivity() * d.tau1;
  d.coeff_b = ctx.diffusivity() * d.tau2;
  d.coeff_c = focal / (2.0 * carrier.k0());
  d.k0 = carrier.k0();
  d.virtual_image = L2 < 0.0;
  return d;
}

inline void require_focal(double focal) {
  if (!std::isfinite(focal) || focal == 0.0)
    throw InvalidArgument("imaging needs a finite, nonzero focal length (no lens, no image)");
}

}  // namespace detail

/// Solves 1/L1 + 1/L2 = 1/f for L2. L2 < 0 yields a flagged virtual-image design.
inline ImagingDesign solve_imaging(double L1, double focal, const PhysicalContext& ctx, const CarrierState& carrier) {
  detail::require_focal(focal);
  if (!(L1 > 0.0) || !std::isfinite(L1)) throw InvalidArgument("input distance L1 must be positive");
  if (L1 == focal) throw InvalidArgument("image at infinity: L1 equals the focal length");
  const double L2 = 1.0 / (1.0 / focal - 1.0 / L1);
  return detail::make_design(L1, L2, focal, ctx, carrier);
}

/// Imaging design with the requested magnification: L1 = f (1 - 1/M).
inline ImagingDesign design_for_magnification(double magnification, double focal, const PhysicalContext& ctx,
                                              const CarrierState& carrier) {
  detail::require_focal(focal);
  if (magnification == 0.0 || !std::isfinite(magnification))
    throw InvalidArgument("magnification must be finite and nonzero");
  return solve_imaging(focal * (1.0 - 1.0 / magnification), focal, ctx, carrier);
}

/// Arbitrary flight times; the imaging condition is not enforced.
inline ImagingDesign design_from_times(double tau1, double tau2, double focal, const PhysicalContext& ctx,
                                       const CarrierState& carrier) {
  detail::require_focal(focal);
  if (!(tau1 > 0.0) || !std::isfinite(tau2)) throw InvalidArgument("flight times must be finite, tau1 > 0");
  return detail::make_design(carrier.v_group() * tau1, carrier.v_group() * tau2, focal, ctx, carrier);
}

/// (1/c - 1/b - 1/a) * c: zero when the quadratic phase of the chain cancels.
inline double imaging_residual(const ImagingDesign& d) {
  return (1.0 / d.coeff_c - 1.0 / d.coeff_b - 1.0 / d.coeff_a) * d.coeff_c;
}

/// Curvature kappa of the quadratic phase exp(i kappa xi^2) left on the image.
inline double image_plane_curvature(const ImagingDesign& d) {
  return (1.0 - 1.0 / d.magnification) / (4.0 * d.coeff_b);
}

/// The ideal image including its residual quadratic phase.
inline SampledEnvelope image_reference(const SampledEnvelope& env0, const ImagingDesign& d) {
  const auto scaled = rescale(env0, d.magnification);
  const double kappa = image_plane_curvature(d);
  std::vector<Complex> values(scaled.values().begin(), scaled.values().end());
  for (std::size_t j = 0; j < values.size(); ++j) {
    const double xi = scaled.grid().xi(j);
    values[j] *= std::polar(1.0, kappa * xi * xi);
  }
  return scaled.evolved(std::move(values), 0.0, 0.0);
}

struct PipelineOptions {
  LensMode mode = LensMode::quadratic;
  Aperture aperture = Aperture::none();
  /// Transit time through the structure. Only advances the clock and the
  /// carrier phase; no dispersion is applied inside the lens.
  double tau_lens = 0.0;
};

inline SampledEnvelope run_pipeline(const SampledEnvelope& env0, const ImagingDesign& design, const LensSpec& spec,
                                    const PhysicalContext& ctx, PipelineOptions options = {}) {
  const auto lens = lens_design(spec);
  if (!lens) throw InvalidArgument("lens imprints no focusing phase");
  if (std::abs(lens->focal_length - design.focal_length) > 1e-9 * std::abs(design.focal_length))
    throw InvalidArgument("lens focal length " + std::to_string(lens->focal_length) +
                          " does not match design focal length " + std::to_string(design.focal_length));
  if (std::abs(env0.carrier().k0() - design.k0) > 1e-12 * design.k0)
    throw InvalidArgument("design was solved for a different carrier");
  if (design.virtual_image) throw InvalidArgument("virtual image: the output flight time is negative");
  if (!(options.tau_lens >= 0.0)) throw InvalidArgument("lens transit time must be non-negative");

  const auto& carrier = env0.carrier();
  const auto first = DispersionSegment::from_time(ctx, carrier, design.tau1);
  const auto second = DispersionSegment::from_time(ctx, carrier, design.tau2);

  auto env = propagate(env0, first, ctx);
  env = apply_lens(env, spec, LensOptions{options.mode, options.aperture});
  if (options.tau_lens > 0.0)
    env = env.evolved(std::vector<Complex>(env.values().begin(), env.values().end()),
                      carrier.omega0() * options.tau_lens, options.tau_lens);
  // A hard-edged window is not band-limited; its tails are reported, not fatal.
  PropagateOptions out_opts;
  if (options.aperture.kind != Aperture::Kind::none) out_opts.sampling = GuardPolicy::warn;
  return propagate(env, second, ctx, out_opts);
}

struct MagnificationEstimate {
  double magnitude;
  std::optional<int> sign;  // empty when either skewness is too small to compare

  double value() const { return sign.value_or(1) * magnitude; }
};

/// |M| from the ratio of rms widths; the sign from whether skewness flips.
inline MagnificationEstimate estimate_magnification(const SampledEnvelope& in, const SampledEnvelope& out) {
  const double var_in = variance(in);
  if (!(var_in > 0.0)) throw InvalidArgument("input envelope has zero variance");
  MagnificationEstimate est{std::sqrt(variance(out) / var_in), std::nullopt};
  const double skew_in = skewness(in);
  const double skew_out = skewness(out);
  if (std::abs(skew_in) > 1e-6 && std::abs(skew_out) > 1e-6) est.sign = (skew_in * skew_out > 0.0) ? 1 : -1;
  return est;
}

struct ResolutionResult {
  double probe_fwhm;
  double output_fwhm;
  double input_referred_blur;  // output_fwhm / |M|
  double predicted;            // lambda0 * |f#|
  double ratio;                // input_referred_blur / predicted
};

/// Images a narrow Gaussian probe (rms width `probe_width`) and measures the
/// blur referred back to the input scale.
inline ResolutionResult resolution_experiment(const Grid& grid, const ImagingDesign& design, const LensSpec& spec,
                                              const PhysicalContext& ctx, double probe_width, Aperture aperture,
                                              LensMode mode = LensMode::quadratic) {
  const auto lens = lens_design(spec);
  if (!lens) throw InvalidArgument("lens imprints no focusing phase");
  const double predicted = lens->resolution_input_scale;
  const auto probe = make_gaussian(grid, spec.carrier(), 0.0, probe_width);
  const double probe_fwhm = fwhm(probe);
  if (probe_fwhm > 0.25 * predicted)
    throw InvalidArgument("probe not narrow enough: FWHM " + std::to_string(probe_fwhm) +
                          " exceeds a quarter of lambda0 f# = " + std::to_string(predicted));
  const auto out = run_pipeline(probe, design, spec, ctx, PipelineOptions{mode, aperture, 0.0});
  const double out_fwhm = fwhm(out);
  const double blur = out_fwhm / std::abs(design.magnification);
  return ResolutionResult{probe_fwhm, out_fwhm, blur, predicted, blur / predicted};
}

/// Input rms width whose near-field spread reaches `lens_width` after the
/// first flight: w^2 = s^2 + a^2 / s^2, taking the root s >= sqrt(a).
inline double input_width_for_lens_width(const ImagingDesign& design, double lens_width) {
  const double a = design.coeff_a;
  const double w2 = lens_width * lens_width;
  const double disc = w2 * w2 - 4.0 * a * a;
  if (disc < 0.0) throw InvalidArgument("lens width below the minimum reachable spread sqrt(2a)");
  return std::sqrt(0.5 * (w2 + std::sqrt(disc)));
}

struct AberrationRow {
  double input_width;
  double lens_width;  // rms width at the lens
  double fidelity;    // full cosine vs quadratic image
};

inline std::vector<AberrationRow> aberration_sweep(const Grid& grid, const ImagingDesign& design,
                                                   const LensSpec& spec, const PhysicalContext& ctx,
                                                   const std::vector<double>& widths) {
  std::vector<AberrationRow> rows;
  rows.reserve(widths.size());
  for (const double width : widths) {
    const auto env0 = make_gaussian(grid, spec.carrier(), 0.0, width);
    const auto at_lens = propagate(env0, DispersionSegment::from_time(ctx, spec.carrier(), design.tau1), ctx);
    const auto quad = run_pipeline(env0, design, spec, ctx, PipelineOptions{LensMode::quadratic});
    const auto full = run_pipeline(env0, design, spec, ctx, PipelineOptions{LensMode::full_cosine});
    rows.push_back({width, rms_width(at_lens), fidelity(quad, full)});
  }
  return rows;
}

}  // namespace matterwave
