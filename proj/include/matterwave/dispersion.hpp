#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "matterwave/carrier.hpp"
#include "matterwave/envelope.hpp"
#include "matterwave/errors.hpp"
#include "matterwave/fft.hpp"
#include "matterwave/grid.hpp"
#include "matterwave/units.hpp"

namespace matterwave {

/// Free flight of duration tau in the co-moving frame. The envelope spectrum
/// picks up exp(-i coeff k^2) with coeff = hbar tau / 2m.
class DispersionSegment {
 public:
  static DispersionSegment from_time(const PhysicalContext& ctx, const CarrierState& carrier, double tau,
                                     bool allow_backward = false) {
    return DispersionSegment(tau, ctx.diffusivity(), carrier.v_group(), allow_backward);
  }

  static DispersionSegment from_length(const PhysicalContext& ctx, const CarrierState& carrier, double length,
                                       bool allow_backward = false) {
    return from_time(ctx, carrier, length / carrier.v_group(), allow_backward);
  }

  double tau() const { return tau_; }
  double length() const { return v_group_ * tau_; }
  double coeff() const { return diffusivity_ * tau_; }
  double diffusivity() const { return diffusivity_; }
  double v_group() const { return v_group_; }
  bool allow_backward() const { return allow_backward_; }

  friend DispersionSegment compose_check(const DispersionSegment& first, const DispersionSegment& second);

 private:
  DispersionSegment(double tau, double diffusivity, double v_group, bool allow_backward)
      : tau_(tau), diffusivity_(diffusivity), v_group_(v_group), allow_backward_(allow_backward) {
    if (!std::isfinite(tau_)) throw InvalidArgument("propagation time must be finite");
    if (tau_ < 0.0 && !allow_backward_) throw InvalidArgument("negative propagation time requires allow_backward");
  }

  double tau_;
  double diffusivity_;
  double v_group_;
  bool allow_backward_;
};

/// Two consecutive flights of the same particle are one flight of the summed time.
inline DispersionSegment compose_check(const DispersionSegment& first, const DispersionSegment& second) {
  if (first.diffusivity_ != second.diffusivity_ || first.v_group_ != second.v_group_)
    throw InvalidArgument("cannot compose segments of different particles or carriers");
  return DispersionSegment(first.tau_ + second.tau_, first.diffusivity_, first.v_group_,
                           first.allow_backward_ || second.allow_backward_);
}

/// What a numerical guard does when it trips.
enum class GuardPolicy { reject, warn };

struct PropagateOptions {
  GuardPolicy sampling = GuardPolicy::reject;
};

/// Applies exp(-i coeff k^2) to the baseband spectrum.
///
/// The quadratic phase must be resolved on the k grid: between neighbouring
/// bins inside the occupied band it may advance by less than pi. The band edge
/// is where all but `guard::tail_mass` of the spectral mass lies inside.
inline SampledEnvelope propagate(const SampledEnvelope& env, const DispersionSegment& seg,
                                 const PhysicalContext& ctx, PropagateOptions options = {}) {
  if (std::abs(seg.diffusivity() - ctx.diffusivity()) > 1e-12 * ctx.diffusivity())
    throw InvalidArgument("segment was built for a different particle");
  const double phase_step = env.carrier().omega0() * seg.tau();
  const double coeff = seg.coeff();
  if (coeff == 0.0) return env.evolved(std::vector<Complex>(env.values().begin(), env.values().end()), phase_step, seg.tau());

  const Grid& grid = env.grid();
  auto spec = fft::forward(env.values());
  auto result = env;

  const double band_edge = spectral_band_edge(spec, grid, guard::tail_mass);
  const double increment = 2.0 * std::abs(coeff) * band_edge * grid.k_step();
  if (!(increment < std::numbers::pi)) {
    const std::string message = "dispersion under-resolved: phase step " + std::to_string(increment) +
                                " rad between k samples at band edge " + std::to_string(band_edge);
    if (options.sampling == GuardPolicy::reject) throw SamplingError(message);
    result = result.with_warning(message);
  }

  double total = 0.0, near_nyquist = 0.0;
  for (std::size_t m = 0; m < spec.size(); ++m) {
    const double p = std::norm(spec[m]);
    total += p;
    if (std::abs(grid.k(m)) > 0.75 * grid.nyquist()) near_nyquist += p;
  }
  if (near_nyquist > guard::tail_mass * total)
    result = result.with_warning("dispersion: spectrum not band-limited, mass fraction " +
                                 std::to_string(near_nyquist / total) + " above 0.75 Nyquist");

  for (std::size_t m = 0; m < spec.size(); ++m) {
    const double k = grid.k(m);
    spec[m] *= std::polar(1.0, -coeff * k * k);
  }
  result = result.evolved(fft::inverse(spec), phase_step, seg.tau());
  return check_aliasing(std::move(result), "dispersion");
}

/// Closed-form freely spreading Gaussian, normalized on the grid:
/// psi = sqrt(s0^2 / (s0^2 + i a)) exp(-(xi - c)^2 / 4(s0^2 + i a)), a = hbar tau / 2m.
inline SampledEnvelope analytic_gaussian(const Grid& grid, const CarrierState& carrier, const PhysicalContext& ctx,
                                         double tau, double sigma0, double center = 0.0) {
  if (!(sigma0 > 0.0)) throw InvalidArgument("packet width must be positive");
  const double a = ctx.diffusivity() * tau;
  const double sigma_tau = sigma0 * std::sqrt(1.0 + (a * a) / (sigma0 * sigma0 * sigma0 * sigma0));
  if (!(std::abs(center) + 4.0 * sigma_tau < 0.25 * grid.span()))
    throw SupportError("analytic Gaussian leaves the central 50% of the window");
  const Complex width{sigma0 * sigma0, a};
  const Complex amplitude = std::sqrt(sigma0 * sigma0 / width);
  std::vector<Complex> values(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double x = grid.xi(j) - center;
    values[j] = amplitude * std::exp(-x * x / (4.0 * width));
  }
  return normalized(SampledEnvelope(grid, std::move(values), carrier, carrier.omega0() * tau, tau));
}

}  // namespace matterwave
