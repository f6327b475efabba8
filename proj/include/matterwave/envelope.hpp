#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "matterwave/carrier.hpp"
#include "matterwave/errors.hpp"
#include "matterwave/fft.hpp"
#include "matterwave/grid.hpp"

namespace matterwave {

namespace guard {
/// Probability mass allowed outside the central half of the window (or beyond
/// a spectral band edge) before a guard reports.
inline constexpr double tail_mass = 1e-8;
/// Samples per standard deviation required by the packet factories.
inline constexpr double samples_per_sigma = 4.0;
/// Tail mass tolerated when rescale drops samples outside the window.
inline constexpr double rescale_tail_mass = 1e-10;
}  // namespace guard

/// Complex baseband envelope psi(xi) sampled on a Grid in the co-moving frame.
///
/// Carrier and constant phase factors are never folded into the samples; they
/// accumulate in `global_phase()`. Instances are immutable: operations return
/// new envelopes. Guard warnings raised along the way travel with the value.
class SampledEnvelope {
 public:
  SampledEnvelope(Grid grid, std::vector<Complex> values, CarrierState carrier, double global_phase = 0.0,
                  double elapsed_time = 0.0, std::vector<std::string> warnings = {})
      : grid_(grid),
        values_(std::move(values)),
        carrier_(carrier),
        global_phase_(global_phase),
        elapsed_time_(elapsed_time),
        warnings_(std::move(warnings)) {
    if (values_.size() != grid_.size()) throw InvalidArgument("envelope size does not match grid");
    for (const auto& v : values_)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw InvalidArgument("envelope contains non-finite samples");
  }

  const Grid& grid() const { return grid_; }
  std::span<const Complex> values() const { return values_; }
  const CarrierState& carrier() const { return carrier_; }
  double global_phase() const { return global_phase_; }
  double elapsed_time() const { return elapsed_time_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// Same bookkeeping, new samples, with phase and time advanced.
  SampledEnvelope evolved(std::vector<Complex> values, double phase_step, double time_step) const {
    return SampledEnvelope(grid_, std::move(values), carrier_, global_phase_ + phase_step,
                           elapsed_time_ + time_step, warnings_);
  }

  SampledEnvelope with_warning(std::string message) const {
    auto copy = *this;
    copy.warnings_.push_back(std::move(message));
    return copy;
  }

 private:
  Grid grid_;
  std::vector<Complex> values_;
  CarrierState carrier_;
  double global_phase_;
  double elapsed_time_;
  std::vector<std::string> warnings_;
};

// ---------------------------------------------------------------------------
// Metrics

inline double norm(const SampledEnvelope& env) {
  double sum = 0.0;
  for (const auto& v : env.values()) sum += std::norm(v);
  return sum * env.grid().xi_step();
}

inline double centroid(const SampledEnvelope& env) {
  double mass = 0.0, first = 0.0;
  const auto values = env.values();
  for (std::size_t j = 0; j < values.size(); ++j) {
    const double p = std::norm(values[j]);
    mass += p;
    first += p * env.grid().xi(j);
  }
  if (!(mass > 0.0)) throw InvalidArgument("centroid of an empty envelope");
  return first / mass;
}

/// Central moment of the probability density |psi|^2 / norm.
inline double central_moment(const SampledEnvelope& env, int order) {
  if (order < 0) throw InvalidArgument("moment order must be non-negative");
  const double mean = centroid(env);
  double mass = 0.0, moment = 0.0;
  const auto values = env.values();
  for (std::size_t j = 0; j < values.size(); ++j) {
    const double p = std::norm(values[j]);
    mass += p;
    moment += p * std::pow(env.grid().xi(j) - mean, order);
  }
  return moment / mass;
}

inline double variance(const SampledEnvelope& env) { return central_moment(env, 2); }

inline double rms_width(const SampledEnvelope& env) { return std::sqrt(variance(env)); }

/// Standardized third moment mu3 / mu2^(3/2).
inline double skewness(const SampledEnvelope& env) {
  const double mu2 = central_moment(env, 2);
  if (!(mu2 > 0.0)) throw InvalidArgument("skewness of a zero-width envelope");
  return central_moment(env, 3) / std::pow(mu2, 1.5);
}

inline Complex inner_product(const SampledEnvelope& a, const SampledEnvelope& b) {
  if (!(a.grid() == b.grid())) throw InvalidArgument("inner product on mismatched grids");
  Complex sum{0.0, 0.0};
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t j = 0; j < av.size(); ++j) sum += std::conj(av[j]) * bv[j];
  return sum * a.grid().xi_step();
}

/// |<a|b>|^2 / (<a|a><b|b>), insensitive to global phase and normalization.
inline double fidelity(const SampledEnvelope& a, const SampledEnvelope& b) {
  const double na = norm(a);
  const double nb = norm(b);
  if (!(na > 0.0) || !(nb > 0.0)) throw InvalidArgument("fidelity with a zero envelope");
  return std::min(1.0, std::norm(inner_product(a, b)) / (na * nb));
}

/// Fraction of |psi|^2 with |xi| > half_width.
inline double support_tail_mass(const SampledEnvelope& env, double half_width) {
  double total = 0.0, outside = 0.0;
  const auto values = env.values();
  for (std::size_t j = 0; j < values.size(); ++j) {
    const double p = std::norm(values[j]);
    total += p;
    if (std::abs(env.grid().xi(j)) > half_width) outside += p;
  }
  return total > 0.0 ? outside / total : 0.0;
}

/// Mass outside the central 50% of the window.
inline double aliasing_tail_mass(const SampledEnvelope& env) {
  return support_tail_mass(env, 0.25 * env.grid().span());
}

inline SampledEnvelope check_aliasing(SampledEnvelope env, const std::string& where) {
  const double tail = aliasing_tail_mass(env);
  if (tail > guard::tail_mass)
    return env.with_warning(where + ": aliasing guard, tail mass " + std::to_string(tail) +
                            " outside central 50% of window");
  return env;
}

/// Full width at half maximum of |psi|^2, linearly interpolated between samples.
inline double fwhm(const SampledEnvelope& env) {
  const auto values = env.values();
  const std::size_t n = values.size();
  std::vector<double> density(n);
  for (std::size_t j = 0; j < n; ++j) density[j] = std::norm(values[j]);
  const auto peak = static_cast<std::size_t>(std::distance(density.begin(), std::max_element(density.begin(), density.end())));
  const double half = 0.5 * density[peak];
  if (!(half > 0.0)) throw InvalidArgument("fwhm of an empty envelope");

  std::size_t right = peak;
  while (right + 1 < n && density[right + 1] > half) ++right;
  std::size_t left = peak;
  while (left > 0 && density[left - 1] > half) --left;
  if (right + 1 >= n || left == 0) throw SupportError("fwhm: half maximum not reached inside the window");

  const double dx = env.grid().xi_step();
  const double xr = env.grid().xi(right) + dx * (density[right] - half) / (density[right] - density[right + 1]);
  const double xl = env.grid().xi(left) - dx * (density[left] - half) / (density[left] - density[left - 1]);
  return xr - xl;
}

// ---------------------------------------------------------------------------
// Spectrum. psi~(k_m) = dxi * (-1)^m * X_m approximates the continuous
// transform of the centred samples, so sum |psi~|^2 dk / 2pi = sum |psi|^2 dxi.

inline std::vector<Complex> spectrum(const SampledEnvelope& env) {
  auto out = fft::forward(env.values());
  const double dx = env.grid().xi_step();
  for (std::size_t m = 0; m < out.size(); ++m) out[m] *= (m % 2 == 0 ? dx : -dx);
  return out;
}

inline double spectral_norm(const SampledEnvelope& env) {
  const auto spec = spectrum(env);
  double sum = 0.0;
  for (const auto& v : spec) sum += std::norm(v);
  return sum * env.grid().k_step() / (2.0 * std::numbers::pi);
}

inline double spectral_rms_width(const SampledEnvelope& env) {
  const auto spec = spectrum(env);
  double mass = 0.0, first = 0.0, second = 0.0;
  for (std::size_t m = 0; m < spec.size(); ++m) {
    const double p = std::norm(spec[m]);
    const double k = env.grid().k(m);
    mass += p;
    first += p * k;
    second += p * k * k;
  }
  const double mean = first / mass;
  return std::sqrt(second / mass - mean * mean);
}

/// Smallest |k| such that the spectral mass strictly beyond it is at most
/// `tail` of the total.
inline double spectral_band_edge(const std::vector<Complex>& spec, const Grid& grid, double tail) {
  std::vector<std::pair<double, double>> bins(spec.size());
  double total = 0.0;
  for (std::size_t m = 0; m < spec.size(); ++m) {
    bins[m] = {std::abs(grid.k(m)), std::norm(spec[m])};
    total += bins[m].second;
  }
  std::sort(bins.begin(), bins.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  double outside = 0.0;
  for (const auto& [k, p] : bins) {
    outside += p;
    if (outside > tail * total) return k;
  }
  return 0.0;
}

inline double spectral_band_edge(const SampledEnvelope& env, double tail = guard::tail_mass) {
  return spectral_band_edge(spectrum(env), env.grid(), tail);
}

// ---------------------------------------------------------------------------
// Factories

inline SampledEnvelope normalized(const SampledEnvelope& env) {
  const double n = norm(env);
  if (!(n > 0.0)) throw InvalidArgument("cannot normalize a zero envelope");
  const double scale = 1.0 / std::sqrt(n);
  std::vector<Complex> values(env.values().begin(), env.values().end());
  for (auto& v : values) v *= scale;
  return SampledEnvelope(env.grid(), std::move(values), env.carrier(), env.global_phase(), env.elapsed_time(),
                         env.warnings());
}

namespace detail {

inline void require_resolved(const Grid& grid, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("packet width must be positive");
  if (!(sigma > guard::samples_per_sigma * grid.xi_step()))
    throw SamplingError("packet width " + std::to_string(sigma) + " is under-resolved (needs > " +
                        std::to_string(guard::samples_per_sigma) + " samples per sigma)");
}

inline void require_inside(const Grid& grid, double extent) {
  if (!(extent < 0.25 * grid.span()))
    throw SupportError("packet support " + std::to_string(extent) +
                       " leaves the central 50% of the window (half-width " + std::to_string(0.25 * grid.span()) + ")");
}

}  // namespace detail

/// Normalized packet exp(-(xi-c)^2 / 4 sigma^2 + i chirp (xi-c)^2); sigma is the
/// standard deviation of |psi|^2.
inline SampledEnvelope make_gaussian(const Grid& grid, const CarrierState& carrier, double center, double sigma,
                                     double chirp = 0.0) {
  detail::require_resolved(grid, sigma);
  detail::require_inside(grid, std::abs(center) + 4.0 * sigma);
  std::vector<Complex> values(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double x = grid.xi(j) - center;
    values[j] = std::exp(Complex(-x * x / (4.0 * sigma * sigma), chirp * x * x));
  }
  return normalized(SampledEnvelope(grid, std::move(values), carrier));
}

/// Two in-phase Gaussian humps at -separation/2 (amplitude 1) and
/// +separation/2 (amplitude amp_ratio). For amp_ratio < 1 the density is
/// positively skewed.
inline SampledEnvelope make_asymmetric_pair(const Grid& grid, const CarrierState& carrier, double separation,
                                            double sigma, double amp_ratio) {
  detail::require_resolved(grid, sigma);
  if (!(separation > 3.0 * sigma)) throw InvalidArgument("humps overlap: separation must exceed 3 sigma");
  if (!(amp_ratio > 0.0 && amp_ratio <= 1.0)) throw InvalidArgument("amplitude ratio must lie in (0, 1]");
  detail::require_inside(grid, 0.5 * separation + 4.0 * sigma);
  std::vector<Complex> values(grid.size());
  const double s = 4.0 * sigma * sigma;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double x = grid.xi(j);
    const double left = x + 0.5 * separation;
    const double right = x - 0.5 * separation;
    values[j] = std::exp(-left * left / s) + amp_ratio * std::exp(-right * right / s);
  }
  return normalized(SampledEnvelope(grid, std::move(values), carrier));
}

// ---------------------------------------------------------------------------
// Rescaling

/// psi(xi / M) / sqrt|M| from the band-limited interpolant of the samples.
///
/// The interpolant is evaluated exactly at the stretched points with a chirp-z
/// transform. Points mapping outside the window are zero: the envelope is
/// treated as compactly supported, not periodic.
inline SampledEnvelope rescale(const SampledEnvelope& env, double magnification) {
  if (magnification == 0.0 || !std::isfinite(magnification)) throw InvalidArgument("magnification must be nonzero");
  const Grid& grid = env.grid();
  const std::size_t n = grid.size();
  const double m_abs = std::abs(magnification);

  if (magnification == 1.0) return env;
  if (magnification == -1.0) {
    std::vector<Complex> mirrored(n);
    for (std::size_t j = 0; j < n; ++j) mirrored[j] = env.values()[(n - j) % n];
    return env.evolved(std::move(mirrored), 0.0, 0.0);
  }

  if (m_abs > 1.0) {
    const double tail = support_tail_mass(env, 0.5 * grid.span() / m_abs);
    if (tail > guard::rescale_tail_mass)
      throw SupportError("rescale: stretched support overflows the window (tail mass " + std::to_string(tail) + ")");
  }

  const auto coeffs_fft = fft::forward(env.values());
  if (m_abs < 1.0) {
    // Compression widens the spectrum by 1/|M|; it must still fit below Nyquist.
    double total = 0.0, beyond = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      const double p = std::norm(coeffs_fft[m]);
      total += p;
      if (std::abs(grid.k(m)) > m_abs * grid.nyquist()) beyond += p;
    }
    if (beyond > guard::rescale_tail_mass * total)
      throw SamplingError("rescale: compressed spectrum exceeds the grid Nyquist band");
  }

  // Coefficients c_m for signed m in [-n/2, n/2], Nyquist term split in half.
  const std::size_t half = n / 2;
  std::vector<Complex> coeffs(n + 1);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t idx = 0; idx <= n; ++idx) {
    const std::size_t bin = (idx + half) % n;  // signed m = idx - n/2
    const double sign = ((idx + half) % 2 == 0) ? 1.0 : -1.0;
    coeffs[idx] = coeffs_fft[bin] * (sign * inv_n);
  }
  coeffs.front() *= 0.5;
  coeffs.back() *= 0.5;

  const double theta = 2.0 * std::numbers::pi / (static_cast<double>(n) * magnification);
  const double offset = -static_cast<double>(half);
  auto values = fft::chirp_z(coeffs, theta, offset, offset, n);

  const double amplitude = 1.0 / std::sqrt(m_abs);
  const double window_edge = 0.5 * grid.span();
  for (std::size_t j = 0; j < n; ++j) {
    if (std::abs(grid.xi(j) / magnification) > window_edge)
      values[j] = 0.0;
    else
      values[j] *= amplitude;
  }
  return env.evolved(std::move(values), 0.0, 0.0);
}

}  // namespace matterwave
