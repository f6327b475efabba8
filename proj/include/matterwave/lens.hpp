#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "matterwave/carrier.hpp"
#include "matterwave/envelope.hpp"
#include "matterwave/errors.hpp"
#include "matterwave/units.hpp"

namespace matterwave {

/// sin(x)/x with the removable singularity filled in.
inline double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

struct PhaseVelocity {
  double value;
};

/// n in v_p = c / n.
struct SlowFactor {
  double value;
};

/// Co-propagating slow-wave mode Phi = Phi0 cos(k_m z - w_m t + theta),
/// A_z = A0 cos(...), seen by a particle of the given carrier.
class LensSpec {
 public:
  double E0() const { return E0_; }
  double omega_m() const { return omega_m_; }
  double k_m() const { return k_m_; }
  double v_p() const { return v_p_; }
  double slow_factor() const { return slow_factor_; }
  double L() const { return L_; }
  double theta() const { return theta_; }
  double A0() const { return A0_; }
  double Phi0() const { return Phi0_; }
  double Gamma0() const { return Gamma0_; }
  double delta_phi() const { return delta_phi_; }
  double lambda_m() const { return 2.0 * std::numbers::pi / k_m_; }

  double charge() const { return charge_; }
  double hbar() const { return hbar_; }
  double mass() const { return mass_; }
  double c_light() const { return c_light_; }
  const CarrierState& carrier() const { return carrier_; }

  int charge_sign() const { return charge_ > 0.0 ? 1 : -1; }
  bool velocity_matched() const { return v_p_ == carrier_.v_group(); }
  /// Time the packet spends inside the structure.
  double transit_time() const { return L_ / carrier_.v_group(); }

  friend LensSpec build_lens(double, double, std::variant<PhaseVelocity, SlowFactor>, double,
                             const PhysicalContext&, const CarrierState&, std::optional<double>);

 private:
  explicit LensSpec(const CarrierState& carrier) : carrier_(carrier) {}

  double E0_ = 0.0;
  double omega_m_ = 0.0;
  double k_m_ = 0.0;
  double v_p_ = 0.0;
  double slow_factor_ = 0.0;
  double L_ = 0.0;
  double theta_ = 0.0;
  double A0_ = 0.0;
  double Phi0_ = 0.0;
  double Gamma0_ = 0.0;
  double delta_phi_ = 0.0;
  double charge_ = 0.0;
  double hbar_ = 0.0;
  double mass_ = 0.0;
  double c_light_ = 0.0;
  CarrierState carrier_;
};

/// Builds the lens from the field amplitude and mode parameters. The default
/// theta (pi for positive, 0 for negative charge) puts the packet on the
/// potential extremum that focuses.
inline LensSpec build_lens(double E0, double omega_m, std::variant<PhaseVelocity, SlowFactor> velocity, double L,
                           const PhysicalContext& ctx, const CarrierState& carrier,
                           std::optional<double> theta = std::nullopt) {
  if (!(E0 >= 0.0) || !std::isfinite(E0)) throw InvalidArgument("E0 must be non-negative");
  if (!(omega_m > 0.0) || !std::isfinite(omega_m)) throw InvalidArgument("omega_m must be positive");
  if (!(L > 0.0) || !std::isfinite(L)) throw InvalidArgument("interaction length must be positive");
  if (ctx.charge() == 0.0) throw InvalidArgument("a neutral particle does not couple to the lens");

  const double c = ctx.c_light();
  double v_p = 0.0;
  if (const auto* pv = std::get_if<PhaseVelocity>(&velocity)) {
    v_p = pv->value;
  } else {
    const double n = std::get<SlowFactor>(velocity).value;
    if (!(n > 0.0) || !std::isfinite(n)) throw InvalidArgument("slow factor must be positive");
    v_p = c / n;
  }
  if (!(v_p > 0.0) || !std::isfinite(v_p)) throw InvalidArgument("phase velocity must be positive");
  if (!(v_p < c)) throw InvalidArgument("not a slow wave: phase velocity must be below c");

  LensSpec spec(carrier);
  spec.E0_ = E0;
  spec.omega_m_ = omega_m;
  spec.v_p_ = v_p;
  spec.slow_factor_ = c / v_p;
  spec.k_m_ = omega_m / v_p;
  spec.L_ = L;
  spec.charge_ = ctx.charge();
  spec.hbar_ = ctx.hbar();
  spec.mass_ = ctx.mass();
  spec.c_light_ = c;
  spec.theta_ = theta.value_or(ctx.charge() > 0.0 ? std::numbers::pi : 0.0);

  spec.A0_ = E0 / (omega_m * (c * c / (v_p * v_p) - 1.0));
  spec.Phi0_ = spec.k_m_ * c * c / omega_m * spec.A0_;
  spec.Gamma0_ = std::abs(ctx.charge()) * E0 * L / (ctx.hbar() * omega_m);
  spec.delta_phi_ = omega_m * L * (1.0 / v_p - 1.0 / carrier.v_group());
  return spec;
}

/// Phase imprinted on the envelope at xi after the full transit, including
/// the walkoff reduction sinc(dphi/2) and shift dphi/2.
inline double accumulated_phase(const LensSpec& spec, double xi) {
  const double arg = spec.k_m() * xi + spec.theta();
  if (spec.delta_phi() == 0.0) return -spec.charge_sign() * spec.Gamma0() * std::cos(arg);

  const double c2 = spec.c_light() * spec.c_light();
  const double v_p = spec.v_p();
  const double v_g = spec.carrier().v_group();
  const double strength = spec.charge() * spec.E0() * spec.L() / (spec.hbar() * spec.omega_m());
  const double velocity_ratio = (c2 / (v_p * v_g) - 1.0) / (c2 / (v_p * v_p) - 1.0);
  const double half_slip = 0.5 * spec.delta_phi();
  return -strength * velocity_ratio * sinc(half_slip) * std::cos(arg + half_slip);
}

/// Direct quadrature of (q A0 / hbar)(v_g - c^2/v_p) \int_0^{L/v_g} cos(k_m z - w_m t + theta) dt
/// along the packet trajectory z = xi + v_g t.
inline double phase_integral_oracle(const LensSpec& spec, double xi) {
  const double v_g = spec.carrier().v_group();
  const double transit = spec.L() / v_g;
  const double prefactor = spec.charge() * spec.A0() / spec.hbar() *
                           (v_g - spec.c_light() * spec.c_light() / spec.v_p());
  auto integrand = [&](double t) {
    return std::cos(spec.k_m() * (xi + v_g * t) - spec.omega_m() * t + spec.theta());
  };
  // Scale to the unit interval so the absolute tolerance is meaningful.
  auto scaled = [&](double s) { return integrand(s * transit); };
  const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(scaled, 0.0, 1.0, 10, 1e-13);
  return prefactor * transit * integral;
}

/// Longitudinal force q E_z on a particle displaced by xi from the synchronous
/// point, with E_z = -dPhi/dz - dA_z/dt evaluated from the potentials.
inline double restoring_force(const LensSpec& spec, double xi, double t = 0.0) {
  const double psi = spec.k_m() * (xi + spec.carrier().v_group() * t) - spec.omega_m() * t + spec.theta();
  const double E_z = (spec.Phi0() * spec.k_m() - spec.A0() * spec.omega_m()) * std::sin(psi);
  return spec.charge() * E_z;
}

struct LensDesign {
  double focal_length;            // signed; negative for a diverging lens
  double f_number;                // focal_length * k_m
  double aperture;                // 1 / k_m
  double resolution_input_scale;  // lambda0 * |f_number|
};

/// Thin-lens parameters from the quadratic part of the phase at xi = 0.
/// Empty when the lens imprints no curvature there (E0 = 0, or theta at a node).
inline std::optional<LensDesign> lens_design(const LensSpec& spec) {
  const double curvature = spec.charge_sign() * spec.Gamma0() * std::cos(spec.theta());
  if (spec.Gamma0() == 0.0 || std::abs(std::cos(spec.theta())) < 1e-12) return std::nullopt;
  const double k0 = spec.carrier().k0();
  const double km = spec.k_m();
  // Default theta: -sgn(q) cos(theta) = 1, so this is k0 / (Gamma0 k_m^2).
  const double focal = -k0 / (curvature * km * km);
  const double f_number = focal * km;
  return LensDesign{focal, f_number, 1.0 / km, spec.carrier().lambda0() * std::abs(f_number)};
}

/// f-number from the particle kinematics, m v_g v_p / (|q| E0 L). Equals the
/// geometric value when the lens is velocity matched at the default theta.
inline double f_number_kinematic(const LensSpec& spec) {
  return spec.mass() * spec.carrier().v_group() * spec.v_p() / (std::abs(spec.charge()) * spec.E0() * spec.L());
}

/// m c^2 / (n^2 |q| E0 L): rest energy over n^2 times the energy gained across L.
inline double f_number_slow_factor(const LensSpec& spec) {
  const double n = spec.slow_factor();
  return spec.mass() * spec.c_light() * spec.c_light() / (n * n * std::abs(spec.charge()) * spec.E0() * spec.L());
}

enum class LensMode { quadratic, full_cosine };

/// Transmission window centred on xi = 0.
struct Aperture {
  enum class Kind { none, hard, raised_cosine };
  Kind kind = Kind::none;
  double width = 0.0;
  double rolloff = 0.0;  // fraction of width spent in each cosine edge

  static Aperture none() { return {}; }
  static Aperture hard(double width) { return {Kind::hard, width, 0.0}; }
  static Aperture raised_cosine(double width, double rolloff) { return {Kind::raised_cosine, width, rolloff}; }
  static Aperture lens_default(const LensSpec& spec) { return hard(1.0 / spec.k_m()); }

  double transmission(double xi) const {
    const double r = std::abs(xi);
    switch (kind) {
      case Kind::none:
        return 1.0;
      case Kind::hard:
        return r <= 0.5 * width ? 1.0 : 0.0;
      case Kind::raised_cosine: {
        const double inner = 0.5 * width * (1.0 - rolloff);
        const double outer = 0.5 * width * (1.0 + rolloff);
        if (r <= inner) return 1.0;
        if (r >= outer) return 0.0;
        const double s = std::cos(0.5 * std::numbers::pi * (r - inner) / (outer - inner));
        return s * s;
      }
    }
    return 1.0;
  }
};

struct LensOptions {
  LensMode mode = LensMode::quadratic;
  Aperture aperture = Aperture::none();
};

/// Imprints the lens phase. The on-axis value Gamma(0) goes to global_phase;
/// the samples carry Gamma(xi) - Gamma(0) (full_cosine) or its quadratic
/// approximation -k0 xi^2 / 2f (quadratic).
inline SampledEnvelope apply_lens(const SampledEnvelope& env, const LensSpec& spec, LensOptions options = {}) {
  const Grid& grid = env.grid();
  if (!(env.carrier() == spec.carrier())) throw InvalidArgument("lens was built for a different carrier");
  if (spec.lambda_m() < 16.0 * grid.xi_step())
    throw SamplingError("lens modulation under-resolved: fewer than 16 samples per period");
  if (options.aperture.kind != Aperture::Kind::none) {
    if (!(options.aperture.width > 0.0)) throw InvalidArgument("aperture width must be positive");
    if (options.aperture.kind == Aperture::Kind::raised_cosine &&
        !(options.aperture.rolloff > 0.0 && options.aperture.rolloff <= 1.0))
      throw InvalidArgument("aperture rolloff must lie in (0, 1]");
  }

  const double on_axis = accumulated_phase(spec, 0.0);
  const auto design = lens_design(spec);
  const double k0 = env.carrier().k0();

  std::vector<Complex> values(env.values().begin(), env.values().end());
  for (std::size_t j = 0; j < values.size(); ++j) {
    const double xi = grid.xi(j);
    double phase = 0.0;
    if (spec.Gamma0() != 0.0) {
      if (options.mode == LensMode::full_cosine)
        phase = accumulated_phase(spec, xi) - on_axis;
      else if (design)
        phase = -k0 * xi * xi / (2.0 * design->focal_length);
    }
    const double t = options.aperture.transmission(xi);
    values[j] = phase == 0.0 ? values[j] * t : values[j] * std::polar(t, phase);
  }
  return env.evolved(std::move(values), on_axis, 0.0);
}

}  // namespace matterwave
