#pragma once

#include <cmath>
#include <numbers>

#include "matterwave/errors.hpp"

namespace matterwave {

namespace si {
inline constexpr double hbar = 1.054571817e-34;            // J s
inline constexpr double c_light = 299792458.0;             // m/s
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double electron_mass = 9.1093837015e-31;  // kg
inline constexpr double electron_volt = elementary_charge;  // J
}  // namespace si

/// Exponents of (length, mass, time, charge). Half-integer exponents occur for
/// wavefunction amplitudes (m^-1/2).
struct Dimension {
  double length = 0.0;
  double mass = 0.0;
  double time = 0.0;
  double charge = 0.0;
};

namespace dim {
inline constexpr Dimension dimensionless{};
inline constexpr Dimension length{1, 0, 0, 0};
inline constexpr Dimension area{2, 0, 0, 0};
inline constexpr Dimension mass{0, 1, 0, 0};
inline constexpr Dimension time{0, 0, 1, 0};
inline constexpr Dimension charge{0, 0, 0, 1};
inline constexpr Dimension wavenumber{-1, 0, 0, 0};
inline constexpr Dimension chirp{-2, 0, 0, 0};
inline constexpr Dimension angular_frequency{0, 0, -1, 0};
inline constexpr Dimension velocity{1, 0, -1, 0};
inline constexpr Dimension action{2, 1, -1, 0};
inline constexpr Dimension energy{2, 1, -2, 0};
inline constexpr Dimension force{1, 1, -2, 0};
inline constexpr Dimension electric_field{1, 1, -2, -1};
inline constexpr Dimension scalar_potential{2, 1, -2, -1};
inline constexpr Dimension vector_potential{1, 1, -1, -1};
inline constexpr Dimension amplitude{-0.5, 0, 0, 0};
}  // namespace dim

/// SI values of the base units of a unit system.
struct UnitSystem {
  double length = 1.0;
  double mass = 1.0;
  double time = 1.0;
  double charge = 1.0;

  double scale(Dimension d) const {
    return std::pow(length, d.length) * std::pow(mass, d.mass) * std::pow(time, d.time) *
           std::pow(charge, d.charge);
  }
  double to_si(double value, Dimension d) const { return value * scale(d); }
  double from_si(double value, Dimension d) const { return value / scale(d); }
};

enum class UnitMode { si, natural };

/// Particle constants (hbar, m, q, c) in one consistent unit system.
///
/// Natural contexts have hbar = m = 1, |q| = 1 and lengths measured in a chosen
/// reference length; `units()` maps their quantities back to SI.
class PhysicalContext {
 public:
  static PhysicalContext si(double mass, double charge) {
    return PhysicalContext(si::hbar, mass, charge, si::c_light, UnitMode::si, UnitSystem{});
  }

  static PhysicalContext electron() { return si(si::electron_mass, -si::elementary_charge); }

  /// Dimensionless context without an SI anchor (hbar = m = 1).
  static PhysicalContext natural(double charge, double c_light) {
    return PhysicalContext(1.0, 1.0, charge, c_light, UnitMode::natural, UnitSystem{});
  }

  /// Natural-unit twin of an SI context with lengths in units of `length_unit` metres.
  PhysicalContext to_natural(double length_unit) const {
    if (mode_ != UnitMode::si) throw InvalidArgument("to_natural: context is already natural");
    if (!(length_unit > 0.0) || !std::isfinite(length_unit))
      throw InvalidArgument("to_natural: length unit must be positive");
    UnitSystem u;
    u.length = length_unit;
    u.mass = mass_;
    u.time = mass_ * length_unit * length_unit / hbar_;
    u.charge = charge_ != 0.0 ? std::abs(charge_) : 1.0;
    return PhysicalContext(1.0, 1.0, u.from_si(charge_, dim::charge),
                           u.from_si(c_light_, dim::velocity), UnitMode::natural, u);
  }

  double hbar() const { return hbar_; }
  double mass() const { return mass_; }
  double charge() const { return charge_; }
  double c_light() const { return c_light_; }
  UnitMode mode() const { return mode_; }
  const UnitSystem& units() const { return units_; }

  /// hbar / 2m, the coefficient of the free-particle diffusion operator.
  double diffusivity() const { return hbar_ / (2.0 * mass_); }

  int charge_sign() const { return charge_ > 0.0 ? 1 : (charge_ < 0.0 ? -1 : 0); }

  double to_si(double value, Dimension d) const { return units_.to_si(value, d); }
  double from_si(double value, Dimension d) const { return units_.from_si(value, d); }

 private:
  PhysicalContext(double hbar, double mass, double charge, double c_light, UnitMode mode,
                  UnitSystem units)
      : hbar_(hbar), mass_(mass), charge_(charge), c_light_(c_light), mode_(mode), units_(units) {
    if (!(hbar_ > 0.0) || !std::isfinite(hbar_)) throw InvalidArgument("hbar must be positive");
    if (!(mass_ > 0.0) || !std::isfinite(mass_)) throw InvalidArgument("mass must be positive");
    if (!(c_light_ > 0.0) || !std::isfinite(c_light_))
      throw InvalidArgument("speed of light must be positive");
    if (!std::isfinite(charge_)) throw InvalidArgument("charge must be finite");
  }

  double hbar_;
  double mass_;
  double charge_;
  double c_light_;
  UnitMode mode_;
  UnitSystem units_;
};

}  // namespace matterwave
