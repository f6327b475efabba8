#pragma once

#include <cmath>
#include <numbers>

#include "matterwave/errors.hpp"
#include "matterwave/units.hpp"

namespace matterwave {

/// Plane-wave carrier of a narrowband matter-wave packet.
///
/// Nonrelativistic free-particle dispersion omega = hbar k^2 / 2m, so the
/// envelope travels at v_group = hbar k0 / m, twice the carrier phase velocity.
class CarrierState {
 public:
  static CarrierState from_wavenumber(const PhysicalContext& ctx, double k0) {
    if (!(k0 > 0.0) || !std::isfinite(k0)) throw InvalidArgument("carrier wavenumber must be positive");
    const double v_group = ctx.hbar() * k0 / ctx.mass();
    return CarrierState(k0, ctx.hbar() * k0 * k0 / (2.0 * ctx.mass()), v_group);
  }

  /// Keeps `v_group` bit-exact, which lets a carrier be velocity matched to a lens.
  static CarrierState from_group_velocity(const PhysicalContext& ctx, double v_group) {
    if (!(v_group > 0.0) || !std::isfinite(v_group))
      throw InvalidArgument("group velocity must be positive");
    const double k0 = ctx.mass() * v_group / ctx.hbar();
    return CarrierState(k0, ctx.hbar() * k0 * k0 / (2.0 * ctx.mass()), v_group);
  }

  static CarrierState from_kinetic_energy(const PhysicalContext& ctx, double energy) {
    if (!(energy > 0.0) || !std::isfinite(energy))
      throw InvalidArgument("kinetic energy must be positive");
    return from_wavenumber(ctx, std::sqrt(2.0 * ctx.mass() * energy) / ctx.hbar());
  }

  double k0() const { return k0_; }
  double omega0() const { return omega0_; }
  double v_group() const { return v_group_; }
  double v_phase() const { return 0.5 * v_group_; }
  double lambda0() const { return 2.0 * std::numbers::pi / k0_; }
  double kinetic_energy(const PhysicalContext& ctx) const { return ctx.hbar() * omega0_; }

  bool operator==(const CarrierState&) const = default;

 private:
  CarrierState(double k0, double omega0, double v_group) : k0_(k0), omega0_(omega0), v_group_(v_group) {}

  double k0_;
  double omega0_;
  double v_group_;
};

}  // namespace matterwave
