#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "matterwave/errors.hpp"
#include "matterwave/units.hpp"

namespace matterwave::io {

enum class Quantity {
  dimensionless,
  angle,
  length,
  time,
  mass,
  charge,
  energy,
  electric_field,
  angular_frequency,
  wavenumber,
  velocity,
  chirp,
};

namespace detail {

struct UnitEntry {
  std::string_view symbol;
  double to_si;
};

inline const std::vector<UnitEntry>& units_for(Quantity q) {
  using std::numbers::pi;
  static const std::vector<UnitEntry> none{{"", 1.0}};
  static const std::vector<UnitEntry> angle{{"rad", 1.0}, {"deg", pi / 180.0}, {"", 1.0}};
  static const std::vector<UnitEntry> length{{"m", 1.0},     {"km", 1e3},  {"cm", 1e-2}, {"mm", 1e-3},
                                             {"um", 1e-6},   {"µm", 1e-6}, {"nm", 1e-9}, {"pm", 1e-12},
                                             {"A", 1e-10}};
  static const std::vector<UnitEntry> time{{"s", 1.0},    {"ms", 1e-3},  {"us", 1e-6},
                                           {"µs", 1e-6},  {"ns", 1e-9},  {"ps", 1e-12},
                                           {"fs", 1e-15}, {"as", 1e-18}};
  static const std::vector<UnitEntry> mass{{"kg", 1.0}, {"g", 1e-3}, {"m_e", si::electron_mass}};
  static const std::vector<UnitEntry> charge{{"C", 1.0}, {"e", si::elementary_charge}};
  static const std::vector<UnitEntry> energy{{"J", 1.0},
                                             {"eV", si::electron_volt},
                                             {"keV", 1e3 * si::electron_volt},
                                             {"MeV", 1e6 * si::electron_volt},
                                             {"meV", 1e-3 * si::electron_volt}};
  static const std::vector<UnitEntry> field{{"V/m", 1.0},  {"kV/m", 1e3}, {"MV/m", 1e6},
                                            {"V/cm", 1e2}, {"kV/cm", 1e5}, {"MV/cm", 1e8}};
  static const std::vector<UnitEntry> frequency{{"rad/s", 1.0},         {"Hz", 2.0 * pi},
                                                {"kHz", 2.0 * pi * 1e3}, {"MHz", 2.0 * pi * 1e6},
                                                {"GHz", 2.0 * pi * 1e9}, {"THz", 2.0 * pi * 1e12}};
  static const std::vector<UnitEntry> wavenumber{{"rad/m", 1.0},   {"1/m", 1.0},     {"rad/cm", 1e2},
                                                 {"rad/mm", 1e3},  {"rad/um", 1e6},  {"rad/nm", 1e9}};
  static const std::vector<UnitEntry> velocity{{"m/s", 1.0}, {"c", si::c_light}};
  static const std::vector<UnitEntry> chirp{{"rad/m^2", 1.0}, {"rad/um^2", 1e12}, {"rad/nm^2", 1e18}};

  switch (q) {
    case Quantity::dimensionless: return none;
    case Quantity::angle: return angle;
    case Quantity::length: return length;
    case Quantity::time: return time;
    case Quantity::mass: return mass;
    case Quantity::charge: return charge;
    case Quantity::energy: return energy;
    case Quantity::electric_field: return field;
    case Quantity::angular_frequency: return frequency;
    case Quantity::wavenumber: return wavenumber;
    case Quantity::velocity: return velocity;
    case Quantity::chirp: return chirp;
  }
  return none;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace detail

inline std::string unit_list(Quantity q) {
  std::string out;
  for (const auto& u : detail::units_for(q)) {
    if (u.symbol.empty()) continue;
    if (!out.empty()) out += ", ";
    out += u.symbol;
  }
  return out.empty() ? "(none)" : out;
}

/// Parses "<number> <unit>" into SI. A bare number is taken as already in SI.
inline double parse_quantity(std::string_view text, Quantity q, std::string_view field) {
  const auto s = detail::trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || !std::isfinite(value))
    throw ConfigError(std::string(field) + ": cannot parse a number from \"" + std::string(text) + "\"");
  const auto unit = detail::trim(std::string_view(ptr, static_cast<std::size_t>(s.data() + s.size() - ptr)));
  if (unit.empty()) return value;
  for (const auto& u : detail::units_for(q))
    if (u.symbol == unit) return value * u.to_si;
  throw ConfigError(std::string(field) + ": unknown unit \"" + std::string(unit) + "\" (expected one of " +
                    unit_list(q) + ")");
}

}  // namespace matterwave::io
