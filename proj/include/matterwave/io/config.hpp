#pragma once

#include <json.hpp>

#include <cmath>
#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "matterwave/errors.hpp"
#include "matterwave/io/quantity.hpp"
#include "matterwave/lens.hpp"
#include "matterwave/units.hpp"

namespace matterwave::io {

using Json = nlohmann::json;

enum class Experiment { disperse, lens, image, sweep, resolution };
enum class OutputFormat { csv, json, both };

inline std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::disperse: return "disperse";
    case Experiment::lens: return "lens";
    case Experiment::image: return "image";
    case Experiment::sweep: return "sweep";
    case Experiment::resolution: return "resolution";
  }
  return "?";
}

// All values below are SI.

struct ParticleConfig {
  std::string species;  // empty for an explicit particle
  double mass = 0.0;
  double charge = 0.0;
};

struct CarrierConfig {
  enum class Kind { kinetic_energy, k0, group_velocity, match_lens };
  Kind kind = Kind::k0;
  double value = 0.0;
};

struct GridConfig {
  std::size_t n_points = 4096;
  std::optional<double> xi_span;
};

struct InputConfig {
  enum class Kind { gaussian, asymmetric_pair };
  Kind kind = Kind::gaussian;
  double sigma = 0.0;
  double center = 0.0;
  double chirp = 0.0;
  double separation = 0.0;
  double amp_ratio = 1.0;
};

struct ApertureConfig {
  enum class Kind { none, lens_default, hard, raised_cosine };
  Kind kind = Kind::none;
  double width = 0.0;
  double rolloff = 0.0;
};

struct LensConfig {
  double E0 = 0.0;
  double omega_m = 0.0;
  std::optional<double> slow_factor;  // exactly one of slow_factor / v_p after validation
  std::optional<double> v_p;
  double L = 0.0;
  LensMode mode = LensMode::quadratic;
  ApertureConfig aperture;
  std::optional<double> theta;
};

struct ImagingConfig {
  enum class Kind { L1, tau1, magnification };
  Kind kind = Kind::L1;
  double value = 0.0;
};

struct ResolutionConfig {
  double probe_width = 0.0;
  ApertureConfig aperture{ApertureConfig::Kind::lens_default};
};

struct AberrationConfig {
  std::vector<double> widths;
  bool at_lens = false;  // widths are rms widths at the lens rather than at the input
};

struct OutputConfig {
  std::string dir = "out";
  OutputFormat format = OutputFormat::both;
  std::string prefix;
};

struct ScenarioConfig {
  Experiment experiment = Experiment::lens;
  ParticleConfig particle;
  CarrierConfig carrier;
  GridConfig grid;
  std::optional<InputConfig> input;
  std::optional<LensConfig> lens;
  std::optional<ImagingConfig> imaging;
  std::optional<ResolutionConfig> resolution;
  std::optional<AberrationConfig> aberration;
  OutputConfig output;
  Json source;  // the parsed document, echoed into the summary
};

namespace detail {

/// A JSON object whose keys are checked against a fixed list.
class Section {
 public:
  Section(const Json& node, std::string path, std::vector<std::string> keys)
      : node_(node), path_(std::move(path)), keys_(std::move(keys)) {
    if (!node_.is_object()) throw ConfigError(path_ + ": expected an object");
    for (const auto& [key, value] : node_.items()) {
      bool known = false;
      for (const auto& k : keys_) known = known || k == key;
      if (!known) throw ConfigError("unknown key \"" + qualified(key) + "\" (valid keys: " + key_list() + ")");
    }
  }

  bool has(const std::string& key) const { return node_.contains(key); }
  const Json& at(const std::string& key) const {
    if (!has(key)) throw ConfigError("missing required field: " + qualified(key));
    return node_.at(key);
  }
  std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  double quantity(const std::string& key, Quantity q) const { return to_quantity(at(key), q, qualified(key)); }
  std::optional<double> optional_quantity(const std::string& key, Quantity q) const {
    if (!has(key)) return std::nullopt;
    return quantity(key, q);
  }

  std::string string(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_string()) throw ConfigError(qualified(key) + ": expected a string");
    return v.get<std::string>();
  }

  /// Exactly one of `keys` must be present; returns its index.
  std::size_t choose_one(const std::vector<std::string>& keys) const {
    std::optional<std::size_t> found;
    for (std::size_t i = 0; i < keys.size(); ++i) {
      if (!has(keys[i])) continue;
      if (found) throw ConfigError(path_ + ": conflicting fields \"" + keys[*found] + "\" and \"" + keys[i] + "\"");
      found = i;
    }
    if (!found) {
      std::string names;
      for (const auto& k : keys) names += (names.empty() ? "" : " | ") + qualified(k);
      throw ConfigError("missing required field: " + names);
    }
    return *found;
  }

  static double to_quantity(const Json& v, Quantity q, const std::string& field) {
    if (v.is_number()) {
      const double x = v.get<double>();
      if (!std::isfinite(x)) throw ConfigError(field + ": value must be finite");
      return x;
    }
    if (v.is_string()) return parse_quantity(v.get<std::string>(), q, field);
    throw ConfigError(field + ": expected a number or a \"<value> <unit>\" string");
  }

 private:
  std::string key_list() const {
    std::string out;
    for (const auto& k : keys_) out += (out.empty() ? "" : ", ") + k;
    return out;
  }

  const Json& node_;
  std::string path_;
  std::vector<std::string> keys_;
};

inline void require_positive(double value, const std::string& field) {
  if (!(value > 0.0)) throw ConfigError(field + ": must be positive");
}

inline ApertureConfig parse_aperture(const Json& node, const std::string& field) {
  ApertureConfig ap;
  if (node.is_string()) {
    const auto name = node.get<std::string>();
    if (name == "none") return ap;
    if (name == "default") return ApertureConfig{ApertureConfig::Kind::lens_default};
    throw ConfigError(field + ": expected \"none\", \"default\" or an object with width (and rolloff)");
  }
  Section s(node, field, {"width", "rolloff"});
  ap.width = s.quantity("width", Quantity::length);
  require_positive(ap.width, s.qualified("width"));
  ap.kind = ApertureConfig::Kind::hard;
  if (s.has("rolloff")) {
    ap.rolloff = s.quantity("rolloff", Quantity::dimensionless);
    if (!(ap.rolloff > 0.0 && ap.rolloff <= 1.0)) throw ConfigError(s.qualified("rolloff") + ": must lie in (0, 1]");
    ap.kind = ApertureConfig::Kind::raised_cosine;
  }
  return ap;
}

inline ParticleConfig parse_particle(const Section& root) {
  Section s(root.at("particle"), "particle", {"species", "mass", "charge"});
  ParticleConfig p;
  if (s.has("species")) {
    if (s.has("mass") || s.has("charge")) throw ConfigError("particle: give either species or mass and charge");
    p.species = s.string("species");
    if (p.species == "electron") {
      p.mass = si::electron_mass;
      p.charge = -si::elementary_charge;
    } else if (p.species == "positron") {
      p.mass = si::electron_mass;
      p.charge = si::elementary_charge;
    } else {
      throw ConfigError("particle.species: unknown species \"" + p.species + "\" (valid: electron, positron)");
    }
    return p;
  }
  p.mass = s.quantity("mass", Quantity::mass);
  p.charge = s.quantity("charge", Quantity::charge);
  require_positive(p.mass, "particle.mass");
  return p;
}

inline CarrierConfig parse_carrier(const Section& root) {
  Section s(root.at("carrier"), "carrier", {"kinetic_energy", "k0", "group_velocity", "match_lens"});
  CarrierConfig c;
  switch (s.choose_one({"kinetic_energy", "k0", "group_velocity", "match_lens"})) {
    case 0:
      c.kind = CarrierConfig::Kind::kinetic_energy;
      c.value = s.quantity("kinetic_energy", Quantity::energy);
      break;
    case 1:
      c.kind = CarrierConfig::Kind::k0;
      c.value = s.quantity("k0", Quantity::wavenumber);
      break;
    case 2:
      c.kind = CarrierConfig::Kind::group_velocity;
      c.value = s.quantity("group_velocity", Quantity::velocity);
      break;
    default:
      if (!s.at("match_lens").is_boolean() || !s.at("match_lens").get<bool>())
        throw ConfigError("carrier.match_lens: expected true");
      c.kind = CarrierConfig::Kind::match_lens;
      return c;
  }
  require_positive(c.value, "carrier");
  return c;
}

inline GridConfig parse_grid(const Section& root) {
  GridConfig g;
  if (!root.has("grid")) return g;
  Section s(root.at("grid"), "grid", {"n_points", "xi_span"});
  if (s.has("n_points")) {
    const auto& v = s.at("n_points");
    if (!v.is_number_integer() || v.get<long long>() < 2) throw ConfigError("grid.n_points: expected an integer >= 2");
    g.n_points = v.get<std::size_t>();
    if ((g.n_points & (g.n_points - 1)) != 0) throw ConfigError("grid.n_points: must be a power of two");
  }
  if (s.has("xi_span")) {
    g.xi_span = s.quantity("xi_span", Quantity::length);
    require_positive(*g.xi_span, "grid.xi_span");
  }
  return g;
}

inline InputConfig parse_input(const Json& node) {
  Section s(node, "input", {"type", "sigma", "center", "chirp", "separation", "amp_ratio"});
  InputConfig in;
  const auto type = s.string("type");
  in.sigma = s.quantity("sigma", Quantity::length);
  require_positive(in.sigma, "input.sigma");
  if (type == "gaussian") {
    if (s.has("separation") || s.has("amp_ratio"))
      throw ConfigError("input: separation and amp_ratio apply to type asymmetric_pair only");
    in.center = s.optional_quantity("center", Quantity::length).value_or(0.0);
    in.chirp = s.optional_quantity("chirp", Quantity::chirp).value_or(0.0);
  } else if (type == "asymmetric_pair") {
    if (s.has("center") || s.has("chirp")) throw ConfigError("input: center and chirp apply to type gaussian only");
    in.kind = InputConfig::Kind::asymmetric_pair;
    in.separation = s.quantity("separation", Quantity::length);
    in.amp_ratio = s.quantity("amp_ratio", Quantity::dimensionless);
  } else {
    throw ConfigError("input.type: unknown type \"" + type + "\" (valid: gaussian, asymmetric_pair)");
  }
  return in;
}

inline LensConfig parse_lens(const Json& node) {
  Section s(node, "lens", {"E0", "omega_m", "k_m", "n", "v_p", "L", "mode", "aperture", "theta"});
  LensConfig lens;
  lens.E0 = s.quantity("E0", Quantity::electric_field);
  if (lens.E0 < 0.0) throw ConfigError("lens.E0: must be non-negative");
  lens.L = s.quantity("L", Quantity::length);
  require_positive(lens.L, "lens.L");

  if (s.has("n")) lens.slow_factor = s.quantity("n", Quantity::dimensionless);
  if (s.has("v_p")) lens.v_p = s.quantity("v_p", Quantity::velocity);
  if (!lens.slow_factor && !lens.v_p) throw ConfigError("missing required field: lens.n | lens.v_p");
  if (lens.slow_factor && lens.v_p) {
    const double implied = si::c_light / *lens.slow_factor;
    if (std::abs(implied - *lens.v_p) > 1e-12 * implied)
      throw ConfigError("lens: conflicting fields \"n\" and \"v_p\" (n implies v_p = " + std::to_string(implied) +
                        " m/s)");
    lens.v_p.reset();
  }
  const double v_p = lens.v_p ? *lens.v_p : si::c_light / *lens.slow_factor;

  if (s.has("omega_m") && s.has("k_m")) {
    const double w = s.quantity("omega_m", Quantity::angular_frequency);
    const double k = s.quantity("k_m", Quantity::wavenumber);
    if (std::abs(k * v_p - w) > 1e-9 * w) throw ConfigError("lens: conflicting fields \"omega_m\" and \"k_m\"");
    lens.omega_m = w;
  } else if (s.has("k_m")) {
    lens.omega_m = s.quantity("k_m", Quantity::wavenumber) * v_p;
  } else {
    lens.omega_m = s.quantity("omega_m", Quantity::angular_frequency);
  }
  require_positive(lens.omega_m, "lens.omega_m");

  if (s.has("mode")) {
    const auto mode = s.string("mode");
    if (mode == "quadratic")
      lens.mode = LensMode::quadratic;
    else if (mode == "full_cosine")
      lens.mode = LensMode::full_cosine;
    else
      throw ConfigError("lens.mode: unknown mode \"" + mode + "\" (valid: quadratic, full_cosine)");
  }
  if (s.has("aperture")) lens.aperture = parse_aperture(s.at("aperture"), "lens.aperture");
  if (s.has("theta")) lens.theta = s.quantity("theta", Quantity::angle);
  return lens;
}

inline ImagingConfig parse_imaging(const Json& node) {
  Section s(node, "imaging", {"L1", "tau1", "magnification"});
  ImagingConfig im;
  switch (s.choose_one({"L1", "tau1", "magnification"})) {
    case 0:
      im.kind = ImagingConfig::Kind::L1;
      im.value = s.quantity("L1", Quantity::length);
      break;
    case 1:
      im.kind = ImagingConfig::Kind::tau1;
      im.value = s.quantity("tau1", Quantity::time);
      break;
    default:
      im.kind = ImagingConfig::Kind::magnification;
      im.value = s.quantity("magnification", Quantity::dimensionless);
      if (im.value == 0.0) throw ConfigError("imaging.magnification: must be nonzero");
  }
  return im;
}

inline ResolutionConfig parse_resolution(const Json& node) {
  Section s(node, "resolution", {"probe_width", "aperture"});
  ResolutionConfig r;
  r.probe_width = s.quantity("probe_width", Quantity::length);
  require_positive(r.probe_width, "resolution.probe_width");
  if (s.has("aperture")) r.aperture = parse_aperture(s.at("aperture"), "resolution.aperture");
  return r;
}

inline AberrationConfig parse_aberration(const Json& node) {
  Section s(node, "aberration", {"widths", "lens_widths"});
  AberrationConfig a;
  const auto which = s.choose_one({"widths", "lens_widths"});
  const std::string key = which == 0 ? "widths" : "lens_widths";
  a.at_lens = which == 1;
  const auto& list = s.at(key);
  if (!list.is_array() || list.empty()) throw ConfigError(s.qualified(key) + ": expected a non-empty array");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto field = s.qualified(key) + "[" + std::to_string(i) + "]";
    a.widths.push_back(Section::to_quantity(list[i], Quantity::length, field));
    require_positive(a.widths.back(), field);
  }
  return a;
}

inline OutputConfig parse_output(const Section& root) {
  OutputConfig out;
  if (!root.has("output")) return out;
  Section s(root.at("output"), "output", {"dir", "format", "prefix"});
  if (s.has("dir")) out.dir = s.string("dir");
  if (s.has("prefix")) out.prefix = s.string("prefix");
  if (s.has("format")) {
    const auto f = s.string("format");
    if (f == "csv")
      out.format = OutputFormat::csv;
    else if (f == "json")
      out.format = OutputFormat::json;
    else if (f == "both")
      out.format = OutputFormat::both;
    else
      throw ConfigError("output.format: unknown format \"" + f + "\" (valid: csv, json, both)");
  }
  return out;
}

inline Experiment parse_experiment(const Section& root) {
  const auto name = root.string("experiment");
  for (auto e : {Experiment::disperse, Experiment::lens, Experiment::image, Experiment::sweep, Experiment::resolution})
    if (to_string(e) == name) return e;
  throw ConfigError("experiment: unknown experiment \"" + name + "\" (valid: disperse, lens, image, sweep, resolution)");
}

}  // namespace detail

/// Validates a parsed document. Sections required by the chosen experiment
/// must be present; sections it does not use are still validated if given.
inline ScenarioConfig parse_config(const Json& doc) {
  using detail::Section;
  const Json empty = Json::object();
  const Json& node = doc.is_null() ? empty : doc;
  Section root(node, "", {"particle", "carrier", "grid", "input", "lens", "imaging", "resolution", "aberration",
                          "experiment", "output"});
  ScenarioConfig cfg;
  cfg.source = node;
  cfg.particle = detail::parse_particle(root);
  cfg.experiment = detail::parse_experiment(root);
  cfg.carrier = detail::parse_carrier(root);
  cfg.grid = detail::parse_grid(root);
  cfg.output = detail::parse_output(root);

  const auto e = cfg.experiment;
  const bool needs_input = e == Experiment::disperse || e == Experiment::image;
  const bool needs_lens = e != Experiment::disperse;
  const bool needs_imaging = e != Experiment::lens;

  if (needs_input || root.has("input")) cfg.input = detail::parse_input(root.at("input"));
  if (needs_lens || root.has("lens")) cfg.lens = detail::parse_lens(root.at("lens"));
  if (needs_imaging || root.has("imaging")) cfg.imaging = detail::parse_imaging(root.at("imaging"));
  if (e == Experiment::resolution || root.has("resolution"))
    cfg.resolution = detail::parse_resolution(root.at("resolution"));
  if (e == Experiment::sweep || root.has("aberration")) cfg.aberration = detail::parse_aberration(root.at("aberration"));

  if (cfg.carrier.kind == CarrierConfig::Kind::match_lens && !cfg.lens)
    throw ConfigError("carrier.match_lens: requires a lens section");
  if (cfg.lens && cfg.particle.charge == 0.0) throw ConfigError("particle.charge: must be nonzero for a lens");
  if (e == Experiment::disperse && cfg.imaging && cfg.imaging->kind == ImagingConfig::Kind::magnification)
    throw ConfigError("imaging.magnification: the disperse experiment needs imaging.L1 or imaging.tau1");
  if (e != Experiment::lens && !cfg.grid.xi_span && !cfg.input)
    throw ConfigError("missing required field: grid.xi_span (no input section to size the window from)");
  return cfg;
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw IoError("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << file.rdbuf();
  const auto text = buffer.str();
  Json doc;
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    doc = Json::object();
  } else {
    try {
      doc = Json::parse(text);
    } catch (const Json::parse_error& err) {
      throw ConfigError(path + ": " + err.what());
    }
  }
  return parse_config(doc);
}

}  // namespace matterwave::io
