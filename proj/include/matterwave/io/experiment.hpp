#pragma once

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "matterwave/io/config.hpp"
#include "matterwave/matterwave.hpp"

namespace matterwave::io {

using OrderedJson = nlohmann::ordered_json;

/// A validated config resolved into natural-unit library objects.
struct Scenario {
  ScenarioConfig config;
  PhysicalContext si_ctx;
  PhysicalContext ctx;
  CarrierState carrier;
  std::optional<LensSpec> lens;
  std::optional<Grid> grid;
  std::optional<ImagingDesign> design;
  double flight_time = 0.0;  // disperse experiment only
};

namespace detail {

inline double length_unit(const ScenarioConfig& cfg, const PhysicalContext& si_ctx) {
  if (cfg.input) return cfg.input->sigma;
  if (cfg.resolution) return cfg.resolution->probe_width;
  if (cfg.lens) {
    const double v_p = cfg.lens->v_p ? *cfg.lens->v_p : si::c_light / *cfg.lens->slow_factor;
    return v_p / cfg.lens->omega_m;
  }
  switch (cfg.carrier.kind) {
    case CarrierConfig::Kind::kinetic_energy: return si_ctx.hbar() / std::sqrt(2.0 * si_ctx.mass() * cfg.carrier.value);
    case CarrierConfig::Kind::k0: return 1.0 / cfg.carrier.value;
    case CarrierConfig::Kind::group_velocity: return si_ctx.hbar() / (si_ctx.mass() * cfg.carrier.value);
    case CarrierConfig::Kind::match_lens: break;
  }
  throw ConfigError("cannot choose a length scale");
}

inline CarrierState make_carrier(const ScenarioConfig& cfg, const PhysicalContext& ctx) {
  const auto& c = cfg.carrier;
  switch (c.kind) {
    case CarrierConfig::Kind::kinetic_energy:
      return CarrierState::from_kinetic_energy(ctx, ctx.from_si(c.value, dim::energy));
    case CarrierConfig::Kind::k0: return CarrierState::from_wavenumber(ctx, ctx.from_si(c.value, dim::wavenumber));
    case CarrierConfig::Kind::group_velocity:
      return CarrierState::from_group_velocity(ctx, ctx.from_si(c.value, dim::velocity));
    case CarrierConfig::Kind::match_lens: break;
  }
  // Same expression build_lens uses for v_p, so the match is exact.
  const auto& lens = *cfg.lens;
  const double v_p = lens.slow_factor ? ctx.c_light() / *lens.slow_factor : ctx.from_si(*lens.v_p, dim::velocity);
  return CarrierState::from_group_velocity(ctx, v_p);
}

inline Aperture make_aperture(const ApertureConfig& ap, const LensSpec& lens, const PhysicalContext& ctx) {
  switch (ap.kind) {
    case ApertureConfig::Kind::none: return Aperture::none();
    case ApertureConfig::Kind::lens_default: return Aperture::lens_default(lens);
    case ApertureConfig::Kind::hard: return Aperture::hard(ctx.from_si(ap.width, dim::length));
    case ApertureConfig::Kind::raised_cosine:
      return Aperture::raised_cosine(ctx.from_si(ap.width, dim::length), ap.rolloff);
  }
  return Aperture::none();
}

inline std::string timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Collects named quantities once and emits them in SI and natural units.
class QuantityTable {
 public:
  explicit QuantityTable(const PhysicalContext& ctx) : ctx_(ctx) {}

  void add(const std::string& name, double natural, Dimension d = dim::dimensionless) {
    rows_.push_back({name, natural, d});
  }
  void add(const std::string& name, const std::optional<double>& natural, Dimension d = dim::dimensionless) {
    if (natural) add(name, *natural, d);
    else rows_.push_back({name, std::nullopt, d});
  }

  OrderedJson si() const { return emit(true); }
  OrderedJson natural() const { return emit(false); }

 private:
  struct Row {
    std::string name;
    std::optional<double> value;
    Dimension d;
  };

  OrderedJson emit(bool to_si) const {
    OrderedJson out = OrderedJson::object();
    for (const auto& r : rows_) {
      if (!r.value || !std::isfinite(*r.value)) {
        out[r.name] = nullptr;
        continue;
      }
      out[r.name] = to_si ? ctx_.to_si(*r.value, r.d) : *r.value;
    }
    return out;
  }

  const PhysicalContext& ctx_;
  std::vector<Row> rows_;
};

}  // namespace detail

inline Scenario resolve(const ScenarioConfig& cfg) {
  const auto si_ctx = PhysicalContext::si(cfg.particle.mass, cfg.particle.charge);
  const auto ctx = si_ctx.to_natural(detail::length_unit(cfg, si_ctx));
  const auto carrier = detail::make_carrier(cfg, ctx);
  Scenario sc{cfg, si_ctx, ctx, carrier, std::nullopt, std::nullopt, std::nullopt, 0.0};

  if (cfg.lens) {
    const auto& l = *cfg.lens;
    std::variant<PhaseVelocity, SlowFactor> velocity = SlowFactor{0.0};
    if (l.slow_factor)
      velocity = SlowFactor{*l.slow_factor};
    else
      velocity = PhaseVelocity{ctx.from_si(*l.v_p, dim::velocity)};
    sc.lens = build_lens(ctx.from_si(l.E0, dim::electric_field), ctx.from_si(l.omega_m, dim::angular_frequency),
                         velocity, ctx.from_si(l.L, dim::length), ctx, carrier, l.theta);
  }

  if (cfg.experiment != Experiment::lens || cfg.grid.xi_span || cfg.input) {
    const double span =
        cfg.grid.xi_span ? ctx.from_si(*cfg.grid.xi_span, dim::length) : 128.0 * ctx.from_si(cfg.input->sigma, dim::length);
    sc.grid = Grid(cfg.grid.n_points, span);
  }

  if (cfg.imaging) {
    const auto& im = *cfg.imaging;
    if (cfg.experiment == Experiment::disperse) {
      sc.flight_time = im.kind == ImagingConfig::Kind::tau1 ? ctx.from_si(im.value, dim::time)
                                                            : ctx.from_si(im.value, dim::length) / carrier.v_group();
      if (sc.flight_time < 0.0) throw ConfigError("imaging: flight time must be non-negative");
    } else {
      if (!sc.lens) throw ConfigError("imaging: requires a lens section");
      const auto design = lens_design(*sc.lens);
      if (!design) throw InvalidArgument("imaging: the lens imprints no focusing phase (E0 = 0?)");
      const double f = design->focal_length;
      switch (im.kind) {
        case ImagingConfig::Kind::L1:
          sc.design = solve_imaging(ctx.from_si(im.value, dim::length), f, ctx, carrier);
          break;
        case ImagingConfig::Kind::tau1:
          sc.design = solve_imaging(carrier.v_group() * ctx.from_si(im.value, dim::time), f, ctx, carrier);
          break;
        case ImagingConfig::Kind::magnification:
          sc.design = design_for_magnification(im.value, f, ctx, carrier);
          break;
      }
    }
  }
  return sc;
}

/// Derived quantities echoed back, all SI.
inline OrderedJson provenance(const Scenario& sc) {
  const auto& ctx = sc.ctx;
  OrderedJson p;
  p["particle"] = {{"species", sc.config.particle.species.empty() ? "custom" : sc.config.particle.species},
                   {"mass_kg", sc.si_ctx.mass()},
                   {"charge_C", sc.si_ctx.charge()}};
  const auto& c = sc.carrier;
  p["carrier"] = {{"k0_rad_per_m", ctx.to_si(c.k0(), dim::wavenumber)},
                  {"omega0_rad_per_s", ctx.to_si(c.omega0(), dim::angular_frequency)},
                  {"v_group_m_per_s", ctx.to_si(c.v_group(), dim::velocity)},
                  {"v_phase_m_per_s", ctx.to_si(c.v_phase(), dim::velocity)},
                  {"lambda0_m", ctx.to_si(c.lambda0(), dim::length)},
                  {"kinetic_energy_eV", ctx.to_si(c.kinetic_energy(ctx), dim::energy) / si::electron_volt}};
  if (sc.lens) {
    const auto& l = *sc.lens;
    p["lens"] = {{"E0_V_per_m", ctx.to_si(l.E0(), dim::electric_field)},
                 {"omega_m_rad_per_s", ctx.to_si(l.omega_m(), dim::angular_frequency)},
                 {"k_m_rad_per_m", ctx.to_si(l.k_m(), dim::wavenumber)},
                 {"v_p_m_per_s", ctx.to_si(l.v_p(), dim::velocity)},
                 {"n", l.slow_factor()},
                 {"L_m", ctx.to_si(l.L(), dim::length)},
                 {"theta_rad", l.theta()},
                 {"A0_V_s_per_m", ctx.to_si(l.A0(), dim::vector_potential)},
                 {"Phi0_V", ctx.to_si(l.Phi0(), dim::scalar_potential)},
                 {"lambda_m_m", ctx.to_si(l.lambda_m(), dim::length)},
                 {"velocity_matched", l.velocity_matched()},
                 {"mode", sc.config.lens->mode == LensMode::quadratic ? "quadratic" : "full_cosine"}};
  }
  if (sc.grid) {
    p["grid"] = {{"n_points", sc.grid->size()},
                 {"xi_span_m", ctx.to_si(sc.grid->span(), dim::length)},
                 {"xi_step_m", ctx.to_si(sc.grid->xi_step(), dim::length)},
                 {"k_step_rad_per_m", ctx.to_si(sc.grid->k_step(), dim::wavenumber)}};
  }
  if (sc.design) {
    const auto& d = *sc.design;
    p["design"] = {{"L1_m", ctx.to_si(d.L1, dim::length)},
                   {"L2_m", ctx.to_si(d.L2, dim::length)},
                   {"tau1_s", ctx.to_si(d.tau1, dim::time)},
                   {"tau2_s", ctx.to_si(d.tau2, dim::time)},
                   {"coeff_a_m2", ctx.to_si(d.coeff_a, dim::area)},
                   {"coeff_b_m2", ctx.to_si(d.coeff_b, dim::area)},
                   {"coeff_c_m2", ctx.to_si(d.coeff_c, dim::area)},
                   {"virtual_image", d.virtual_image}};
  }
  const auto& u = ctx.units();
  p["natural_units"] = {{"length_m", u.length},
                        {"time_s", u.time},
                        {"mass_kg", u.mass},
                        {"charge_C", u.charge},
                        {"c_light", ctx.c_light()}};
  return p;
}

struct RunResult {
  OrderedJson summary;
  std::vector<std::filesystem::path> files;
};

namespace detail {

class Writer {
 public:
  Writer(std::filesystem::path dir, std::string prefix, OutputFormat format, const PhysicalContext& ctx)
      : dir_(std::move(dir)), prefix_(std::move(prefix)), format_(format), ctx_(ctx) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
  }

  void envelope(const std::string& name, const SampledEnvelope& env) {
    const auto& g = env.grid();
    const auto values = env.values();
    if (format_ != OutputFormat::json) {
      std::string text = "xi,re_psi,im_psi,abs2\n";
      char line[128];
      for (std::size_t j = 0; j < values.size(); ++j) {
        const Complex psi = values[j] * ctx_.to_si(1.0, dim::amplitude);
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g\n", ctx_.to_si(g.xi(j), dim::length), psi.real(),
                      psi.imag(), std::norm(psi));
        text += line;
      }
      write(name + ".csv", text);
    }
    if (format_ != OutputFormat::csv) {
      OrderedJson doc;
      std::vector<double> xi, re, im, abs2;
      for (std::size_t j = 0; j < values.size(); ++j) {
        const Complex psi = values[j] * ctx_.to_si(1.0, dim::amplitude);
        xi.push_back(ctx_.to_si(g.xi(j), dim::length));
        re.push_back(psi.real());
        im.push_back(psi.imag());
        abs2.push_back(std::norm(psi));
      }
      doc["xi"] = xi;
      doc["re_psi"] = re;
      doc["im_psi"] = im;
      doc["abs2"] = abs2;
      write(name + ".json", doc.dump(1) + "\n");
    }
  }

  void table(const std::string& name, const std::vector<std::string>& columns,
             const std::vector<std::vector<double>>& rows) {
    std::string text;
    for (std::size_t i = 0; i < columns.size(); ++i) text += (i ? "," : "") + columns[i];
    text += "\n";
    char cell[40];
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        std::snprintf(cell, sizeof cell, "%s%.17g", i ? "," : "", row[i]);
        text += cell;
      }
      text += "\n";
    }
    write(name + ".csv", text);
  }

  void write(const std::string& name, const std::string& text) {
    const auto path = dir_ / (prefix_ + name);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed: " + path.string());
    files_.push_back(path);
  }

  const std::vector<std::filesystem::path>& files() const { return files_; }

 private:
  std::filesystem::path dir_;
  std::string prefix_;
  OutputFormat format_;
  const PhysicalContext& ctx_;
  std::vector<std::filesystem::path> files_;
};

inline SampledEnvelope make_input(const Scenario& sc) {
  const auto& in = *sc.config.input;
  const auto& ctx = sc.ctx;
  const double sigma = ctx.from_si(in.sigma, dim::length);
  if (in.kind == InputConfig::Kind::gaussian)
    return make_gaussian(*sc.grid, sc.carrier, ctx.from_si(in.center, dim::length), sigma,
                         ctx.from_si(in.chirp, dim::chirp));
  return make_asymmetric_pair(*sc.grid, sc.carrier, ctx.from_si(in.separation, dim::length), sigma, in.amp_ratio);
}

inline void add_warnings(OrderedJson& list, const SampledEnvelope& env) {
  for (const auto& w : env.warnings()) list.push_back(w);
}

inline void lens_quantities(QuantityTable& q, const LensSpec& lens) {
  q.add("Gamma0", lens.Gamma0());
  q.add("delta_phi", lens.delta_phi());
  const auto design = lens_design(lens);
  q.add("focal_length", design ? std::optional(design->focal_length) : std::nullopt, dim::length);
  q.add("f_number", design ? std::optional(design->f_number) : std::nullopt);
  q.add("f_number_kinematic", lens.E0() > 0.0 ? std::optional(f_number_kinematic(lens)) : std::nullopt);
  q.add("f_number_slow_factor", lens.E0() > 0.0 ? std::optional(f_number_slow_factor(lens)) : std::nullopt);
  q.add("aperture", 1.0 / lens.k_m(), dim::length);
  q.add("resolution_input_scale", design ? std::optional(design->resolution_input_scale) : std::nullopt, dim::length);
  q.add("transit_time", lens.transit_time(), dim::time);
}

}  // namespace detail

/// Runs the configured experiment, writes its data files and summary.json into
/// `out_dir`, and returns the summary.
inline RunResult run_experiment(const ScenarioConfig& cfg, const std::filesystem::path& out_dir) {
  const Scenario sc = resolve(cfg);
  const auto& ctx = sc.ctx;
  detail::Writer writer(out_dir, cfg.output.prefix, cfg.output.format, ctx);
  detail::QuantityTable q(ctx);
  OrderedJson warnings = OrderedJson::array();

  if (sc.lens) detail::lens_quantities(q, *sc.lens);
  if (sc.design) {
    q.add("magnification", sc.design->magnification);
    q.add("imaging_residual", imaging_residual(*sc.design));
  }

  switch (cfg.experiment) {
    case Experiment::disperse: {
      const auto env0 = detail::make_input(sc);
      const auto seg = DispersionSegment::from_time(ctx, sc.carrier, sc.flight_time);
      const auto out = propagate(env0, seg, ctx);
      writer.envelope("input", env0);
      writer.envelope("output", out);
      q.add("tau", seg.tau(), dim::time);
      q.add("length", seg.length(), dim::length);
      q.add("coeff", seg.coeff(), dim::area);
      q.add("norm_in", norm(env0));
      q.add("norm_out", norm(out));
      q.add("rms_width_in", rms_width(env0), dim::length);
      q.add("rms_width_out", rms_width(out), dim::length);
      q.add("centroid_out", centroid(out), dim::length);
      if (cfg.input->kind == InputConfig::Kind::gaussian && cfg.input->chirp == 0.0) {
        const auto oracle = analytic_gaussian(*sc.grid, sc.carrier, ctx, seg.tau(), ctx.from_si(cfg.input->sigma, dim::length),
                                              ctx.from_si(cfg.input->center, dim::length));
        q.add("fidelity_vs_closed_form", fidelity(out, oracle));
      }
      q.add("elapsed_time", out.elapsed_time(), dim::time);
      q.add("global_phase", out.global_phase());
      detail::add_warnings(warnings, out);
      break;
    }
    case Experiment::lens: {
      const auto& lens = *sc.lens;
      const auto design = lens_design(lens);
      std::vector<std::vector<double>> rows;
      const int samples = 257;
      for (int i = 0; i < samples; ++i) {
        const double xi = lens.lambda_m() * (static_cast<double>(i) / (samples - 1) - 0.5);
        const double quad = design ? accumulated_phase(lens, 0.0) - sc.carrier.k0() * xi * xi / (2.0 * design->focal_length)
                                   : accumulated_phase(lens, 0.0);
        rows.push_back({ctx.to_si(xi, dim::length), accumulated_phase(lens, xi), quad,
                        ctx.to_si(restoring_force(lens, xi), dim::force)});
      }
      writer.table("lens_phase", {"xi", "gamma_full", "gamma_quadratic", "force"}, rows);
      break;
    }
    case Experiment::image: {
      const auto env0 = detail::make_input(sc);
      const auto& lens_cfg = *cfg.lens;
      const auto out = run_pipeline(env0, *sc.design, *sc.lens, ctx,
                                    PipelineOptions{lens_cfg.mode, detail::make_aperture(lens_cfg.aperture, *sc.lens, ctx)});
      const auto reference = rescale(env0, sc.design->magnification);
      const auto est = estimate_magnification(env0, out);
      writer.envelope("input", env0);
      writer.envelope("output", out);
      writer.envelope("reference", reference);
      q.add("fidelity", fidelity(out, reference));
      q.add("fidelity_curvature_corrected", fidelity(out, image_reference(env0, *sc.design)));
      q.add("estimated_magnification_abs", est.magnitude);
      q.add("estimated_magnification", est.sign ? std::optional(est.value()) : std::nullopt);
      q.add("skewness_in", skewness(env0));
      q.add("skewness_out", skewness(out));
      q.add("norm_out", norm(out));
      q.add("elapsed_time", out.elapsed_time(), dim::time);
      q.add("global_phase", out.global_phase());
      detail::add_warnings(warnings, out);
      break;
    }
    case Experiment::resolution: {
      const auto aperture = detail::make_aperture(cfg.resolution->aperture, *sc.lens, ctx);
      const double probe_width = ctx.from_si(cfg.resolution->probe_width, dim::length);
      const auto res = resolution_experiment(*sc.grid, *sc.design, *sc.lens, ctx, probe_width, aperture, cfg.lens->mode);
      const auto probe = make_gaussian(*sc.grid, sc.carrier, 0.0, probe_width);
      const auto out = run_pipeline(probe, *sc.design, *sc.lens, ctx, PipelineOptions{cfg.lens->mode, aperture});
      writer.envelope("probe", probe);
      writer.envelope("output", out);
      q.add("aperture_width", aperture.kind == Aperture::Kind::none ? std::nullopt : std::optional(aperture.width),
            dim::length);
      q.add("probe_fwhm", res.probe_fwhm, dim::length);
      q.add("output_fwhm", res.output_fwhm, dim::length);
      q.add("resolution", res.input_referred_blur, dim::length);
      q.add("resolution_predicted", res.predicted, dim::length);
      q.add("resolution_ratio", res.ratio);
      detail::add_warnings(warnings, out);
      break;
    }
    case Experiment::sweep: {
      std::vector<double> widths;
      for (const double w : cfg.aberration->widths) {
        const double natural = ctx.from_si(w, dim::length);
        widths.push_back(cfg.aberration->at_lens ? input_width_for_lens_width(*sc.design, natural) : natural);
      }
      const auto rows = aberration_sweep(*sc.grid, *sc.design, *sc.lens, ctx, widths);
      std::vector<std::vector<double>> table;
      bool monotone = true;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        table.push_back({ctx.to_si(rows[i].input_width, dim::length), ctx.to_si(rows[i].lens_width, dim::length),
                         rows[i].lens_width * sc.lens->k_m(), rows[i].fidelity});
        if (i > 0 && rows[i].lens_width > rows[i - 1].lens_width && rows[i].fidelity > rows[i - 1].fidelity + 1e-4)
          monotone = false;
      }
      writer.table("aberration", {"input_width", "lens_width", "lens_width_km", "fidelity"}, table);
      q.add("fidelity_min", rows.empty() ? std::nullopt : std::optional(rows.back().fidelity));
      q.add("fidelity_non_increasing", monotone ? 1.0 : 0.0);
      break;
    }
  }

  OrderedJson summary;
  summary["schema"] = "matterwave-summary/1";
  summary["experiment"] = to_string(cfg.experiment);
  summary["si"] = q.si();
  summary["natural"] = q.natural();
  summary["provenance"] = provenance(sc);
  summary["warnings"] = warnings;
  OrderedJson files = OrderedJson::array();
  for (const auto& f : writer.files()) files.push_back(f.filename().string());
  summary["files"] = files;
  summary["config"] = OrderedJson::parse(cfg.source.dump());
  summary["metadata"] = {{"generated_at", detail::timestamp_utc()}};
  writer.write("summary.json", summary.dump(2) + "\n");
  return RunResult{summary, writer.files()};
}

}  // namespace matterwave::io
