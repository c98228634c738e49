#include "twocolor/cli.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "twocolor/analysis.hpp"
#include "twocolor/io.hpp"
#include "twocolor/numerics.hpp"
#include "twocolor/phase.hpp"
#include "twocolor/polarization.hpp"
#include "twocolor/qpm.hpp"
#include "twocolor/simulate.hpp"

namespace twocolor {

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

struct GlobalOpts {
  std::string data_dir_flag;
  bool error_json = false;
};

struct Context {
  std::filesystem::path data_dir;
  MaterialRegistry registry;
  DeviceProfile profile;
};

Context load_context(const GlobalOpts& g) {
  std::optional<std::filesystem::path> flag;
  if (!g.data_dir_flag.empty()) flag = g.data_dir_flag;
  Context ctx;
  ctx.data_dir = resolve_data_dir(flag);
  ctx.registry = load_registry(ctx.data_dir);
  ctx.profile = load_device_profile(ctx.data_dir);
  return ctx;
}

// Elements the first-created pair traverses alone: the crystal return pass
// (on the pair-transit axis) and the double-passed rhomb. The second pair
// shares neither, so these enter the which-path phase with their full index.
OpticalStack first_pass_stack(const Context& ctx, double crystal_temp_c) {
  const auto& p = ctx.profile;
  OpticalElement crystal;
  crystal.label = "crystal";
  crystal.index_H = &ctx.registry.get(
      p.crystal_material, axis_from_name(p.pair_transit_axis),
      p.crystal_source);
  crystal.length_mm = p.crystal_length_mm;
  crystal.temperature_c = crystal_temp_c;
  crystal.transit_count = 1;

  OpticalElement rhomb;
  rhomb.label = "rhomb";
  rhomb.index_H = &ctx.registry.get(p.rhomb_material, Axis::isotropic,
                                    p.rhomb_source);
  rhomb.length_mm = p.rhomb_length_mm;
  rhomb.temperature_c = p.rhomb_temperature_c;
  rhomb.transit_count = p.rhomb_transits;

  OpticalStack stack;
  stack.elements = {crystal, rhomb};
  return stack;
}

OpticalElement compensator_element(const Context& ctx,
                                   const std::string& source,
                                   double length_mm, double temperature_c) {
  const auto& p = ctx.profile;
  OpticalElement comp;
  comp.label = "compensator";
  comp.index_H =
      &ctx.registry.get(p.compensator_material, Axis::ordinary, source);
  comp.index_V =
      &ctx.registry.get(p.compensator_material, Axis::extraordinary, source);
  comp.length_mm = length_mm;
  comp.temperature_c = temperature_c;
  comp.transit_count = 1;
  return comp;
}

QpmConfig qpm_config(const Context& ctx, double period_um, double pump_nm) {
  const auto& p = ctx.profile;
  QpmConfig q;
  q.pump_nm = pump_nm > 0.0 ? pump_nm : p.pump_nm;
  q.poling_period_um =
      period_um > 0.0 ? period_um : p.poling_period_effective_um;
  q.qpm_order = p.qpm_order;
  q.crystal = &ctx.registry.get(p.crystal_material,
                                axis_from_name(p.qpm_axis), p.crystal_source);
  q.t_min_c = p.oven_min_c;
  q.t_max_c = p.oven_max_c;
  return q;
}

// Crystal operating temperature: the phase-matching temperature for the
// requested signal, unless the user pinned one.
double crystal_temperature(const Context& ctx, double signal_nm,
                           double override_c) {
  if (override_c > -273.15) return override_c;
  return temperature_for_signal(qpm_config(ctx, -1.0, -1.0), signal_nm);
}

void emit_error(const Error& e, bool error_json) {
  if (error_json) {
    const nlohmann::json j{
        {"error", {{"type", e.kind()}, {"message", e.what()}}}};
    std::cout << j.dump() << "\n";
  } else {
    std::cerr << "error (" << e.kind() << "): " << e.what() << "\n";
  }
}

// ---------------------------------------------------------------- materials

int cmd_materials_list(const GlobalOpts& g) {
  const Context ctx = load_context(g);
  std::cout << "loaded from " << (ctx.data_dir / "materials").string()
            << "\n";
  for (const auto* m : ctx.registry.models()) {
    const auto [lo, hi] = m->validity_nm();
    std::cout << "  " << m->display_name() << "  " << form_name(m->form())
              << "  " << fixed(lo, 0) << "-" << fixed(hi, 0) << " nm"
              << (m->temperature_dependent() ? "  T-dependent" : "") << "\n";
  }
  std::cout << "files:\n";
  for (const auto& f : ctx.registry.files()) {
    char hex[32];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(f.content_hash));
    std::cout << "  " << f.path.filename().string() << "  fnv1a64=" << hex
              << "  anchors=" << f.anchors.size() << "\n";
  }
  return 0;
}

int cmd_materials_validate(const GlobalOpts& g) {
  const Context ctx = load_context(g);
  const auto checks = ctx.registry.check_anchors();
  int failures = 0;
  for (const auto& c : checks) {
    const std::string axis =
        c.anchor.axis ? axis_name(*c.anchor.axis) : std::string("-");
    std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.file << "  "
              << c.anchor.kind << " " << axis << " @ "
              << fixed(c.anchor.wavelength_nm, 1) << " nm, "
              << fixed(c.anchor.temperature_c, 1) << " C: computed "
              << fixed(c.computed, 9) << ", expected "
              << fixed(c.anchor.value, 9) << " +- " << sci(c.anchor.tolerance)
              << "\n";
    if (!c.pass) ++failures;
  }
  std::cout << checks.size() - failures << "/" << checks.size()
            << " anchors pass\n";
  return failures == 0 ? 0 : 1;
}

// ------------------------------------------------------------------ design

struct DesignOpts {
  double signal_nm = 0.0;       // 0: profile default
  double idler_nm = 0.0;        // 0: profile pair or energy partner
  std::string source = "all";
  std::string objective = "pair";
  double temperature_c = -1000.0;       // crystal; sentinel: derive from QPM
  double comp_temperature_c = -1000.0;  // sentinel: profile default
  bool json = false;
};

FlatPhaseObjective parse_objective(const std::string& s) {
  if (s == "pair") return FlatPhaseObjective::energy_conserving_pair;
  if (s == "per-photon") return FlatPhaseObjective::per_photon_least_squares;
  throw ConfigError("unknown objective '" + s +
                    "' (expected pair or per-photon)");
}

nlohmann::json design_to_json(const CompensationDesign& d,
                              const SlabRounding& slab, double dn_s,
                              double dn_i) {
  nlohmann::json slabs = nlohmann::json::array();
  for (double s : slab.slabs) slabs.push_back(s);
  return nlohmann::json{
      {"source", d.source_label},
      {"signal_nm", d.signal_nm},
      {"idler_nm", d.idler_nm},
      {"pump_nm", d.pump_nm},
      {"birefringence_signal", dn_s},
      {"birefringence_idler", dn_i},
      {"optimal_length_mm", d.optimal_length_mm},
      {"plateau_signal_nm", d.plateau_signal_nm},
      {"plateau_idler_nm", d.plateau_idler_nm},
      {"residual_slope_signal_rad_per_um", d.residual_slope_signal},
      {"residual_slope_idler_rad_per_um", d.residual_slope_idler},
      {"residual_pair_slope_rad_per_um", d.residual_pair_slope},
      {"objective", d.objective == FlatPhaseObjective::energy_conserving_pair
                        ? "pair"
                        : "per-photon"},
      {"slab_sum_mm", slab.length_mm},
      {"slab_residual_mm", slab.residual_mm},
      {"slabs_mm", slabs}};
}

int run_design_rows(const Context& ctx, const DesignOpts& o,
                    std::ostream& out) {
  const auto& p = ctx.profile;
  const double signal = o.signal_nm > 0.0 ? o.signal_nm : p.signal_nm;
  double idler = o.idler_nm;
  if (idler <= 0.0)
    idler = (signal == p.signal_nm) ? p.idler_nm
                                    : partner_wavelength(p.pump_nm, signal);
  const double t_crystal = crystal_temperature(ctx, signal, o.temperature_c);
  const double t_comp =
      o.comp_temperature_c > -273.15 ? o.comp_temperature_c
                                     : p.compensator_temperature_c;
  const FlatPhaseObjective objective = parse_objective(o.objective);

  std::vector<std::string> sources;
  if (o.source == "all")
    sources = ctx.registry.source_labels(p.compensator_material);
  else
    sources.push_back(o.source);
  if (sources.empty())
    throw LookupError("no dispersion sources loaded for " +
                      p.compensator_material);

  const OpticalStack first_pass = first_pass_stack(ctx, t_crystal);
  nlohmann::json rows = nlohmann::json::array();

  if (!o.json) {
    out << "pair: signal " << fixed(signal, 3) << " nm, idler "
        << fixed(idler, 3) << " nm (pump " << fixed(pump_from_pair(signal, idler), 4)
        << " nm), crystal at " << fixed(t_crystal, 2) << " C, compensator at "
        << fixed(t_comp, 2) << " C, objective " << o.objective << "\n";
    out << "source        dn(s)       dn(i)       L_mm       plateau_s_nm  "
           "plateau_i_nm  pair_slope_rad_per_um  slab_sum_mm\n";
  }
  for (const auto& source : sources) {
    const auto& comp_o =
        ctx.registry.get(p.compensator_material, Axis::ordinary, source);
    const auto& comp_e =
        ctx.registry.get(p.compensator_material, Axis::extraordinary, source);
    const CompensationDesign d = optimal_compensator_length(
        first_pass, comp_o, comp_e, signal, idler, t_comp, objective);
    const double dn_s = comp_e.index(signal, t_comp) - comp_o.index(signal, t_comp);
    const double dn_i = comp_e.index(idler, t_comp) - comp_o.index(idler, t_comp);
    const SlabRounding slab =
        round_to_slab_stock(d.optimal_length_mm, p.slab_stock_mm);
    if (o.json) {
      rows.push_back(design_to_json(d, slab, dn_s, dn_i));
    } else {
      char line[256];
      std::snprintf(line, sizeof(line),
                    "%-12s  %.6f    %.6f    %-9.3f  %-12.3f  %-12.3f  "
                    "%-21.3e  %.1f",
                    d.source_label.c_str(), dn_s, dn_i, d.optimal_length_mm,
                    d.plateau_signal_nm, d.plateau_idler_nm,
                    d.residual_pair_slope, slab.length_mm);
      out << line << "\n";
    }
  }
  if (o.json) out << rows.dump(2) << "\n";
  return 0;
}

int cmd_design(const GlobalOpts& g, const DesignOpts& o) {
  const Context ctx = load_context(g);
  return run_design_rows(ctx, o, std::cout);
}

// ----------------------------------------------------------- phase-profile

struct ProfileOpts {
  double length_mm = -1.0;  // sentinel: profile installed length
  std::string source;       // empty: profile default
  std::string pairing = "pair";
  double lo_nm = 830.0;
  double hi_nm = 1380.0;
  double step_nm = 1.0;
  double ref_lambda_nm = -1.0;  // sentinel: profile signal
  double temperature_c = -1000.0;
  std::string out;
};

int cmd_phase_profile(const GlobalOpts& g, const ProfileOpts& o) {
  const Context ctx = load_context(g);
  const auto& p = ctx.profile;
  if (o.out.empty()) throw ConfigError("phase-profile needs --out <csv>");
  if (!(o.step_nm > 0.0) || !(o.hi_nm > o.lo_nm))
    throw ConfigError("phase-profile needs lo < hi and step > 0");
  const double length =
      o.length_mm >= 0.0 ? o.length_mm : p.installed_length_mm;
  const std::string source =
      o.source.empty() ? p.compensator_source : o.source;
  const double t_crystal =
      crystal_temperature(ctx, p.signal_nm, o.temperature_c);
  const double ref = o.ref_lambda_nm > 0.0 ? o.ref_lambda_nm : p.signal_nm;
  PairingMode mode;
  if (o.pairing == "pair")
    mode = PairingMode::energy_conserving_pair;
  else if (o.pairing == "single")
    mode = PairingMode::single_photon;
  else
    throw ConfigError("unknown pairing '" + o.pairing +
                      "' (expected pair or single)");

  OpticalStack stack = first_pass_stack(ctx, t_crystal);
  stack.elements.push_back(compensator_element(
      ctx, source, length, p.compensator_temperature_c));

  std::vector<double> grid;
  for (double l = o.lo_nm; l <= o.hi_nm + 1e-9; l += o.step_nm)
    grid.push_back(l);
  const auto profile = phase_profile(stack, grid, mode, p.pump_nm, ref);

  nlohmann::json config{{"length_mm", length},
                        {"source", source},
                        {"pairing", o.pairing},
                        {"lo_nm", o.lo_nm},
                        {"hi_nm", o.hi_nm},
                        {"step_nm", o.step_nm},
                        {"reference_nm", ref},
                        {"crystal_temperature_c", t_crystal}};
  std::vector<std::vector<double>> rows;
  rows.reserve(profile.size());
  for (const auto& pt : profile) rows.push_back({pt.lambda_nm, pt.phase_rad});
  write_curve_csv(o.out, {"lambda_nm", "phase_rad"}, rows,
                  make_provenance("twocolor phase-profile", config,
                                  ctx.registry));
  std::cout << "wrote " << rows.size() << " points to " << o.out << "\n";
  return 0;
}

// ------------------------------------------------------------ tuning-curve

struct TuningOpts {
  double period_um = -1.0;  // sentinel: profile effective period
  double pump_nm = -1.0;    // sentinel: profile pump
  double t_min_c = 20.0;
  double t_max_c = 160.0;
  double step_c = 1.0;
  std::string out;
};

int cmd_tuning_curve(const GlobalOpts& g, const TuningOpts& o) {
  const Context ctx = load_context(g);
  if (o.out.empty()) throw ConfigError("tuning-curve needs --out <csv>");
  const QpmConfig q = qpm_config(ctx, o.period_um, o.pump_nm);
  const auto curve = tuning_curve(q, o.t_min_c, o.t_max_c, o.step_c);
  nlohmann::json config{{"period_um", q.poling_period_um},
                        {"pump_nm", q.pump_nm},
                        {"order", q.qpm_order},
                        {"t_min_c", o.t_min_c},
                        {"t_max_c", o.t_max_c},
                        {"step_c", o.step_c}};
  std::vector<std::vector<double>> rows;
  rows.reserve(curve.size());
  for (const auto& pt : curve)
    rows.push_back({pt.temperature_c, pt.signal_nm, pt.idler_nm});
  write_curve_csv(o.out, {"temperature_c", "signal_nm", "idler_nm"}, rows,
                  make_provenance("twocolor tuning-curve", config,
                                  ctx.registry));
  std::cout << "wrote " << rows.size() << " points to " << o.out << "\n";
  return 0;
}

// --------------------------------------------------------------- temp-tune

struct TempTuneOpts {
  double slab_mm = -1.0;  // sentinel: profile stabilized length
  std::string source;
  double signal_nm = -1.0;
  double idler_nm = -1.0;
  double temperature_c = -1000.0;  // slab temperature
  bool json = false;
};

int cmd_temp_tune(const GlobalOpts& g, const TempTuneOpts& o) {
  const Context ctx = load_context(g);
  const auto& p = ctx.profile;
  const double slab_mm = o.slab_mm > 0.0 ? o.slab_mm : p.stabilized_length_mm;
  const std::string source =
      o.source.empty() ? p.compensator_source : o.source;
  const double signal = o.signal_nm > 0.0 ? o.signal_nm : p.signal_nm;
  const double idler = o.idler_nm > 0.0 ? o.idler_nm : p.idler_nm;
  const double t_slab = o.temperature_c > -273.15
                            ? o.temperature_c
                            : p.compensator_temperature_c;

  OpticalStack slab;
  slab.elements.push_back(compensator_element(ctx, source, slab_mm, t_slab));
  const PiShift shift = pi_shift_temperature(slab, signal, idler);
  if (o.json) {
    const nlohmann::json j{{"slab_mm", slab_mm},
                           {"source", source},
                           {"signal_nm", signal},
                           {"idler_nm", idler},
                           {"temperature_c", t_slab},
                           {"slope_rad_per_k", shift.slope_rad_per_k},
                           {"pi_shift_c", shift.delta_t_c},
                           {"full_period_c", 2.0 * shift.delta_t_c}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "slab: " << fixed(slab_mm, 3) << " mm "
              << p.compensator_material << "/" << source << " at "
              << fixed(t_slab, 2) << " C\n"
              << "pair: " << fixed(signal, 3) << " / " << fixed(idler, 3)
              << " nm\n"
              << "phase-temperature slope: " << fixed(shift.slope_rad_per_k, 6)
              << " rad/K\n"
              << "pi shift: " << fixed(shift.delta_t_c, 4) << " C\n"
              << "full oscillation period: " << fixed(2.0 * shift.delta_t_c, 4)
              << " C\n";
  }
  return 0;
}

// ---------------------------------------------------------------- simulate

struct SimulateOpts {
  double fidelity_target = -1.0;  // sentinel: profile target
  double gamma = -1.0;
  double jitter_sigma_k = -1.0;
  double phase_rad = 0.0;
  std::string bases = "HV,DA,LR";
  int points = 19;
  double theta_max_deg = 90.0;
  std::uint64_t seed = 42;
  bool noiseless = false;
  std::string out;
  double pair_rate_mcps = -1.0;
  double power_mw = -1.0;
  double efficiency = -1.0;
  double time_s = -1.0;
  double accidentals_cps = -1.0;
};

std::vector<std::string> split_labels(const std::string& csv) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(csv);
  while (std::getline(is, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

SourceConfig counting_config(const Context& ctx, const SimulateOpts& o) {
  SourceConfig c = ctx.profile.counting;
  if (o.pair_rate_mcps > 0.0) c.pair_rate_mcps_per_mw = o.pair_rate_mcps;
  if (o.power_mw > 0.0) c.pump_power_mw = o.power_mw;
  if (o.efficiency > 0.0) c.detection_efficiency_product = o.efficiency;
  if (o.time_s > 0.0) c.integration_time_s = o.time_s;
  if (o.accidentals_cps >= 0.0) c.accidental_rate_cps = o.accidentals_cps;
  return c;
}

// Damping priority: explicit gamma > jitter model > fidelity target.
double resolve_gamma(const Context& ctx, const SimulateOpts& o,
                     std::string& mode) {
  if (o.gamma >= 0.0) {
    mode = "gamma";
    return o.gamma;
  }
  if (o.jitter_sigma_k >= 0.0) {
    mode = "jitter";
    const auto& p = ctx.profile;
    OpticalStack unit;
    unit.elements.push_back(compensator_element(
        ctx, p.compensator_source, 1.0, p.compensator_temperature_c));
    JitterModel jitter;
    jitter.stabilized_length_mm = p.stabilized_length_mm;
    jitter.free_length_mm = p.installed_length_mm - p.stabilized_length_mm;
    jitter.temperature_sigma_k = o.jitter_sigma_k;
    jitter.phase_sensitivity_rad_per_k_mm =
        temperature_phase_slope(unit, p.signal_nm, p.idler_nm);
    return damping_from_jitter(jitter);
  }
  mode = "fidelity-target";
  const double target = o.fidelity_target > 0.0 ? o.fidelity_target
                                                : ctx.profile.fidelity_target;
  return damping_for_fidelity(target);
}

int cmd_simulate(const GlobalOpts& g, const SimulateOpts& o) {
  const Context ctx = load_context(g);
  if (o.out.empty()) throw ConfigError("simulate needs --out <csv>");
  std::string mode;
  const double gamma = resolve_gamma(ctx, o, mode);
  const TwoPhotonState state = make_state(o.phase_rad, gamma);
  const SourceConfig counting = counting_config(ctx, o);
  const auto bases = split_labels(o.bases);
  if (bases.empty()) throw ConfigError("simulate needs at least one basis");

  const auto records = simulate_canonical_sweeps(
      state, bases, o.points, o.theta_max_deg * kPi / 180.0, counting, o.seed,
      o.noiseless);

  nlohmann::json config{{"gamma", gamma},
                        {"gamma_mode", mode},
                        {"bell_phase_rad", o.phase_rad},
                        {"bases", o.bases},
                        {"points", o.points},
                        {"theta_max_deg", o.theta_max_deg},
                        {"seed", o.seed},
                        {"noiseless", o.noiseless},
                        {"pair_rate_mcps_per_mw", counting.pair_rate_mcps_per_mw},
                        {"pump_power_mw", counting.pump_power_mw},
                        {"detection_efficiency_product",
                         counting.detection_efficiency_product},
                        {"integration_time_s", counting.integration_time_s},
                        {"accidental_rate_cps", counting.accidental_rate_cps}};
  write_records_csv(o.out, records,
                    make_provenance("twocolor simulate", config,
                                    ctx.registry));
  std::cout << "wrote " << records.size() << " records to " << o.out
            << " (gamma " << fixed(gamma, 6) << ", seed " << o.seed << ")\n";
  return 0;
}

// ----------------------------------------------------------------- analyze

struct AnalyzeOpts {
  std::string in;
  std::string report;
  int bootstrap = 0;
  std::uint64_t seed = 42;
  bool json = false;
};

int cmd_analyze(const GlobalOpts& g, const AnalyzeOpts& o) {
  const Context ctx = load_context(g);
  if (o.in.empty()) throw ConfigError("analyze needs --in <csv>");
  const auto records = read_records_csv(o.in);
  const FidelityReport report = analyze_records(records);
  std::optional<double> boot;
  if (o.bootstrap > 0)
    boot = bootstrap_uncertainty(records, o.bootstrap, o.seed);

  nlohmann::json config{{"in", o.in},
                        {"bootstrap", o.bootstrap},
                        {"seed", o.seed}};
  const Provenance prov =
      make_provenance("twocolor analyze", config, ctx.registry);
  if (!o.report.empty()) write_report_json(o.report, report, boot, prov);

  if (o.json) {
    std::cout << report_to_json(report, boot).dump(2) << "\n";
    return 0;
  }
  const auto vline = [](const char* name, const BasisVisibility& v) {
    std::cout << name << " = " << fixed(v.value, 6) << " +- "
              << fixed(v.sigma, 6) << "\n";
  };
  vline("V_HV", report.v_hv);
  vline("V_DA", report.v_da);
  vline("V_LR", report.v_lr);
  std::cout << "F = " << fixed(report.fidelity, 6) << " +- "
            << fixed(report.sigma, 6) << "\n";
  if (boot)
    std::cout << "bootstrap sigma_F = " << fixed(*boot, 6) << " ("
              << o.bootstrap << " resamples)\n";
  std::cout << "entangled: " << (report.entangled ? "yes" : "no")
            << " (F - sigma " << (report.entangled ? ">" : "<=")
            << " 0.5)\n";
  if (report.unphysical_warning)
    std::cout << "warning: fidelity outside [0, 1]; fit noise exceeds the "
                 "physical range\n";
  if (!o.report.empty())
    std::cout << "report written to " << o.report << "\n";
  return 0;
}

// --------------------------------------------------------------- reproduce

struct ReproduceOpts {
  std::string target;
  std::string out_dir = ".";
  std::string source = "all";
  std::uint64_t seed = 42;
};

int cmd_reproduce(const GlobalOpts& g, const ReproduceOpts& o) {
  const Context ctx = load_context(g);
  const auto& p = ctx.profile;
  const std::filesystem::path out_dir(o.out_dir);
  if (o.target != "table1" && !std::filesystem::is_directory(out_dir))
    throw ConfigError("output directory not found: " + out_dir.string());

  if (o.target == "table1") {
    // Compensator design lengths and birefringences for every dispersion
    // source of the compensator crystal.
    DesignOpts d;
    d.source = o.source;
    return run_design_rows(ctx, d, std::cout);
  }

  if (o.target == "fig4") {
    // Pair-summed phase profiles for the installed compensator length and
    // the nearest-integer design length.
    for (double length : {p.installed_length_mm, 154.0}) {
      ProfileOpts prof;
      prof.length_mm = length;
      prof.out = (out_dir / ("fig4_phase_profile_" + fixed(length, 0) +
                             "mm.csv"))
                     .string();
      const int rc = cmd_phase_profile(g, prof);
      if (rc != 0) return rc;
    }
    return 0;
  }

  if (o.target == "fig5") {
    // Temperature tuning curve of the poled crystal over the oven range.
    TuningOpts t;
    t.t_min_c = p.oven_min_c;
    t.t_max_c = p.oven_max_c;
    t.step_c = 2.5;
    t.out = (out_dir / "fig5_tuning_curve.csv").string();
    return cmd_tuning_curve(g, t);
  }

  if (o.target == "fig6") {
    // Coincidence oscillation while scanning the stabilized slab temperature.
    OpticalStack slab;
    slab.elements.push_back(compensator_element(ctx, p.compensator_source,
                                                p.stabilized_length_mm,
                                                p.compensator_temperature_c));
    std::vector<double> temps;
    for (double t = 20.0; t <= 28.0 + 1e-9; t += 0.1) temps.push_back(t);
    const double gamma = damping_for_fidelity(p.fidelity_target);
    const auto noisy = simulate_temperature_scan(
        slab, p.signal_nm, p.idler_nm, temps, gamma, p.counting, o.seed,
        false);
    const auto mean = simulate_temperature_scan(
        slab, p.signal_nm, p.idler_nm, temps, gamma, p.counting, o.seed,
        true);
    nlohmann::json config{{"slab_mm", p.stabilized_length_mm},
                          {"source", p.compensator_source},
                          {"gamma", gamma},
                          {"t_min_c", 20.0},
                          {"t_max_c", 28.0},
                          {"step_c", 0.1},
                          {"seed", o.seed}};
    std::vector<std::vector<double>> rows;
    rows.reserve(noisy.size());
    for (std::size_t k = 0; k < noisy.size(); ++k)
      rows.push_back(
          {noisy[k].temperature_c, noisy[k].counts, mean[k].counts});
    const auto path = out_dir / "fig6_temperature_scan.csv";
    write_curve_csv(path, {"temperature_c", "coincidences", "mean"}, rows,
                    make_provenance("twocolor reproduce fig6", config,
                                    ctx.registry));
    std::cout << "wrote " << rows.size() << " points to " << path.string()
              << "\n";
    return 0;
  }

  if (o.target == "fig7") {
    // Polarization-correlation sweeps at the device's fidelity target, then
    // the full analysis of the generated records.
    SimulateOpts sim;
    sim.seed = o.seed;
    sim.out = (out_dir / "fig7_sweeps.csv").string();
    int rc = cmd_simulate(g, sim);
    if (rc != 0) return rc;
    AnalyzeOpts an;
    an.in = sim.out;
    an.report = (out_dir / "fig7_report.json").string();
    an.bootstrap = 200;
    an.seed = o.seed;
    return cmd_analyze(g, an);
  }

  throw ConfigError("unknown reproduce target '" + o.target +
                    "' (expected table1, fig4, fig5, fig6, or fig7)");
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  GlobalOpts g;
  CLI::App app{
      "twocolor: design and verification toolkit for a two-color "
      "polarization-entangled photon-pair source (double-passed poled "
      "crystal with birefringent phase compensation)"};
  app.require_subcommand(1);
  app.add_option("--data-dir", g.data_dir_flag,
                 "material/profile data directory (default: "
                 "$TWOCOLOR_DATA_DIR or the built-in data path)");
  app.add_flag("--error-json", g.error_json,
               "print failures as machine-readable JSON on stdout");

  int rc = 0;

  auto* materials = app.add_subcommand(
      "materials", "inspect and validate the dispersion-model registry");
  materials->require_subcommand(1);
  materials->add_subcommand("list", "list loaded models and data files")
      ->callback([&] { rc = cmd_materials_list(g); });
  materials
      ->add_subcommand("validate",
                       "recompute every data-file anchor and print a "
                       "pass/fail table")
      ->callback([&] { rc = cmd_materials_validate(g); });

  DesignOpts design;
  auto* design_cmd = app.add_subcommand(
      "design",
      "solve for the compensator length that flattens the which-path phase");
  design_cmd->add_option("--signal", design.signal_nm, "signal wavelength, nm");
  design_cmd->add_option("--idler", design.idler_nm,
                         "idler wavelength, nm (default: device pair or the "
                         "energy-conservation partner)");
  design_cmd->add_option("--source", design.source,
                         "compensator dispersion source label, or 'all'");
  design_cmd->add_option("--objective", design.objective,
                         "flatness objective: pair | per-photon");
  design_cmd->add_option("--temperature", design.temperature_c,
                         "crystal temperature, C (default: phase-matching "
                         "temperature for --signal)");
  design_cmd->add_option("--comp-temperature", design.comp_temperature_c,
                         "compensator temperature, C");
  design_cmd->add_flag("--json", design.json, "emit JSON rows");
  design_cmd->callback([&] { rc = cmd_design(g, design); });

  ProfileOpts profile;
  auto* profile_cmd = app.add_subcommand(
      "phase-profile",
      "tabulate the which-path phase across wavelength for a compensator "
      "length");
  profile_cmd->add_option("--length", profile.length_mm,
                          "compensator length, mm (default: installed)");
  profile_cmd->add_option("--source", profile.source,
                          "compensator dispersion source label");
  profile_cmd->add_option("--pairing", profile.pairing,
                          "pair (idler slaved by energy conservation) | "
                          "single (per-photon phase)");
  profile_cmd->add_option("--lo", profile.lo_nm, "grid start, nm");
  profile_cmd->add_option("--hi", profile.hi_nm, "grid end, nm");
  profile_cmd->add_option("--step", profile.step_nm, "grid step, nm");
  profile_cmd->add_option("--ref-lambda", profile.ref_lambda_nm,
                          "wavelength whose phase is subtracted as offset");
  profile_cmd->add_option("--temperature", profile.temperature_c,
                          "crystal temperature, C");
  profile_cmd->add_option("--out", profile.out, "output CSV path");
  profile_cmd->callback([&] { rc = cmd_phase_profile(g, profile); });

  TuningOpts tuning;
  auto* tuning_cmd = app.add_subcommand(
      "tuning-curve",
      "phase-matched signal/idler wavelengths across oven temperature");
  tuning_cmd->add_option("--period", tuning.period_um,
                         "poling period, um (default: device effective "
                         "period)");
  tuning_cmd->add_option("--pump", tuning.pump_nm, "pump wavelength, nm");
  tuning_cmd->add_option("--tmin", tuning.t_min_c, "scan start, C");
  tuning_cmd->add_option("--tmax", tuning.t_max_c, "scan end, C");
  tuning_cmd->add_option("--step", tuning.step_c, "scan step, C");
  tuning_cmd->add_option("--out", tuning.out, "output CSV path");
  tuning_cmd->callback([&] { rc = cmd_tuning_curve(g, tuning); });

  TempTuneOpts temp_tune;
  auto* temp_cmd = app.add_subcommand(
      "temp-tune",
      "thermo-optic phase slope and pi-shift temperature of a compensator "
      "slab");
  temp_cmd->add_option("--slab", temp_tune.slab_mm,
                       "slab length, mm (default: stabilized section)");
  temp_cmd->add_option("--source", temp_tune.source,
                       "compensator dispersion source label");
  temp_cmd->add_option("--signal", temp_tune.signal_nm, "signal wavelength, nm");
  temp_cmd->add_option("--idler", temp_tune.idler_nm, "idler wavelength, nm");
  temp_cmd->add_option("--temperature", temp_tune.temperature_c,
                       "slab temperature, C");
  temp_cmd->add_flag("--json", temp_tune.json, "emit JSON");
  temp_cmd->callback([&] { rc = cmd_temp_tune(g, temp_tune); });

  SimulateOpts sim;
  auto* sim_cmd = app.add_subcommand(
      "simulate",
      "generate Poisson coincidence-count sweeps for a damped Bell pair");
  sim_cmd->add_option("--fidelity-target", sim.fidelity_target,
                      "set damping from a target fidelity (gamma = 2F - 1)");
  sim_cmd->add_option("--gamma", sim.gamma,
                      "off-diagonal damping in [0, 1] (overrides targets)");
  sim_cmd->add_option("--jitter-sigma-k", sim.jitter_sigma_k,
                      "derive damping from compensator temperature jitter "
                      "of this sigma, K");
  sim_cmd->add_option("--phase-rad", sim.phase_rad, "Bell phase, rad");
  sim_cmd->add_option("--bases", sim.bases,
                      "comma list of sweep bases among HV, DA, LR");
  sim_cmd->add_option("--points", sim.points, "points per sweep");
  sim_cmd->add_option("--theta-max", sim.theta_max_deg,
                      "signal wave-plate sweep end, deg");
  sim_cmd->add_option("--seed", sim.seed, "RNG seed");
  sim_cmd->add_flag("--noiseless", sim.noiseless,
                    "emit exact Poisson means instead of samples");
  sim_cmd->add_option("--out", sim.out, "output records CSV path");
  sim_cmd->add_option("--pair-rate-mcps", sim.pair_rate_mcps,
                      "generated pair rate, Mcps per mW");
  sim_cmd->add_option("--power-mw", sim.power_mw, "pump power, mW");
  sim_cmd->add_option("--efficiency", sim.efficiency,
                      "pair detection efficiency product");
  sim_cmd->add_option("--time-s", sim.time_s, "integration time per point, s");
  sim_cmd->add_option("--accidentals-cps", sim.accidentals_cps,
                      "accidental coincidence rate, counts/s");
  sim_cmd->callback([&] { rc = cmd_simulate(g, sim); });

  AnalyzeOpts analyze;
  auto* analyze_cmd = app.add_subcommand(
      "analyze",
      "fit recorded sweeps, combine visibilities, and report fidelity");
  analyze_cmd->add_option("--in", analyze.in, "input records CSV");
  analyze_cmd->add_option("--report", analyze.report, "output report JSON");
  analyze_cmd->add_option("--bootstrap", analyze.bootstrap,
                          "parametric bootstrap resamples (0 = off)");
  analyze_cmd->add_option("--seed", analyze.seed, "bootstrap RNG seed");
  analyze_cmd->add_flag("--json", analyze.json,
                        "print the full report JSON to stdout");
  analyze_cmd->callback([&] { rc = cmd_analyze(g, analyze); });

  ReproduceOpts repro;
  auto* repro_cmd = app.add_subcommand(
      "reproduce",
      "regenerate the reference design tables and measurement curves");
  repro_cmd->add_option("target", repro.target,
                        "table1 (compensator designs) | fig4 (phase "
                        "profiles) | fig5 (tuning curve) | fig6 (slab "
                        "temperature scan) | fig7 (correlation sweeps + "
                        "analysis)")
      ->required();
  repro_cmd->add_option("--out-dir", repro.out_dir, "output directory");
  repro_cmd->add_option("--source", repro.source,
                        "dispersion source label for table1, or 'all'");
  repro_cmd->add_option("--seed", repro.seed, "RNG seed for fig6/fig7");
  repro_cmd->callback([&] { rc = cmd_reproduce(g, repro); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the parse failure
    return 2;
  } catch (const ConfigError& e) {
    emit_error(e, g.error_json);
    return 2;
  } catch (const Error& e) {
    emit_error(e, g.error_json);
    return 1;
  } catch (const std::exception& e) {
    const Error wrapped(std::string("internal: ") + e.what());
    emit_error(wrapped, g.error_json);
    return 1;
  }
  return rc;
}

}  // namespace twocolor
