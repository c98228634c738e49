#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "twocolor/io.hpp"
#include "twocolor/numerics.hpp"
#include "twocolor/simulate.hpp"

using namespace twocolor;

namespace {

const MaterialRegistry& registry() {
  static MaterialRegistry reg = load_registry(resolve_data_dir({}));
  return reg;
}

constexpr double kSignal = 894.3;
constexpr double kIdler = 1313.1;

SourceConfig source() {
  SourceConfig cfg;  // defaults mirror the installed device
  return cfg;
}

OpticalStack compensator_slab(double length_mm) {
  OpticalElement e;
  e.label = "compensator";
  e.index_H = &registry().get("yvo4", Axis::ordinary, "zelmon");
  e.index_V = &registry().get("yvo4", Axis::extraordinary, "zelmon");
  e.length_mm = length_mm;
  e.temperature_c = 24.5;
  OpticalStack s;
  s.elements = {e};
  return s;
}

bool same_record(const CountRecord& a, const CountRecord& b) {
  return a.basis_label == b.basis_label &&
         a.hwp_signal_rad == b.hwp_signal_rad &&
         a.hwp_idler_rad == b.hwp_idler_rad && a.qwp_signal == b.qwp_signal &&
         a.qwp_idler == b.qwp_idler && a.counts == b.counts &&
         a.seed == b.seed;
}

}  // namespace

TEST_CASE("source configuration and detected rate") {
  SourceConfig cfg = source();
  CHECK_NOTHROW(cfg.validate());
  // 5.8e6 pairs/s/mW * 1 mW * 5e-5 detection product = 290 detected cps.
  CHECK(cfg.detected_rate_cps() == doctest::Approx(290.0).epsilon(1e-12));
  cfg.pump_power_mw = 2.0;
  CHECK(cfg.detected_rate_cps() == doctest::Approx(580.0).epsilon(1e-12));

  SourceConfig bad = source();
  bad.pair_rate_mcps_per_mw = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = source();
  bad.detection_efficiency_product = 1.5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = source();
  bad.integration_time_s = -1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = source();
  bad.accidental_rate_cps = -0.1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("gaussian phase averaging algebra") {
  for (double sigma : {0.0, 0.3, 1.0, 2.5}) {
    const double g = damping_from_phase_sigma(sigma);
    CHECK(g == doctest::Approx(std::exp(-0.5 * sigma * sigma)).epsilon(1e-15));
    if (g > 0.0 && sigma > 0.0)
      CHECK(phase_sigma_for_damping(g) == doctest::Approx(sigma).epsilon(1e-12));
  }
  CHECK(phase_sigma_for_damping(1.0) == 0.0);
  CHECK_THROWS_AS(phase_sigma_for_damping(0.0), DomainError);
  CHECK_THROWS_AS(phase_sigma_for_damping(1.2), DomainError);

  CHECK(damping_for_fidelity(0.753) == doctest::Approx(0.506).epsilon(1e-12));
  CHECK(damping_for_fidelity(1.0) == doctest::Approx(1.0));
  CHECK(damping_for_fidelity(0.5) == doctest::Approx(0.0));
  CHECK_THROWS_AS(damping_for_fidelity(0.4), DomainError);
  CHECK_THROWS_AS(damping_for_fidelity(1.01), DomainError);
}

TEST_CASE("temperature jitter of the free compensator section") {
  // Sensitivity of one compensator millimetre, from the thermo-optic slope.
  const OpticalStack unit = compensator_slab(1.0);
  JitterModel jitter;
  jitter.phase_sensitivity_rad_per_k_mm =
      temperature_phase_slope(unit, kSignal, kIdler);
  CHECK_NOTHROW(jitter.validate(153.0));

  // 123 mm unstabilized at sigma_T = 0.1461 K lands on the observed damping.
  const double g = damping_from_jitter(jitter);
  CHECK(g == doctest::Approx(0.506).epsilon(2e-3));

  // Stabilizing everything (no free section) removes the damping.
  JitterModel held = jitter;
  held.free_length_mm = 0.0;
  CHECK(damping_from_jitter(held) == doctest::Approx(1.0));

  JitterModel bad = jitter;
  bad.stabilized_length_mm = 100.0;
  bad.free_length_mm = 100.0;
  CHECK_THROWS_AS(bad.validate(153.0), ConfigError);
  bad = jitter;
  bad.temperature_sigma_k = -0.1;
  CHECK_THROWS_AS(bad.validate(153.0), ConfigError);
}

TEST_CASE("spectral damping quadrature matches the closed form") {
  // Linearized phase across anti-correlated detunings gives a pure Gaussian
  // characteristic function: gamma = exp(-(2 pi sigma_nu tau)^2 / 2).
  const double fwhm_ghz = 560.0;
  const double sigma_nu =
      fwhm_ghz * 1e9 / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  for (double slope_s : {0.2, 1.0, 3.0}) {
    const double slope_i = 0.1 * slope_s;
    const double tau = (slope_s * kSignal * kSignal -
                        slope_i * kIdler * kIdler) /
                       (kTwoPi * kSpeedOfLightNmPerS);
    const double expected =
        std::exp(-0.5 * std::pow(kTwoPi * sigma_nu * tau, 2));
    const double got = damping_from_spectrum(slope_s, slope_i, fwhm_ghz,
                                             fwhm_ghz, kSignal, kIdler);
    CHECK(got == doctest::Approx(expected).epsilon(1e-6));
  }

  // Slopes that satisfy s_s ls^2 = s_i li^2 cancel exactly: no damping.
  const double ratio = (kSignal * kSignal) / (kIdler * kIdler);
  CHECK(damping_from_spectrum(1.0, ratio, fwhm_ghz, fwhm_ghz, kSignal,
                              kIdler) == doctest::Approx(1.0).epsilon(1e-9));

  // The narrower arm sets the effective bandwidth.
  const double wide = damping_from_spectrum(2.0, 0.0, 200.0, 5000.0, kSignal,
                                            kIdler);
  const double same = damping_from_spectrum(2.0, 0.0, 200.0, 200.0, kSignal,
                                            kIdler);
  CHECK(wide == doctest::Approx(same).epsilon(1e-12));

  CHECK_THROWS_AS(damping_from_spectrum(1.0, 1.0, 0.0, 560.0, kSignal, kIdler),
                  DomainError);
}

TEST_CASE("flat-phase design kills the spectral damping") {
  // At the compensated plateau the pair-summed slope vanishes, which is the
  // same cancellation the spectral average needs: gamma stays near 1 across
  // the full source bandwidth.
  OpticalStack stack;
  OpticalElement crystal;
  crystal.label = "crystal";
  crystal.index_H = &registry().get("mgoln", Axis::ordinary, "calibrated_fform");
  crystal.length_mm = 40.0;
  crystal.temperature_c = 135.66;
  OpticalElement rhomb;
  rhomb.label = "rhomb";
  rhomb.index_H = &registry().get("bk7", Axis::isotropic, "schott");
  rhomb.length_mm = 31.4;
  rhomb.transit_count = 2;
  stack.elements = {crystal, rhomb};
  const CompensationDesign d = optimal_compensator_length(
      stack, registry().get("yvo4", Axis::ordinary, "zelmon"),
      registry().get("yvo4", Axis::extraordinary, "zelmon"), kSignal, kIdler,
      24.5);
  stack.elements.push_back([&] {
    OpticalElement e;
    e.label = "compensator";
    e.index_H = &registry().get("yvo4", Axis::ordinary, "zelmon");
    e.index_V = &registry().get("yvo4", Axis::extraordinary, "zelmon");
    e.length_mm = d.optimal_length_mm;
    e.temperature_c = 24.5;
    return e;
  }());

  const double to_rad_per_nm = 1e-3;  // slopes are rad/um
  const double s_s = single_photon_phase_slope(stack, kSignal) * to_rad_per_nm;
  const double s_i = single_photon_phase_slope(stack, kIdler) * to_rad_per_nm;
  const double g = damping_from_spectrum(s_s, s_i, 560.0, 560.0, kSignal,
                                         kIdler);
  CHECK(g > 0.9999);

  // Without the compensator the same bandwidth wipes out the coherence.
  OpticalStack bare;
  bare.elements = {crystal, rhomb};
  const double s_s0 = single_photon_phase_slope(bare, kSignal) * to_rad_per_nm;
  const double s_i0 = single_photon_phase_slope(bare, kIdler) * to_rad_per_nm;
  CHECK(damping_from_spectrum(s_s0, s_i0, 560.0, 560.0, kSignal, kIdler) <
        0.02);
}

TEST_CASE("noiseless sweep returns exact projection means") {
  const TwoPhotonState state = make_state(0.0, 0.506);
  SweepSpec sweep;
  sweep.basis_label = "HV";
  sweep.fixed_idler_hwp_rad = 0.0;
  sweep.signal_hwp_rad = {0.0, kPi / 8.0, kPi / 4.0};
  SourceConfig cfg = source();
  cfg.accidental_rate_cps = 10.0;
  cfg.integration_time_s = 2.0;

  const auto records = simulate_hwp_sweep(state, sweep, cfg, 1, true);
  REQUIRE(records.size() == 3);
  const double scale = cfg.detected_rate_cps() * cfg.integration_time_s;
  // Parallel point: half the pairs exit both pass ports; none cross.
  CHECK(records[0].counts[0] ==
        doctest::Approx(scale * 0.5 + 20.0).epsilon(1e-12));
  CHECK(records[0].counts[1] == doctest::Approx(20.0).epsilon(1e-12));
  // Crossed point (theta = 45 deg): pass-pass extinguishes in H/V.
  CHECK(records[2].counts[0] == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(records[2].counts[3] == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(records[2].counts[1] ==
        doctest::Approx(scale * 0.5 + 20.0).epsilon(1e-12));

  // Record bookkeeping.
  CHECK(records[1].basis_label == "HV");
  CHECK(records[1].hwp_signal_rad == kPi / 8.0);
  CHECK(records[1].hwp_idler_rad == 0.0);
  CHECK(!records[1].qwp_signal);
  CHECK(records[1].integration_time_s == 2.0);
}

TEST_CASE("sampling is deterministic in the seed") {
  const TwoPhotonState state = make_state(0.3, 0.7);
  SweepSpec sweep;
  sweep.basis_label = "DA";
  sweep.fixed_idler_hwp_rad = kPi / 8.0;
  for (int k = 0; k < 9; ++k)
    sweep.signal_hwp_rad.push_back(kPi / 2.0 * k / 8.0);

  const auto a = simulate_hwp_sweep(state, sweep, source(), 42, false);
  const auto b = simulate_hwp_sweep(state, sweep, source(), 42, false);
  const auto c = simulate_hwp_sweep(state, sweep, source(), 43, false);
  REQUIRE(a.size() == b.size());
  bool identical = true, differs = false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    identical = identical && same_record(a[k], b[k]);
    differs = differs || !same_record(a[k], c[k]);
  }
  CHECK(identical);
  CHECK(differs);
  // Counts are sampled as nonnegative integers.
  for (const auto& rec : a)
    for (double n : rec.counts) {
      CHECK(n >= 0.0);
      CHECK(n == std::floor(n));
    }
}

TEST_CASE("adding bases never perturbs earlier sweeps") {
  const TwoPhotonState state = make_state(0.0, 0.506);
  const auto hv_only =
      simulate_canonical_sweeps(state, {"HV"}, 19, kPi / 2.0, source(), 42);
  const auto all = simulate_canonical_sweeps(state, {"HV", "DA", "LR"}, 19,
                                             kPi / 2.0, source(), 42);
  REQUIRE(hv_only.size() == 2 * 19);
  REQUIRE(all.size() == 6 * 19);
  for (std::size_t k = 0; k < hv_only.size(); ++k)
    CHECK(same_record(hv_only[k], all[k]));

  // Canonical fixed-arm settings per basis.
  CHECK(all[0].hwp_idler_rad == 0.0);
  CHECK(all[19].hwp_idler_rad == doctest::Approx(kPi / 4.0));
  CHECK(all[2 * 19].hwp_idler_rad == doctest::Approx(kPi / 8.0));
  CHECK(all[3 * 19].hwp_idler_rad == doctest::Approx(3.0 * kPi / 8.0));
  CHECK(all[4 * 19].qwp_signal);
  CHECK(all[4 * 19].qwp_idler);
  CHECK(!all[0].qwp_signal);
  // Angle grid spans [0, theta_max].
  CHECK(all[0].hwp_signal_rad == 0.0);
  CHECK(all[18].hwp_signal_rad == doctest::Approx(kPi / 2.0));

  CHECK_THROWS_AS(
      simulate_canonical_sweeps(state, {"XY"}, 19, kPi / 2.0, source(), 42),
      ConfigError);
  CHECK_THROWS_AS(
      simulate_canonical_sweeps(state, {"HV"}, 3, kPi / 2.0, source(), 42),
      ConfigError);
}

TEST_CASE("sampled counts track the projection means statistically") {
  const TwoPhotonState state = make_state(0.0, 1.0);
  SweepSpec sweep;
  sweep.basis_label = "HV";
  sweep.fixed_idler_hwp_rad = 0.0;
  sweep.signal_hwp_rad.assign(200, 0.0);  // parallel point, 200 repeats
  SourceConfig cfg = source();
  cfg.pump_power_mw = 25.0;  // mean 3625 per repeat

  const auto records = simulate_hwp_sweep(state, sweep, cfg, 7, false);
  double total = 0.0;
  for (const auto& rec : records) total += rec.counts[0];
  const double mean = cfg.detected_rate_cps() * 0.5;
  const double expect = 200.0 * mean;
  const double sigma = std::sqrt(expect);
  CHECK(std::abs(total - expect) < 5.0 * sigma);
}

TEST_CASE("temperature scan traces the thermo-optic fringe") {
  const OpticalStack slab = compensator_slab(30.0);
  const double gamma = 0.506;
  const PiShift shift = pi_shift_temperature(slab, kSignal, kIdler);

  std::vector<double> temps;
  for (double t = 24.5; t <= 24.5 + 2.0 * shift.delta_t_c + 1e-9; t += 0.05)
    temps.push_back(t);
  const auto scan = simulate_temperature_scan(slab, kSignal, kIdler, temps,
                                              gamma, source(), 1, true);
  REQUIRE(scan.size() == temps.size());

  const double scale = source().detected_rate_cps();
  // Reference point sits at the fringe crest.
  CHECK(scan.front().counts ==
        doctest::Approx(scale * 0.25 * (1.0 + gamma)).epsilon(1e-12));
  // The trough arrives one pi-shift later (small thermo-optic curvature).
  double min_count = 1e300, min_t = 0.0;
  for (const auto& p : scan)
    if (p.counts < min_count) {
      min_count = p.counts;
      min_t = p.temperature_c;
    }
  CHECK(min_t - 24.5 == doctest::Approx(shift.delta_t_c).epsilon(0.05));
  CHECK(min_count ==
        doctest::Approx(scale * 0.25 * (1.0 - gamma)).epsilon(1e-3));
  // Full period: back near the crest at two pi-shifts.
  CHECK(scan.back().counts > scale * 0.25 * (1.0 + 0.9 * gamma));

  // Noisy scans are seed-deterministic.
  const auto n1 = simulate_temperature_scan(slab, kSignal, kIdler, temps,
                                            gamma, source(), 5, false);
  const auto n2 = simulate_temperature_scan(slab, kSignal, kIdler, temps,
                                            gamma, source(), 5, false);
  bool identical = true;
  for (std::size_t k = 0; k < n1.size(); ++k)
    identical = identical && n1[k].counts == n2[k].counts;
  CHECK(identical);

  CHECK_THROWS_AS(simulate_temperature_scan(slab, kSignal, kIdler, temps, 1.2,
                                            source(), 1, true),
                  DomainError);
}
