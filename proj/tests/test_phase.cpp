#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>

#include "twocolor/io.hpp"
#include "twocolor/numerics.hpp"
#include "twocolor/phase.hpp"

using namespace twocolor;

namespace {

const MaterialRegistry& registry() {
  static MaterialRegistry reg = load_registry(resolve_data_dir({}));
  return reg;
}

constexpr double kSignal = 894.3;
constexpr double kIdler = 1313.1;
constexpr double kCrystalT = 135.66;

OpticalElement crystal_pass() {
  OpticalElement e;
  e.label = "crystal";
  e.index_H = &registry().get("mgoln", Axis::ordinary, "calibrated_fform");
  e.length_mm = 40.0;
  e.temperature_c = kCrystalT;
  return e;
}

OpticalElement rhomb_double_pass() {
  OpticalElement e;
  e.label = "rhomb";
  e.index_H = &registry().get("bk7", Axis::isotropic, "schott");
  e.length_mm = 31.4;
  e.temperature_c = 24.5;
  e.transit_count = 2;
  return e;
}

OpticalElement compensator(const std::string& source, double length_mm,
                           double t_c = 24.5) {
  OpticalElement e;
  e.label = "compensator";
  e.index_H = &registry().get("yvo4", Axis::ordinary, source);
  e.index_V = &registry().get("yvo4", Axis::extraordinary, source);
  e.length_mm = length_mm;
  e.temperature_c = t_c;
  return e;
}

OpticalStack first_pass() {
  OpticalStack s;
  s.elements = {crystal_pass(), rhomb_double_pass()};
  return s;
}

OpticalStack device_stack(const std::string& source, double comp_mm) {
  OpticalStack s = first_pass();
  s.elements.push_back(compensator(source, comp_mm));
  return s;
}

}  // namespace

TEST_CASE("pair phase of the installed device") {
  const OpticalStack stack = device_stack("zelmon", 153.0);
  CHECK(pair_phase(stack, kSignal, kIdler) ==
        doctest::Approx(1794832.315610).epsilon(1e-9));

  OpticalStack crystal_only;
  crystal_only.elements = {crystal_pass()};
  CHECK(pair_phase(crystal_only, kSignal, kIdler) ==
        doctest::Approx(1054841.004107).epsilon(1e-9));
}

TEST_CASE("pair phase is length- and transit-linear") {
  OpticalStack one, two, doubled;
  one.elements = {compensator("zelmon", 30.0)};
  two.elements = {compensator("zelmon", 60.0)};
  doubled.elements = {compensator("zelmon", 30.0)};
  doubled.elements[0].transit_count = 2;

  const double p1 = pair_phase(one, kSignal, kIdler);
  CHECK(pair_phase(two, kSignal, kIdler) ==
        doctest::Approx(2.0 * p1).epsilon(1e-12));
  CHECK(pair_phase(doubled, kSignal, kIdler) ==
        doctest::Approx(2.0 * p1).epsilon(1e-12));

  // Compensator subtracts: its own-axis contribution is n_o - n_e < 0 for a
  // positive-uniaxial crystal, opposing the first-pass accumulation.
  CHECK(p1 < 0.0);
  CHECK(pair_phase(first_pass(), kSignal, kIdler) > 0.0);
}

TEST_CASE("energy-conservation partner and pump round trips") {
  CHECK(partner_wavelength(532.0, 1064.0) ==
        doctest::Approx(1064.0).epsilon(1e-12));
  const double pump = pump_from_pair(kSignal, kIdler);
  CHECK(pump == doctest::Approx(531.98566).epsilon(1e-6));
  CHECK(partner_wavelength(pump, kSignal) ==
        doctest::Approx(kIdler).epsilon(1e-12));
  CHECK(partner_wavelength(532.0, 894.3) ==
        doctest::Approx(1313.1869).epsilon(1e-6));
  CHECK_THROWS_AS(partner_wavelength(532.0, 500.0), DomainError);
}

TEST_CASE("pair slope equals the chained per-photon slopes") {
  // d(phi_s + phi_i)/d lambda_s with 1/li = 1/lp - 1/ls implies
  // slope_pair = s(ls) - s(li) * (li/ls)^2; both sides analytic.
  const OpticalStack stack = device_stack("zelmon", 140.0);
  const double pump = pump_from_pair(kSignal, kIdler);
  for (double ls : {860.0, 894.3, 950.0, 1010.0}) {
    const double li = partner_wavelength(pump, ls);
    const double chained =
        single_photon_phase_slope(stack, ls) -
        single_photon_phase_slope(stack, li) * (li * li) / (ls * ls);
    CHECK(pair_phase_slope(stack, pump, ls) ==
          doctest::Approx(chained).epsilon(1e-12));
  }
}

TEST_CASE("optimal compensator lengths for all dispersion sources") {
  const struct {
    const char* source;
    double length_mm;
  } expected[] = {{"foctek", 138.685},
                  {"zelmon", 154.000},
                  {"sato", 172.000},
                  {"handbook", 178.800}};
  for (const auto& row : expected) {
    const auto t0 = std::chrono::steady_clock::now();
    const CompensationDesign d = optimal_compensator_length(
        first_pass(), registry().get("yvo4", Axis::ordinary, row.source),
        registry().get("yvo4", Axis::extraordinary, row.source), kSignal,
        kIdler, 24.5);
    const double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    INFO(row.source);
    CHECK(d.optimal_length_mm ==
          doctest::Approx(row.length_mm).epsilon(1e-4));
    CHECK(std::abs(d.residual_pair_slope) < 1e-9);
    // The plateau sits on the requested pair.
    CHECK(d.plateau_signal_nm == doctest::Approx(kSignal).epsilon(1e-6));
    CHECK(d.plateau_idler_nm == doctest::Approx(kIdler).epsilon(1e-5));
    CHECK(d.pump_nm == doctest::Approx(531.98566).epsilon(1e-6));
    CHECK(d.source_label == row.source);
    CHECK(dt < 1.0);
  }
}

TEST_CASE("per-photon least squares lands far from the pair optimum") {
  // One length cannot cancel both single-photon slopes; the least-squares
  // compromise sits hundreds of mm away and keeps large residuals.
  const CompensationDesign d = optimal_compensator_length(
      first_pass(), registry().get("yvo4", Axis::ordinary, "zelmon"),
      registry().get("yvo4", Axis::extraordinary, "zelmon"), kSignal, kIdler,
      24.5, FlatPhaseObjective::per_photon_least_squares, 10.0, 1200.0);
  CHECK(d.optimal_length_mm > 400.0);
  CHECK(std::abs(d.optimal_length_mm - 154.0) > 100.0);
  CHECK(std::abs(d.residual_slope_signal) > 1.0);
  CHECK(std::abs(d.residual_slope_idler) > 1.0);
  CHECK(d.objective == FlatPhaseObjective::per_photon_least_squares);
}

TEST_CASE("plateau moves tens of nm per mm of compensator") {
  const CompensationDesign d = optimal_compensator_length(
      first_pass(), registry().get("yvo4", Axis::ordinary, "zelmon"),
      registry().get("yvo4", Axis::extraordinary, "zelmon"), kSignal, kIdler,
      24.5);
  const double pump = d.pump_nm;
  for (double dl : {-1.0, 1.0}) {
    OpticalStack stack = first_pass();
    stack.elements.push_back(
        compensator("zelmon", d.optimal_length_mm + dl));
    const double plateau =
        stationary_signal_wavelength(stack, pump, kSignal);
    const double shift = std::abs(plateau - kSignal);
    INFO("dl ", dl, " shift ", shift);
    CHECK(shift > 30.0);
    CHECK(shift < 70.0);
  }
}

TEST_CASE("phase profile subtracts the reference offset") {
  const OpticalStack stack = device_stack("zelmon", 154.0);
  std::vector<double> grid;
  for (double l = 860.0; l <= 1050.0; l += 2.0) grid.push_back(l);
  const auto prof = phase_profile(
      stack, grid, PairingMode::energy_conserving_pair, 531.98566, 894.0);
  REQUIRE(prof.size() == grid.size());
  // Offset removed at the grid point nearest the reference wavelength.
  double at_ref = 1e300;
  for (const auto& p : prof)
    if (std::abs(p.lambda_nm - 894.0) < 1.0) at_ref = p.phase_rad;
  CHECK(at_ref == 0.0);
  // Flat near the plateau: the neighbours stay within a fraction of a rad.
  for (const auto& p : prof)
    if (std::abs(p.lambda_nm - 894.3) < 20.0)
      CHECK(std::abs(p.phase_rad) < 1.0);

  const auto single = phase_profile(stack, grid, PairingMode::single_photon,
                                    531.98566, 894.0);
  REQUIRE(single.size() == grid.size());
  // Per-photon phase is steep where the pair-summed phase is flat.
  double steep = 0.0;
  for (std::size_t k = 1; k < single.size(); ++k)
    steep = std::max(steep, std::abs(single[k].phase_rad -
                                     single[k - 1].phase_rad));
  CHECK(steep > 100.0);
}

TEST_CASE("thermo-optic slope matches a finite difference") {
  OpticalStack slab;
  slab.elements = {compensator("zelmon", 30.0)};
  const double slope = temperature_phase_slope(slab, kSignal, kIdler);
  CHECK(slope == doctest::Approx(1.948785).epsilon(1e-5));

  OpticalStack warm = slab, cold = slab;
  warm.elements[0].temperature_c = 25.0;
  cold.elements[0].temperature_c = 24.0;
  const double fd = (pair_phase(warm, kSignal, kIdler) -
                     pair_phase(cold, kSignal, kIdler));
  CHECK(slope == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("pi-shift temperature of the stabilized slab") {
  OpticalStack slab;
  slab.elements = {compensator("zelmon", 30.0)};
  const PiShift shift = pi_shift_temperature(slab, kSignal, kIdler);
  CHECK(shift.delta_t_c == doctest::Approx(1.6121).epsilon(1e-3));
  CHECK(shift.delta_t_c * std::abs(shift.slope_rad_per_k) ==
        doctest::Approx(kPi).epsilon(1e-12));
  // Within a factor of two of the 2.4 C literature point.
  CHECK(shift.delta_t_c > 1.2);
  CHECK(shift.delta_t_c < 4.8);

  OpticalStack inert;
  inert.elements = {rhomb_double_pass()};
  CHECK_THROWS_AS(pi_shift_temperature(inert, kSignal, kIdler), DomainError);
}

TEST_CASE("bell angle wrapping") {
  CHECK(phase_to_bell_angle(0.0) == 0.0);
  CHECK(phase_to_bell_angle(kTwoPi + 0.3) ==
        doctest::Approx(0.3).epsilon(1e-12));
  CHECK(phase_to_bell_angle(-0.3) ==
        doctest::Approx(kTwoPi - 0.3).epsilon(1e-12));
  CHECK(phase_to_bell_angle(1794832.315610) >= 0.0);
  CHECK(phase_to_bell_angle(1794832.315610) < kTwoPi);
}

TEST_CASE("slab stock rounding") {
  const std::vector<double> stock{20, 20, 20, 20, 20, 20, 20, 10, 2, 1};
  const SlabRounding exact = round_to_slab_stock(140.0, stock);
  CHECK(exact.length_mm == 140.0);
  CHECK(exact.residual_mm == 0.0);

  const SlabRounding capped = round_to_slab_stock(154.0, stock);
  CHECK(capped.length_mm == 153.0);
  CHECK(capped.residual_mm == doctest::Approx(-1.0));
  double sum = 0.0;
  for (double s : capped.slabs) sum += s;
  CHECK(sum == capped.length_mm);

  // Equidistant candidates resolve to the shorter stack.
  const SlabRounding tie = round_to_slab_stock(136.5, stock);
  CHECK(tie.length_mm == 133.0);
}

TEST_CASE("solver diagnostics on an impossible bracket") {
  CHECK_THROWS_AS(
      optimal_compensator_length(
          first_pass(), registry().get("yvo4", Axis::ordinary, "zelmon"),
          registry().get("yvo4", Axis::extraordinary, "zelmon"), kSignal,
          kIdler, 24.5, FlatPhaseObjective::energy_conserving_pair, 10.0,
          20.0),
      SolverError);
  CHECK_THROWS_AS(
      optimal_compensator_length(
          first_pass(), registry().get("yvo4", Axis::ordinary, "zelmon"),
          registry().get("yvo4", Axis::ordinary, "zelmon"), kSignal, kIdler,
          24.5),
      ConfigError);
}
