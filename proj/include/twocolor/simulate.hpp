#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "twocolor/phase.hpp"
#include "twocolor/polarization.hpp"

namespace twocolor {

struct SourceConfig {
  double pair_rate_mcps_per_mw = 5.8;
  double pump_power_mw = 1.0;
  double signal_linewidth_ghz = 560.0;
  double idler_linewidth_ghz = 560.0;
  double detection_efficiency_product = 5.0e-5;
  double integration_time_s = 1.0;
  double accidental_rate_cps = 0.0;

  void validate() const;
  // Detected coincidence rate for unit projection probability, counts/s.
  double detected_rate_cps() const;
};

// Quasi-static Gaussian temperature jitter of the unstabilized compensator
// section.
struct JitterModel {
  double stabilized_length_mm = 30.0;
  double free_length_mm = 123.0;
  double temperature_sigma_k = 0.1461;
  double phase_sensitivity_rad_per_k_mm = 0.0;  // from temperature_phase_slope

  void validate(double total_length_mm) const;
};

// gamma = exp(-sigma_phi^2 / 2), sigma_phi = sensitivity * free_length * sigma_T.
double damping_from_jitter(const JitterModel& jitter);

// Gaussian phase averaging helpers: gamma = exp(-sigma_phi^2/2) and inverse.
double damping_from_phase_sigma(double sigma_phi_rad);
double phase_sigma_for_damping(double gamma);

// gamma = 2F - 1 for the phi-parameterized family.
double damping_for_fidelity(double fidelity);

// |integral S(nu) e^{i dphi(nu)} dnu| for a cw pump: signal and idler detune
// oppositely by a shared Gaussian variable (effective FWHM = min of the two
// linewidths); the residual phase is linearized with the given per-photon
// slopes (rad/nm). Evaluated by quadrature.
double damping_from_spectrum(double slope_signal_rad_per_nm,
                             double slope_idler_rad_per_nm,
                             double signal_linewidth_ghz,
                             double idler_linewidth_ghz, double lambda_s_nm,
                             double lambda_i_nm);

// One coincidence measurement: analyzer angles, integration time, the four
// pass/reject coincidence counts, and the RNG substream seed that produced it.
struct CountRecord {
  std::string basis_label;
  double hwp_signal_rad = 0.0;
  double hwp_idler_rad = 0.0;
  bool qwp_signal = false;
  bool qwp_idler = false;
  double integration_time_s = 0.0;
  std::array<double, 4> counts{};  // ii, ij, ji, jj; integers when sampled
  std::uint64_t seed = 0;
};

// Half-wave-plate sweep of the signal arm with the idler arm fixed.
struct SweepSpec {
  std::string basis_label;        // "HV", "DA", "LR", ...
  double fixed_idler_hwp_rad = 0; // idler HWP angle, also the parallel point
  bool qwp_engaged = false;       // QWP at 45 deg in both arms when true
  std::vector<double> signal_hwp_rad;
};

std::vector<CountRecord> simulate_hwp_sweep(const TwoPhotonState& state,
                                            const SweepSpec& sweep,
                                            const SourceConfig& config,
                                            std::uint64_t seed,
                                            bool noiseless = false);

// The six canonical sweeps (two fixed-arm settings per basis) over a uniform
// angle grid; basis order HV, DA, LR; point index continues across sweeps so
// substreams never collide.
std::vector<CountRecord> simulate_canonical_sweeps(
    const TwoPhotonState& state, const std::vector<std::string>& bases,
    int points_per_sweep, double theta_max_rad, const SourceConfig& config,
    std::uint64_t seed, bool noiseless = false);

struct ScanPoint {
  double temperature_c;
  double counts;
};

// Compensator-slab temperature scan in the parallel diagonal basis: the Bell
// phase follows the slab's thermo-optic pair phase and the coincidence mean
// follows [1 + gamma cos(phi(T))]/4.
std::vector<ScanPoint> simulate_temperature_scan(
    const OpticalStack& slab, double lambda_s_nm, double lambda_i_nm,
    const std::vector<double>& temperatures_c, double gamma,
    const SourceConfig& config, std::uint64_t seed, bool noiseless = false);

}  // namespace twocolor
