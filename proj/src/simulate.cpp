#include "twocolor/simulate.hpp"

#include <cmath>
#include <random>

#include "twocolor/numerics.hpp"

namespace twocolor {

void SourceConfig::validate() const {
  if (!(pair_rate_mcps_per_mw > 0.0))
    throw ConfigError("source: pair rate must be positive");
  if (!(pump_power_mw > 0.0))
    throw ConfigError("source: pump power must be positive");
  if (!(signal_linewidth_ghz > 0.0) || !(idler_linewidth_ghz > 0.0))
    throw ConfigError("source: linewidths must be positive");
  if (!(detection_efficiency_product > 0.0) ||
      detection_efficiency_product > 1.0)
    throw ConfigError("source: pair detection efficiency must lie in (0, 1]");
  if (!(integration_time_s > 0.0))
    throw ConfigError("source: integration time must be positive");
  if (accidental_rate_cps < 0.0)
    throw ConfigError("source: accidental rate must be >= 0");
}

double SourceConfig::detected_rate_cps() const {
  return pair_rate_mcps_per_mw * 1e6 * pump_power_mw *
         detection_efficiency_product;
}

void JitterModel::validate(double total_length_mm) const {
  if (stabilized_length_mm < 0.0 || free_length_mm < 0.0)
    throw ConfigError("jitter: section lengths must be >= 0");
  if (total_length_mm > 0.0 &&
      stabilized_length_mm + free_length_mm > total_length_mm + 1e-9)
    throw ConfigError(
        "jitter: stabilized + free sections exceed the compensator length");
  if (temperature_sigma_k < 0.0)
    throw ConfigError("jitter: temperature sigma must be >= 0");
}

double damping_from_jitter(const JitterModel& jitter) {
  jitter.validate(0.0);
  const double sigma_phi = std::abs(jitter.phase_sensitivity_rad_per_k_mm) *
                           jitter.free_length_mm * jitter.temperature_sigma_k;
  return damping_from_phase_sigma(sigma_phi);
}

double damping_from_phase_sigma(double sigma_phi_rad) {
  return std::exp(-0.5 * sigma_phi_rad * sigma_phi_rad);
}

double phase_sigma_for_damping(double gamma) {
  if (!(gamma > 0.0) || gamma > 1.0)
    throw DomainError("phase sigma defined only for damping in (0, 1], got " +
                      std::to_string(gamma));
  return std::sqrt(-2.0 * std::log(gamma));
}

double damping_for_fidelity(double fidelity) {
  if (fidelity < 0.5 || fidelity > 1.0)
    throw DomainError(
        "fidelity target must lie in [0.5, 1] for the damped-pair family, "
        "got " +
        std::to_string(fidelity));
  return 2.0 * fidelity - 1.0;
}

double damping_from_spectrum(double slope_signal_rad_per_nm,
                             double slope_idler_rad_per_nm,
                             double signal_linewidth_ghz,
                             double idler_linewidth_ghz, double lambda_s_nm,
                             double lambda_i_nm) {
  if (!(signal_linewidth_ghz > 0.0) || !(idler_linewidth_ghz > 0.0))
    throw DomainError("spectral damping needs positive linewidths");
  // cw pump: detunings anti-correlate, nu_s = -nu_i = nu. The phase deviation
  // per unit frequency combines both arms' wavelength slopes through
  // d lambda / d nu = -lambda^2 / c.
  const double tau_s =
      (slope_signal_rad_per_nm * lambda_s_nm * lambda_s_nm -
       slope_idler_rad_per_nm * lambda_i_nm * lambda_i_nm) /
      (kTwoPi * kSpeedOfLightNmPerS);
  const double fwhm_ghz = std::min(signal_linewidth_ghz, idler_linewidth_ghz);
  const double sigma_nu_hz =
      fwhm_ghz * 1e9 / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  // |<e^{i 2 pi nu tau}>| over the Gaussian spectral density, by quadrature.
  const double span = 8.0 * sigma_nu_hz;
  const double norm = 1.0 / (std::sqrt(kTwoPi) * sigma_nu_hz);
  const auto weight = [&](double nu) {
    return norm * std::exp(-0.5 * (nu / sigma_nu_hz) * (nu / sigma_nu_hz));
  };
  const double re = simpson(
      [&](double nu) { return weight(nu) * std::cos(kTwoPi * nu * tau_s); },
      -span, span, 4096);
  const double im = simpson(
      [&](double nu) { return weight(nu) * std::sin(kTwoPi * nu * tau_s); },
      -span, span, 4096);
  return std::hypot(re, im);
}

namespace {

std::array<double, 4> sample_counts(const std::array<double, 4>& means,
                                    std::uint64_t substream, bool noiseless) {
  if (noiseless) return means;
  std::mt19937_64 rng(substream);
  std::array<double, 4> counts{};
  for (int k = 0; k < 4; ++k) {
    std::poisson_distribution<long long> pois(means[k]);
    counts[k] = means[k] > 0.0 ? static_cast<double>(pois(rng)) : 0.0;
  }
  return counts;
}

}  // namespace

std::vector<CountRecord> simulate_hwp_sweep(const TwoPhotonState& state,
                                            const SweepSpec& sweep,
                                            const SourceConfig& config,
                                            std::uint64_t seed,
                                            bool noiseless) {
  config.validate();
  state.validate();
  const double scale =
      config.detected_rate_cps() * config.integration_time_s;
  const double accidentals =
      config.accidental_rate_cps * config.integration_time_s;

  AnalyzerSetting idler;
  idler.hwp_angle_rad = sweep.fixed_idler_hwp_rad;
  idler.qwp_present = sweep.qwp_engaged;
  idler.qwp_angle_rad = kPi / 4.0;

  std::vector<CountRecord> records;
  records.reserve(sweep.signal_hwp_rad.size());
  std::uint64_t index = 0;
  for (double theta : sweep.signal_hwp_rad) {
    AnalyzerSetting signal;
    signal.hwp_angle_rad = theta;
    signal.qwp_present = sweep.qwp_engaged;
    signal.qwp_angle_rad = kPi / 4.0;

    const auto probs = coincidence_probabilities(state, signal, idler);
    std::array<double, 4> means{};
    for (int k = 0; k < 4; ++k) means[k] = scale * probs[k] + accidentals;

    const std::uint64_t substream = substream_seed(seed, index++);
    CountRecord rec;
    rec.basis_label = sweep.basis_label;
    rec.hwp_signal_rad = theta;
    rec.hwp_idler_rad = sweep.fixed_idler_hwp_rad;
    rec.qwp_signal = sweep.qwp_engaged;
    rec.qwp_idler = sweep.qwp_engaged;
    rec.integration_time_s = config.integration_time_s;
    rec.counts = sample_counts(means, substream, noiseless);
    rec.seed = substream;
    records.push_back(rec);
  }
  return records;
}

std::vector<CountRecord> simulate_canonical_sweeps(
    const TwoPhotonState& state, const std::vector<std::string>& bases,
    int points_per_sweep, double theta_max_rad, const SourceConfig& config,
    std::uint64_t seed, bool noiseless) {
  if (points_per_sweep < 5)
    throw ConfigError("canonical sweeps need at least 5 points per sweep");
  std::vector<double> grid(points_per_sweep);
  for (int k = 0; k < points_per_sweep; ++k)
    grid[k] = theta_max_rad * k / (points_per_sweep - 1);

  std::vector<CountRecord> all;
  std::uint64_t index = 0;
  for (const auto& basis : bases) {
    double fixed_i = 0.0, fixed_j = 0.0;
    bool qwp = false;
    if (basis == "HV") {
      fixed_i = 0.0;
      fixed_j = kPi / 4.0;
    } else if (basis == "DA") {
      fixed_i = kPi / 8.0;
      fixed_j = 3.0 * kPi / 8.0;
    } else if (basis == "LR") {
      fixed_i = 0.0;
      fixed_j = kPi / 4.0;
      qwp = true;
    } else {
      throw ConfigError("unknown basis label '" + basis +
                        "' (expected HV, DA, or LR)");
    }
    for (double fixed : {fixed_i, fixed_j}) {
      SweepSpec sweep;
      sweep.basis_label = basis;
      sweep.fixed_idler_hwp_rad = fixed;
      sweep.qwp_engaged = qwp;
      sweep.signal_hwp_rad = grid;
      // Reseed each point from a global index so adding bases never reuses a
      // substream.
      const std::uint64_t sweep_seed = substream_seed(seed, index++);
      auto records = simulate_hwp_sweep(state, sweep, config, sweep_seed,
                                        noiseless);
      all.insert(all.end(), records.begin(), records.end());
    }
  }
  return all;
}

std::vector<ScanPoint> simulate_temperature_scan(
    const OpticalStack& slab, double lambda_s_nm, double lambda_i_nm,
    const std::vector<double>& temperatures_c, double gamma,
    const SourceConfig& config, std::uint64_t seed, bool noiseless) {
  config.validate();
  if (gamma < 0.0 || gamma > 1.0)
    throw DomainError("scan damping must lie in [0, 1]");
  const double scale = config.detected_rate_cps() * config.integration_time_s;

  // Reference phase at the first temperature; the scan shows relative motion.
  OpticalStack at_t = slab;
  const auto phase_at = [&](double t) {
    for (auto& el : at_t.elements) el.temperature_c = t;
    return pair_phase(at_t, lambda_s_nm, lambda_i_nm);
  };
  if (temperatures_c.empty()) return {};
  const double phi0 = phase_at(temperatures_c.front());

  std::vector<ScanPoint> out;
  out.reserve(temperatures_c.size());
  std::uint64_t index = 0;
  for (double t : temperatures_c) {
    const double phi = phase_at(t) - phi0;
    const double mean = scale * 0.25 * (1.0 + gamma * std::cos(phi)) +
                        config.accidental_rate_cps * config.integration_time_s;
    double counts = mean;
    if (!noiseless) {
      std::mt19937_64 rng(substream_seed(seed, index));
      std::poisson_distribution<long long> pois(mean);
      counts = mean > 0.0 ? static_cast<double>(pois(rng)) : 0.0;
    }
    ++index;
    out.push_back({t, counts});
  }
  return out;
}

}  // namespace twocolor
