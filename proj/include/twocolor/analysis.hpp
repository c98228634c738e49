#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "twocolor/simulate.hpp"

namespace twocolor {

// Least-squares fit of A sin(4 theta + c) + C via the linear
// reparameterization a sin4t + b cos4t + C. Covariance is over (a, b, C).
struct SineFit {
  double amplitude = 0.0;    // A = hypot(a, b) >= 0
  double offset = 0.0;       // C
  double phase_const = 0.0;  // c = atan2(b, a), in [0, 2*pi)
  double residual_rms = 0.0;
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();
  double a = 0.0, b = 0.0;   // linear parameters
  bool poisson_weighted = false;

  double eval(double theta_rad) const;
  // Signed amplitude at the parallel analyzer angle: eval(par) - C.
  double signed_amplitude(double parallel_rad) const;
  // Variance of the signed amplitude and its covariance with C.
  double signed_amplitude_var(double parallel_rad) const;
  double signed_amplitude_offset_cov(double parallel_rad) const;
};

// points: (theta_rad, counts). Needs >= 4 points spanning at least half a
// period of sin(4 theta). One-step Poisson reweighting when the fitted offset
// is large enough for variance ~ mean to be meaningful.
SineFit fit_sine(const std::vector<std::pair<double, double>>& points);

struct FittedSweep {
  SineFit fit;
  double parallel_angle_rad = 0.0;  // fixed-arm angle of this sweep
};

struct BasisVisibility {
  double v_i = 0.0;   // per-setting visibility A_i/C_i (signed)
  double v_j = 0.0;
  double value = 0.0; // V_ij = (A_i + A_j)/(C_i + C_j), signed
  double sigma = 0.0;
};

// Combined visibility of a basis from its two sweeps, first-order uncertainty
// propagation from the fit covariances. The parallel angles give the
// amplitudes their sign; nothing is flipped based on labels.
BasisVisibility visibility_from_fit(const FittedSweep& sweep_i,
                                    const FittedSweep& sweep_j);

struct FidelityReport {
  BasisVisibility v_hv, v_da, v_lr;
  double fidelity = 0.0;
  double sigma = 0.0;
  bool entangled = false;           // F - sigma > 1/2
  bool unphysical_warning = false;  // F outside [0, 1]; never clamped
  std::map<std::string, std::vector<FittedSweep>> fits;  // per basis, by label
};

// F = (1 + V_HV + V_DA - V_LR)/4 with propagated sigma. All three bases must
// be present.
FidelityReport fidelity_report(
    const std::map<std::string, std::pair<FittedSweep, FittedSweep>>& bases);

// Full pipeline: group records by (basis, fixed idler angle), fit each sweep
// over the signal angle using the pass/pass coincidence counts, combine.
FidelityReport analyze_records(const std::vector<CountRecord>& records);

// Poisson-parametric bootstrap of the full pipeline; returns the standard
// deviation of F over the resamples. Deterministic given seed.
double bootstrap_uncertainty(const std::vector<CountRecord>& records,
                             int resamples, std::uint64_t seed);

// Oscillation period of (x, y) scan data: linear LS in cos/sin at a scanned
// frequency, coarse grid plus golden-section refinement. Used to compare
// temperature-scan periods against the thermo-optic pi shift.
double fit_oscillation_period(
    const std::vector<std::pair<double, double>>& points);

}  // namespace twocolor
