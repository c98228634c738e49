#pragma once

#include <utility>
#include <vector>

#include "twocolor/materials.hpp"

namespace twocolor {

// Quasi-phase-matching configuration for the type-0 grating. All three fields
// share one polarization axis; which crystal axis that is stays configurable
// (crystal points at the model for that axis).
struct QpmConfig {
  double pump_nm = 532.0;
  double poling_period_um = 6.97;
  int qpm_order = 1;  // odd
  const MaterialModel* crystal = nullptr;
  double t_min_c = 20.0;
  double t_max_c = 160.0;

  void validate() const;
};

// Collinear momentum mismatch n(lp,T)/lp - n(ls,T)/ls - n(li,T)/li - m/Lambda
// in 1/um, with the idler slaved to the signal by energy conservation.
double qpm_mismatch(const QpmConfig& config, double temperature_c,
                    double lambda_s_nm);

// Temperature at which signal and idler are degenerate at 2*pump.
double degeneracy_temperature(const QpmConfig& config);

// Phase-matched (signal, idler) pair at a temperature; signal is the shorter
// wavelength by convention. Throws SolverError with mismatch diagnostics when
// the grating cannot phase-match at this temperature.
std::pair<double, double> signal_wavelength_at_temperature(
    const QpmConfig& config, double temperature_c);

// Inverse of the above on the signal branch (lambda_s below degeneracy).
double temperature_for_signal(const QpmConfig& config, double lambda_s_nm);

struct TuningPoint {
  double temperature_c;
  double signal_nm;
  double idler_nm;
};

// (T, signal, idler) rows over [t_min, t_max]; temperatures without a phase
// match are skipped, and the exact degeneracy row is inserted when the
// degeneracy temperature lies inside the range.
std::vector<TuningPoint> tuning_curve(const QpmConfig& config, double t_min_c,
                                      double t_max_c, double step_c);

}  // namespace twocolor
