#pragma once

#include <string>
#include <vector>

#include "twocolor/materials.hpp"

namespace twocolor {

// One element traversed by the first-created pair. index_H is the dispersion
// seen by that (horizontally polarized) pair; index_V is what the other pair
// creation possibility sees in the same element. For first-pass elements the
// second pair never passes at all (index_V = nullptr, full n counts); for the
// birefringent compensator both axes matter and the difference n_o - n_e is
// what accumulates.
struct OpticalElement {
  std::string label;
  const MaterialModel* index_H = nullptr;
  const MaterialModel* index_V = nullptr;
  double length_mm = 0.0;
  double temperature_c = 24.5;
  int transit_count = 1;

  double delta_n(double lambda_nm) const;
  double delta_group_index(double lambda_nm) const;
  double delta_dn_dT(double lambda_nm) const;
};

struct OpticalStack {
  std::vector<OpticalElement> elements;

  OpticalStack concat(const OpticalStack& other) const;
};

enum class PairingMode { single_photon, energy_conserving_pair };

// Which-path phase of the first pair relative to the second:
// 2*pi * sum_e transits * L_e * [dn_e(ls)/ls + dn_e(li)/li], lengths and
// wavelengths in consistent units. The wavelength-independent pump term is a
// common offset and is omitted.
double pair_phase(const OpticalStack& stack, double lambda_s_nm,
                  double lambda_i_nm);

// Single-photon phase sum_e 2*pi * t * L * dn_e(l)/l and its analytic
// wavelength derivative (rad per um).
double single_photon_phase(const OpticalStack& stack, double lambda_nm);
double single_photon_phase_slope(const OpticalStack& stack, double lambda_nm);

// Energy-conservation partner: 1/lp = 1/ls + 1/li.
double partner_wavelength(double pump_nm, double lambda_nm);
double pump_from_pair(double lambda_s_nm, double lambda_i_nm);

// Analytic derivative of the pair-summed phase with the idler slaved to the
// signal by energy conservation, d phi_pair / d lambda_s in rad/um.
double pair_phase_slope(const OpticalStack& stack, double pump_nm,
                        double lambda_s_nm);

struct ProfilePoint {
  double lambda_nm;
  double phase_rad;
};

// phi(lambda) over a grid, constant offset subtracted (value at the grid
// point nearest reference_lambda_nm, or the first point when negative). In
// pair mode the partner wavelength is derived from the pump.
std::vector<ProfilePoint> phase_profile(const OpticalStack& stack,
                                        const std::vector<double>& grid_nm,
                                        PairingMode mode, double pump_nm,
                                        double reference_lambda_nm = -1.0);

// Wavelength at which the pair-summed phase is stationary (flat-phase plateau
// center), found from the analytic slope near hint_nm.
double stationary_signal_wavelength(const OpticalStack& stack, double pump_nm,
                                    double hint_nm, double lo_nm = 845.0,
                                    double hi_nm = 1055.0);

enum class FlatPhaseObjective {
  // Single exact root of the pair-summed slope at the signal wavelength with
  // the idler slaved by energy conservation. Default: reproduces the design
  // lengths of the reference device.
  energy_conserving_pair,
  // Least-squares compromise between the two per-photon slopes. Kept for
  // comparison; its optimum sits far from the pair solution because one
  // length cannot cancel both single-photon slopes.
  per_photon_least_squares
};

struct CompensationDesign {
  double signal_nm = 0.0;
  double idler_nm = 0.0;
  double pump_nm = 0.0;  // derived: 1/pump = 1/signal + 1/idler
  double optimal_length_mm = 0.0;
  std::string source_label;
  double plateau_signal_nm = 0.0;
  double plateau_idler_nm = 0.0;
  // Residual slopes at the optimum: per-photon at each wavelength and the
  // pair-summed combination (rad/um).
  double residual_slope_signal = 0.0;
  double residual_slope_idler = 0.0;
  double residual_pair_slope = 0.0;
  FlatPhaseObjective objective = FlatPhaseObjective::energy_conserving_pair;
};

// Solve for the compensator length that flattens the pair phase. first_pass
// is everything the first pair traverses before the compensator; the
// compensator element is built from (comp_o, comp_e) at temperature_c with H
// seeing the ordinary axis. Bracketed in [bracket_lo, bracket_hi] mm.
CompensationDesign optimal_compensator_length(
    const OpticalStack& first_pass, const MaterialModel& comp_o,
    const MaterialModel& comp_e, double lambda_s_nm, double lambda_i_nm,
    double temperature_c,
    FlatPhaseObjective objective = FlatPhaseObjective::energy_conserving_pair,
    double bracket_lo_mm = 10.0, double bracket_hi_mm = 400.0);

// d(phase)/dT in rad/K, each element differentiated with respect to its own
// temperature (analytic thermo-optic slopes; temperature-independent elements
// contribute nothing).
double temperature_phase_slope(const OpticalStack& stack, double lambda_s_nm,
                               double lambda_i_nm);

struct PiShift {
  double delta_t_c;        // temperature step giving a pi phase shift
  double slope_rad_per_k;  // signed d(phase)/dT
};

PiShift pi_shift_temperature(const OpticalStack& slab, double lambda_s_nm,
                             double lambda_i_nm);

// Reduce an accumulated phase to the Bell angle in [0, 2*pi).
double phase_to_bell_angle(double phase_rad);

struct SlabRounding {
  double length_mm = 0.0;    // closest achievable sum
  double residual_mm = 0.0;  // achieved - ideal
  std::vector<double> slabs; // chosen stock pieces
};

// Round an ideal length to the nearest sum of stock slabs (subset sum).
SlabRounding round_to_slab_stock(double ideal_mm,
                                 const std::vector<double>& stock_mm);

}  // namespace twocolor
