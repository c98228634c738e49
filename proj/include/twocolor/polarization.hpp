#pragma once

#include <array>
#include <complex>
#include <random>

#include <Eigen/Dense>

#include "twocolor/errors.hpp"

namespace twocolor {

using Mat2c = Eigen::Matrix2cd;
using Mat4c = Eigen::Matrix4cd;
using Vec2c = Eigen::Vector2cd;

// Two-photon polarization density matrix over the ordered basis
// (HH, HV, VH, VV).
struct TwoPhotonState {
  Mat4c rho = Mat4c::Zero();

  // Hermitian to 1e-12, trace 1 to 1e-12, eigenvalues >= -1e-10.
  void validate() const;
  double min_eigenvalue() const;
};

// rho11 = rho44 = 1/2, rho14 = (gamma/2) e^{-i phi}: the phi-parameterized
// Bell pair with off-diagonal coherence damped by gamma.
TwoPhotonState make_state(double bell_phase_rad, double offdiag_damping);

// Jones matrices, fast axis at theta from horizontal; |L> = (|H> + i|V>)/sqrt2
// under this convention (pinned by the circular-basis projection tests).
Mat2c jones_hwp(double theta_rad);
Mat2c jones_qwp(double theta_rad);

// One analyzer arm: optional QWP, then HWP, then a fixed H polarizer.
struct AnalyzerSetting {
  double hwp_angle_rad = 0.0;
  bool qwp_present = false;
  double qwp_angle_rad = 0.0;
};

// Wave-plate chain U applied to the photon before the polarizer.
Mat2c analyzer_chain(const AnalyzerSetting& s);
// Projectors onto the analyzer's transmitted (pass) and rejected ports:
// U^dag |H><H| U and U^dag |V><V| U.
Mat2c pass_projector(const AnalyzerSetting& s);
Mat2c reject_projector(const AnalyzerSetting& s);

// Probability that both photons exit the pass ports.
double projection_probability(const TwoPhotonState& state,
                              const AnalyzerSetting& signal,
                              const AnalyzerSetting& idler);

// All four pass/reject coincidence probabilities (ii, ij, ji, jj), where i is
// the pass port and j the reject port of each arm.
std::array<double, 4> coincidence_probabilities(const TwoPhotonState& state,
                                                const AnalyzerSetting& signal,
                                                const AnalyzerSetting& idler);

// (rho11 + rho14 + rho41 + rho44)/2 = <phi+|rho|phi+>.
double fidelity_direct(const TwoPhotonState& state);

// [P_D + P_A - (P_R + P_L) + P_H + P_V]/2 from the six both-arms-parallel
// projection probabilities.
double fidelity_from_probabilities(double p_h, double p_v, double p_d,
                                   double p_a, double p_l, double p_r);

// (1 + V_HV + V_DA - V_LR)/4.
double fidelity_from_visibilities(double v_hv, double v_da, double v_lr);

// [N_ii + N_jj - (N_ij + N_ji)] / N_total.
double basis_visibility(double n_ii, double n_ij, double n_ji, double n_jj);

// Canonical analyzer settings: H/V/D/A are HWP-only at 0, 45, 22.5, 67.5 deg;
// L and R add a QWP at 45 deg with HWP at 0 and 45 deg.
AnalyzerSetting setting_H();
AnalyzerSetting setting_V();
AnalyzerSetting setting_D();
AnalyzerSetting setting_A();
AnalyzerSetting setting_L();
AnalyzerSetting setting_R();

// Random full-rank physical state (Ginibre construction), for property tests.
TwoPhotonState random_physical_state(std::mt19937_64& rng);

}  // namespace twocolor
