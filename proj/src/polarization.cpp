#include "twocolor/polarization.hpp"

#include <cmath>

#include "twocolor/numerics.hpp"

namespace twocolor {

namespace {

// Kronecker product over the (HH, HV, VH, VV) ordering: the signal-arm
// operator acts on the slow index.
Mat4c kron2(const Mat2c& a, const Mat2c& b) {
  Mat4c out;
  for (int r1 = 0; r1 < 2; ++r1)
    for (int r2 = 0; r2 < 2; ++r2)
      for (int c1 = 0; c1 < 2; ++c1)
        for (int c2 = 0; c2 < 2; ++c2)
          out(2 * r1 + r2, 2 * c1 + c2) = a(r1, c1) * b(r2, c2);
  return out;
}

}  // namespace

void TwoPhotonState::validate() const {
  const double herm_err = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (herm_err > 1e-12)
    throw DomainError("density matrix is not hermitian (max deviation " +
                      std::to_string(herm_err) + ")");
  const double trace_err = std::abs(rho.trace() - std::complex<double>(1.0));
  if (trace_err > 1e-12)
    throw DomainError("density matrix trace deviates from 1 by " +
                      std::to_string(trace_err));
  const double lam_min = min_eigenvalue();
  if (lam_min < -1e-10)
    throw DomainError("density matrix has negative eigenvalue " +
                      std::to_string(lam_min));
}

double TwoPhotonState::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Mat4c> solver(
      Mat4c(0.5 * (rho + rho.adjoint())));
  return solver.eigenvalues().minCoeff();
}

TwoPhotonState make_state(double bell_phase_rad, double offdiag_damping) {
  if (offdiag_damping < 0.0 || offdiag_damping > 1.0)
    throw DomainError("off-diagonal damping must lie in [0, 1], got " +
                      std::to_string(offdiag_damping));
  TwoPhotonState state;
  state.rho(0, 0) = 0.5;
  state.rho(3, 3) = 0.5;
  const std::complex<double> coherence =
      0.5 * offdiag_damping *
      std::exp(std::complex<double>(0.0, -bell_phase_rad));
  state.rho(0, 3) = coherence;
  state.rho(3, 0) = std::conj(coherence);
  return state;
}

Mat2c jones_hwp(double theta_rad) {
  const double c = std::cos(2.0 * theta_rad);
  const double s = std::sin(2.0 * theta_rad);
  Mat2c m;
  m << c, s, s, -c;
  return m;
}

Mat2c jones_qwp(double theta_rad) {
  const double c = std::cos(theta_rad);
  const double s = std::sin(theta_rad);
  const std::complex<double> i(0.0, 1.0);
  Mat2c m;
  m << c * c + i * s * s, (1.0 - i) * s * c, (1.0 - i) * s * c,
      s * s + i * c * c;
  return m;
}

Mat2c analyzer_chain(const AnalyzerSetting& s) {
  const Mat2c hwp = jones_hwp(s.hwp_angle_rad);
  if (!s.qwp_present) return hwp;
  return hwp * jones_qwp(s.qwp_angle_rad);
}

Mat2c pass_projector(const AnalyzerSetting& s) {
  const Mat2c u = analyzer_chain(s);
  Mat2c h = Mat2c::Zero();
  h(0, 0) = 1.0;
  return u.adjoint() * h * u;
}

Mat2c reject_projector(const AnalyzerSetting& s) {
  const Mat2c u = analyzer_chain(s);
  Mat2c v = Mat2c::Zero();
  v(1, 1) = 1.0;
  return u.adjoint() * v * u;
}

double projection_probability(const TwoPhotonState& state,
                              const AnalyzerSetting& signal,
                              const AnalyzerSetting& idler) {
  const Mat4c proj = kron2(pass_projector(signal), pass_projector(idler));
  return (state.rho * proj).trace().real();
}

std::array<double, 4> coincidence_probabilities(const TwoPhotonState& state,
                                                const AnalyzerSetting& signal,
                                                const AnalyzerSetting& idler) {
  const Mat2c ps = pass_projector(signal);
  const Mat2c rs = reject_projector(signal);
  const Mat2c pi = pass_projector(idler);
  const Mat2c ri = reject_projector(idler);
  const auto prob = [&](const Mat2c& a, const Mat2c& b) {
    return (state.rho * kron2(a, b)).trace().real();
  };
  return {prob(ps, pi), prob(ps, ri), prob(rs, pi), prob(rs, ri)};
}

double fidelity_direct(const TwoPhotonState& state) {
  return 0.5 * (state.rho(0, 0) + state.rho(0, 3) + state.rho(3, 0) +
                state.rho(3, 3))
             .real();
}

double fidelity_from_probabilities(double p_h, double p_v, double p_d,
                                   double p_a, double p_l, double p_r) {
  return 0.5 * (p_d + p_a - (p_r + p_l) + p_h + p_v);
}

double fidelity_from_visibilities(double v_hv, double v_da, double v_lr) {
  return 0.25 * (1.0 + v_hv + v_da - v_lr);
}

double basis_visibility(double n_ii, double n_ij, double n_ji, double n_jj) {
  const double total = n_ii + n_ij + n_ji + n_jj;
  if (total <= 0.0)
    throw DomainError("visibility undefined: no counts in basis");
  return (n_ii + n_jj - (n_ij + n_ji)) / total;
}

AnalyzerSetting setting_H() { return {0.0, false, 0.0}; }
AnalyzerSetting setting_V() { return {kPi / 4.0, false, 0.0}; }
AnalyzerSetting setting_D() { return {kPi / 8.0, false, 0.0}; }
AnalyzerSetting setting_A() {
  return {3.0 * kPi / 8.0, false, 0.0};
}
AnalyzerSetting setting_L() {
  return {0.0, true, kPi / 4.0};
}
AnalyzerSetting setting_R() {
  return {kPi / 4.0, true, kPi / 4.0};
}

TwoPhotonState random_physical_state(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat4c g;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      g(r, c) = std::complex<double>(gauss(rng), gauss(rng));
  Mat4c rho = g * g.adjoint();
  rho /= rho.trace();
  TwoPhotonState state;
  state.rho = 0.5 * (rho + rho.adjoint());
  return state;
}

}  // namespace twocolor
