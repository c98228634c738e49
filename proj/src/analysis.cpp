#include "twocolor/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "twocolor/numerics.hpp"

namespace twocolor {

double SineFit::eval(double theta_rad) const {
  return a * std::sin(4.0 * theta_rad) + b * std::cos(4.0 * theta_rad) +
         offset;
}

double SineFit::signed_amplitude(double parallel_rad) const {
  return eval(parallel_rad) - offset;
}

double SineFit::signed_amplitude_var(double parallel_rad) const {
  const double s = std::sin(4.0 * parallel_rad);
  const double c = std::cos(4.0 * parallel_rad);
  return s * s * covariance(0, 0) + c * c * covariance(1, 1) +
         2.0 * s * c * covariance(0, 1);
}

double SineFit::signed_amplitude_offset_cov(double parallel_rad) const {
  const double s = std::sin(4.0 * parallel_rad);
  const double c = std::cos(4.0 * parallel_rad);
  return s * covariance(0, 2) + c * covariance(1, 2);
}

namespace {

struct LinearSolution {
  Eigen::Vector3d beta;
  Eigen::Matrix3d normal_inverse;
};

LinearSolution solve_weighted(const Eigen::MatrixXd& x,
                              const Eigen::VectorXd& y,
                              const Eigen::VectorXd& w) {
  const Eigen::Matrix3d normal =
      x.transpose() * w.asDiagonal() * x;
  Eigen::FullPivLU<Eigen::Matrix3d> lu(normal);
  if (!lu.isInvertible())
    throw FitError(
        "sine fit is degenerate: sweep angles do not span the oscillation");
  LinearSolution sol;
  sol.normal_inverse = lu.inverse();
  sol.beta = sol.normal_inverse * (x.transpose() * (w.asDiagonal() * y));
  return sol;
}

}  // namespace

SineFit fit_sine(const std::vector<std::pair<double, double>>& points) {
  const int n = static_cast<int>(points.size());
  if (n < 4)
    throw FitError("sine fit needs at least 4 points, got " +
                   std::to_string(n));
  double lo = points.front().first, hi = points.front().first;
  for (const auto& [theta, count] : points) {
    lo = std::min(lo, theta);
    hi = std::max(hi, theta);
  }
  if (hi - lo < kPi / 4.0 - 1e-9)
    throw FitError(
        "sine fit needs the sweep to span at least half an oscillation "
        "period (pi/4 of wave-plate angle)");

  Eigen::MatrixXd x(n, 3);
  Eigen::VectorXd y(n);
  for (int k = 0; k < n; ++k) {
    x(k, 0) = std::sin(4.0 * points[k].first);
    x(k, 1) = std::cos(4.0 * points[k].first);
    x(k, 2) = 1.0;
    y(k) = points[k].second;
  }

  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  LinearSolution sol = solve_weighted(x, y, ones);

  SineFit fit;
  // With enough counts the point variance tracks the mean; one reweighted
  // pass with weights from the first fit. Sparse data keeps the unweighted
  // solution, with covariance scaled by the residual variance instead.
  if (sol.beta(2) >= 10.0) {
    Eigen::VectorXd w(n);
    const Eigen::VectorXd mu = x * sol.beta;
    for (int k = 0; k < n; ++k) w(k) = 1.0 / std::max(mu(k), 1.0);
    sol = solve_weighted(x, y, w);
    fit.covariance = sol.normal_inverse;
    fit.poisson_weighted = true;
  } else {
    const Eigen::VectorXd resid = y - x * sol.beta;
    const double sigma2 =
        n > 3 ? resid.squaredNorm() / (n - 3) : resid.squaredNorm();
    fit.covariance = sigma2 * sol.normal_inverse;
    fit.poisson_weighted = false;
  }

  fit.a = sol.beta(0);
  fit.b = sol.beta(1);
  fit.offset = sol.beta(2);
  fit.amplitude = std::hypot(fit.a, fit.b);
  fit.phase_const = std::atan2(fit.b, fit.a);
  if (fit.phase_const < 0.0) fit.phase_const += kTwoPi;
  const Eigen::VectorXd resid = y - x * sol.beta;
  fit.residual_rms = std::sqrt(resid.squaredNorm() / n);
  return fit;
}

BasisVisibility visibility_from_fit(const FittedSweep& sweep_i,
                                    const FittedSweep& sweep_j) {
  const double a_i = sweep_i.fit.signed_amplitude(sweep_i.parallel_angle_rad);
  const double a_j = sweep_j.fit.signed_amplitude(sweep_j.parallel_angle_rad);
  const double c_i = sweep_i.fit.offset;
  const double c_j = sweep_j.fit.offset;
  const double total = c_i + c_j;
  if (total <= 0.0)
    throw FitError("combined sweep offset is not positive; visibility "
                   "undefined");

  BasisVisibility vis;
  vis.v_i = a_i / c_i;
  vis.v_j = a_j / c_j;
  vis.value = (a_i + a_j) / total;

  const double var_s =
      sweep_i.fit.signed_amplitude_var(sweep_i.parallel_angle_rad) +
      sweep_j.fit.signed_amplitude_var(sweep_j.parallel_angle_rad);
  const double var_t =
      sweep_i.fit.covariance(2, 2) + sweep_j.fit.covariance(2, 2);
  const double cov_st =
      sweep_i.fit.signed_amplitude_offset_cov(sweep_i.parallel_angle_rad) +
      sweep_j.fit.signed_amplitude_offset_cov(sweep_j.parallel_angle_rad);
  const double v = vis.value;
  const double var_v =
      (var_s + v * v * var_t - 2.0 * v * cov_st) / (total * total);
  vis.sigma = std::sqrt(std::max(var_v, 0.0));
  return vis;
}

FidelityReport fidelity_report(
    const std::map<std::string, std::pair<FittedSweep, FittedSweep>>& bases) {
  for (const char* required : {"HV", "DA", "LR"})
    if (!bases.count(required))
      throw DataError(std::string("fidelity needs all three bases; missing ") +
                      required);

  FidelityReport report;
  report.v_hv = visibility_from_fit(bases.at("HV").first, bases.at("HV").second);
  report.v_da = visibility_from_fit(bases.at("DA").first, bases.at("DA").second);
  report.v_lr = visibility_from_fit(bases.at("LR").first, bases.at("LR").second);

  report.fidelity = 0.25 * (1.0 + report.v_hv.value + report.v_da.value -
                            report.v_lr.value);
  report.sigma = 0.25 * std::sqrt(report.v_hv.sigma * report.v_hv.sigma +
                                  report.v_da.sigma * report.v_da.sigma +
                                  report.v_lr.sigma * report.v_lr.sigma);
  report.entangled = report.fidelity - report.sigma > 0.5;
  report.unphysical_warning = report.fidelity < 0.0 || report.fidelity > 1.0;
  for (const auto& [label, sweeps] : bases)
    report.fits[label] = {sweeps.first, sweeps.second};
  return report;
}

FidelityReport analyze_records(const std::vector<CountRecord>& records) {
  if (records.empty()) throw DataError("no records to analyze");

  // Group by basis, then by the fixed idler angle (quantized to tolerate
  // text round-trips).
  const auto angle_key = [](double rad) {
    return static_cast<long long>(std::llround(rad * 1e9));
  };
  std::map<std::string,
           std::map<long long, std::vector<std::pair<double, double>>>>
      grouped;
  std::map<std::string, std::map<long long, double>> angles;
  for (const auto& rec : records) {
    const long long key = angle_key(rec.hwp_idler_rad);
    grouped[rec.basis_label][key].push_back(
        {rec.hwp_signal_rad, rec.counts[0]});
    angles[rec.basis_label][key] = rec.hwp_idler_rad;
  }

  std::map<std::string, std::pair<FittedSweep, FittedSweep>> bases;
  for (const auto& [label, sweeps] : grouped) {
    if (sweeps.size() != 2) {
      std::ostringstream os;
      os << "basis " << label << " has " << sweeps.size()
         << " fixed-idler sweeps; expected 2";
      throw DataError(os.str());
    }
    std::vector<FittedSweep> fitted;
    for (const auto& [key, pts] : sweeps) {
      FittedSweep fs;
      fs.fit = fit_sine(pts);
      fs.parallel_angle_rad = angles[label][key];
      fitted.push_back(fs);
    }
    bases[label] = {fitted[0], fitted[1]};
  }
  return fidelity_report(bases);
}

double bootstrap_uncertainty(const std::vector<CountRecord>& records,
                             int resamples, std::uint64_t seed) {
  if (resamples < 2)
    throw ConfigError("bootstrap needs at least 2 resamples");
  std::vector<double> fidelities;
  fidelities.reserve(resamples);
  std::vector<CountRecord> resampled = records;
  for (int r = 0; r < resamples; ++r) {
    std::mt19937_64 rng(substream_seed(seed, static_cast<std::uint64_t>(r)));
    for (std::size_t k = 0; k < records.size(); ++k) {
      for (int c = 0; c < 4; ++c) {
        const double mean = records[k].counts[c];
        if (mean > 0.0) {
          std::poisson_distribution<long long> pois(mean);
          resampled[k].counts[c] = static_cast<double>(pois(rng));
        } else {
          resampled[k].counts[c] = 0.0;
        }
      }
    }
    fidelities.push_back(analyze_records(resampled).fidelity);
  }
  double mean = 0.0;
  for (double f : fidelities) mean += f;
  mean /= fidelities.size();
  double ss = 0.0;
  for (double f : fidelities) ss += (f - mean) * (f - mean);
  return std::sqrt(ss / (fidelities.size() - 1));
}

double fit_oscillation_period(
    const std::vector<std::pair<double, double>>& points) {
  const int n = static_cast<int>(points.size());
  if (n < 7)
    throw FitError("period fit needs at least 7 points, got " +
                   std::to_string(n));
  double lo = points.front().first, hi = points.front().first;
  for (const auto& [xv, yv] : points) {
    lo = std::min(lo, xv);
    hi = std::max(hi, xv);
  }
  const double span = hi - lo;
  if (!(span > 0.0)) throw FitError("period fit needs a nonzero scan span");
  const double min_period = 4.0 * span / n;  // a few points per cycle
  const double max_period = 4.0 * span;

  const auto rss_at = [&](double omega) {
    // Linear LS in (cos, sin, const) at fixed frequency.
    Eigen::Matrix3d normal = Eigen::Matrix3d::Zero();
    Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
    for (const auto& [xv, yv] : points) {
      const Eigen::Vector3d row(std::cos(omega * xv), std::sin(omega * xv),
                                1.0);
      normal += row * row.transpose();
      rhs += row * yv;
    }
    Eigen::FullPivLU<Eigen::Matrix3d> lu(normal);
    if (!lu.isInvertible()) return std::numeric_limits<double>::infinity();
    const Eigen::Vector3d beta = lu.solve(rhs);
    double rss = 0.0;
    for (const auto& [xv, yv] : points) {
      const double model = beta(0) * std::cos(omega * xv) +
                           beta(1) * std::sin(omega * xv) + beta(2);
      rss += (yv - model) * (yv - model);
    }
    return rss;
  };

  const double omega_lo = kTwoPi / max_period;
  const double omega_hi = kTwoPi / min_period;
  // Frequency resolution ~ 2*pi/span; step a quarter of that.
  const double domega = kPi / (2.0 * span);
  double best_omega = omega_lo;
  double best_rss = std::numeric_limits<double>::infinity();
  for (double omega = omega_lo; omega <= omega_hi; omega += domega) {
    const double rss = rss_at(omega);
    if (rss < best_rss) {
      best_rss = rss;
      best_omega = omega;
    }
  }
  const double refine_lo = std::max(omega_lo, best_omega - domega);
  const double refine_hi = std::min(omega_hi, best_omega + domega);
  const double omega = golden_min(rss_at, refine_lo, refine_hi, 1e-10);
  return kTwoPi / omega;
}

}  // namespace twocolor
