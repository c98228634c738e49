#include "twocolor/qpm.hpp"

#include <cmath>
#include <sstream>

#include "twocolor/numerics.hpp"
#include "twocolor/phase.hpp"

namespace twocolor {

void QpmConfig::validate() const {
  if (!crystal) throw ConfigError("qpm: no crystal dispersion model set");
  if (!(poling_period_um > 0.0))
    throw ConfigError("qpm: poling period must be positive");
  if (qpm_order < 1 || qpm_order % 2 == 0)
    throw ConfigError("qpm: order must be a positive odd integer");
  if (!(t_min_c < t_max_c))
    throw ConfigError("qpm: empty temperature range");
}

double qpm_mismatch(const QpmConfig& config, double temperature_c,
                    double lambda_s_nm) {
  config.validate();
  const double lambda_i_nm =
      partner_wavelength(config.pump_nm, lambda_s_nm);
  const auto& n = *config.crystal;
  const double lp = config.pump_nm * 1e-3;
  const double ls = lambda_s_nm * 1e-3;
  const double li = lambda_i_nm * 1e-3;
  return n.index(config.pump_nm, temperature_c) / lp -
         n.index(lambda_s_nm, temperature_c) / ls -
         n.index(lambda_i_nm, temperature_c) / li -
         config.qpm_order / config.poling_period_um;
}

double degeneracy_temperature(const QpmConfig& config) {
  config.validate();
  const double degenerate = 2.0 * config.pump_nm;
  const auto mismatch_at_degeneracy = [&](double t) {
    return qpm_mismatch(config, t, degenerate);
  };
  return brent_root(mismatch_at_degeneracy, -50.0, 250.0, 1e-7);
}

std::pair<double, double> signal_wavelength_at_temperature(
    const QpmConfig& config, double temperature_c) {
  config.validate();
  const double degenerate = 2.0 * config.pump_nm;
  const double ftol = 1e-9 * config.qpm_order / config.poling_period_um;

  if (std::abs(qpm_mismatch(config, temperature_c, degenerate)) <= ftol)
    return {degenerate, degenerate};

  // On the signal branch the mismatch rises from -m/Lambda near the pump to
  // its maximum at degeneracy; a root exists iff the mismatch is positive
  // there. Scan for the sign-change interval nearest degeneracy (fallback for
  // any non-monotonic coefficient set), then polish.
  const auto f = [&](double ls) {
    return qpm_mismatch(config, temperature_c, ls);
  };
  // Both pair wavelengths must stay inside the dispersion model's validity
  // range; near the pump the partner diverges, so the scan floor is set by
  // the long-wavelength validity edge.
  const auto [valid_lo, valid_hi] = config.crystal->validity_nm();
  if (valid_hi <= degenerate)
    throw DomainError("crystal model " + config.crystal->display_name() +
                      " is not valid at the degenerate wavelength " +
                      std::to_string(degenerate) + " nm");
  double lo = std::max(config.pump_nm * 1.02, valid_lo);
  lo = std::max(lo, partner_wavelength(config.pump_nm, valid_hi)) + 0.5;
  const int n = 512;
  const double h = (degenerate - lo) / n;
  double a = 0.0, b = 0.0;
  bool found = false;
  double prev_x = degenerate, prev_v = f(degenerate);
  for (int i = 1; i <= n; ++i) {
    const double x = degenerate - i * h;
    const double v = f(x);
    if (prev_v == 0.0 || prev_v * v < 0.0) {
      a = x;
      b = prev_x;
      found = true;
      break;
    }
    prev_x = x;
    prev_v = v;
  }
  if (!found) {
    std::ostringstream os;
    os << "no phase match at " << temperature_c << " C for period "
       << config.poling_period_um << " um (order " << config.qpm_order
       << "): mismatch at degeneracy "
       << qpm_mismatch(config, temperature_c, degenerate)
       << " 1/um, near pump " << f(lo) << " 1/um";
    throw SolverError(os.str());
  }
  const double ls = brent_root(f, a, b, 1e-9, ftol);
  const double li = partner_wavelength(config.pump_nm, ls);
  return {std::min(ls, li), std::max(ls, li)};
}

double temperature_for_signal(const QpmConfig& config, double lambda_s_nm) {
  config.validate();
  const double degenerate = 2.0 * config.pump_nm;
  if (lambda_s_nm > degenerate)
    throw DomainError("signal wavelength " + std::to_string(lambda_s_nm) +
                      " nm is above degeneracy (" +
                      std::to_string(degenerate) + " nm): not on the signal "
                      "branch");
  const double t_deg = degeneracy_temperature(config);
  const double t_lo = std::max(config.t_min_c, t_deg);
  // Achievable span over the configured range.
  const auto span_message = [&]() {
    std::ostringstream os;
    const auto at_max = signal_wavelength_at_temperature(config, config.t_max_c);
    os << "target " << lambda_s_nm << " nm outside the achievable signal "
       << "range [" << at_max.first << ", "
       << (t_deg >= config.t_min_c ? degenerate
                                   : signal_wavelength_at_temperature(
                                         config, config.t_min_c)
                                         .first)
       << "] nm for " << config.t_min_c << "-" << config.t_max_c << " C";
    return os.str();
  };

  // Mismatch at fixed signal wavelength increases with temperature here;
  // bracket on the configured range and solve directly in T.
  const auto g = [&](double t) { return qpm_mismatch(config, t, lambda_s_nm); };
  const double ftol = 1e-9 * config.qpm_order / config.poling_period_um;
  const double g_lo = g(t_lo), g_hi = g(config.t_max_c);
  if (std::abs(g_lo) <= ftol) return t_lo;   // target sits on a range endpoint
  if (std::abs(g_hi) <= ftol) return config.t_max_c;
  if (g_lo * g_hi > 0.0) throw DomainError(span_message());
  return brent_root(g, t_lo, config.t_max_c, 5e-5);
}

std::vector<TuningPoint> tuning_curve(const QpmConfig& config, double t_min_c,
                                      double t_max_c, double step_c) {
  config.validate();
  if (!(step_c > 0.0)) throw ConfigError("tuning curve: step must be > 0");
  std::vector<TuningPoint> out;
  double t_deg = 0.0;
  bool have_deg = false;
  try {
    t_deg = degeneracy_temperature(config);
    have_deg = t_deg >= t_min_c && t_deg <= t_max_c;
  } catch (const SolverError&) {
    have_deg = false;
  }
  bool inserted_deg = false;
  const double degenerate = 2.0 * config.pump_nm;
  for (double t = t_min_c; t <= t_max_c + 1e-9; t += step_c) {
    if (have_deg && !inserted_deg && t >= t_deg) {
      out.push_back({t_deg, degenerate, degenerate});
      inserted_deg = true;
      if (std::abs(t - t_deg) < 1e-9) continue;
    }
    try {
      const auto [ls, li] = signal_wavelength_at_temperature(config, t);
      out.push_back({t, ls, li});
    } catch (const SolverError&) {
      // No phase match at this temperature; skip the row.
    }
  }
  if (have_deg && !inserted_deg)
    out.push_back({t_deg, degenerate, degenerate});
  return out;
}

}  // namespace twocolor
