#include "twocolor/phase.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "twocolor/numerics.hpp"

namespace twocolor {

double OpticalElement::delta_n(double lambda_nm) const {
  double dn = index_H->index(lambda_nm, temperature_c);
  if (index_V) dn -= index_V->index(lambda_nm, temperature_c);
  return dn;
}

double OpticalElement::delta_group_index(double lambda_nm) const {
  double dg = index_H->group_index(lambda_nm, temperature_c);
  if (index_V) dg -= index_V->group_index(lambda_nm, temperature_c);
  return dg;
}

double OpticalElement::delta_dn_dT(double lambda_nm) const {
  double d = index_H->dn_dT(lambda_nm, temperature_c);
  if (index_V) d -= index_V->dn_dT(lambda_nm, temperature_c);
  return d;
}

OpticalStack OpticalStack::concat(const OpticalStack& other) const {
  OpticalStack out = *this;
  out.elements.insert(out.elements.end(), other.elements.begin(),
                      other.elements.end());
  return out;
}

namespace {
void check_element(const OpticalElement& e) {
  if (!e.index_H) throw ConfigError("optical element '" + e.label +
                                    "' has no H-axis dispersion model");
  if (!(e.length_mm > 0.0))
    throw ConfigError("optical element '" + e.label +
                      "' needs a positive length");
  if (e.transit_count < 1)
    throw ConfigError("optical element '" + e.label +
                      "' needs transit_count >= 1");
}
}  // namespace

double pair_phase(const OpticalStack& stack, double lambda_s_nm,
                  double lambda_i_nm) {
  const double ls_um = lambda_s_nm * 1e-3;
  const double li_um = lambda_i_nm * 1e-3;
  double total = 0.0;
  for (const auto& e : stack.elements) {
    check_element(e);
    const double l_um = e.length_mm * 1e3;
    total += e.transit_count * l_um *
             (e.delta_n(lambda_s_nm) / ls_um + e.delta_n(lambda_i_nm) / li_um);
  }
  return kTwoPi * total;
}

double single_photon_phase(const OpticalStack& stack, double lambda_nm) {
  const double l_um = lambda_nm * 1e-3;
  double total = 0.0;
  for (const auto& e : stack.elements) {
    check_element(e);
    total += e.transit_count * e.length_mm * 1e3 * e.delta_n(lambda_nm) / l_um;
  }
  return kTwoPi * total;
}

double single_photon_phase_slope(const OpticalStack& stack, double lambda_nm) {
  // d/dl [dn(l)/l] = (dn' l - dn)/l^2 = -dg/l^2 with the group-index
  // difference dg = dn - l dn'.
  const double l_um = lambda_nm * 1e-3;
  double total = 0.0;
  for (const auto& e : stack.elements) {
    check_element(e);
    total -= e.transit_count * e.length_mm * 1e3 *
             e.delta_group_index(lambda_nm) / (l_um * l_um);
  }
  return kTwoPi * total;
}

double partner_wavelength(double pump_nm, double lambda_nm) {
  const double inv = 1.0 / pump_nm - 1.0 / lambda_nm;
  if (!(inv > 0.0))
    throw DomainError("no energy-conserving partner: wavelength " +
                      std::to_string(lambda_nm) + " nm with pump " +
                      std::to_string(pump_nm) + " nm");
  return 1.0 / inv;
}

double pump_from_pair(double lambda_s_nm, double lambda_i_nm) {
  return 1.0 / (1.0 / lambda_s_nm + 1.0 / lambda_i_nm);
}

double pair_phase_slope(const OpticalStack& stack, double pump_nm,
                        double lambda_s_nm) {
  // With the idler slaved by energy conservation, the derivative of
  // dn(ls)/ls + dn(li)/li collapses to [dg(li) - dg(ls)]/ls^2 per element.
  const double lambda_i_nm = partner_wavelength(pump_nm, lambda_s_nm);
  const double ls_um = lambda_s_nm * 1e-3;
  double total = 0.0;
  for (const auto& e : stack.elements) {
    check_element(e);
    total += e.transit_count * e.length_mm * 1e3 *
             (e.delta_group_index(lambda_i_nm) -
              e.delta_group_index(lambda_s_nm)) /
             (ls_um * ls_um);
  }
  return kTwoPi * total;
}

std::vector<ProfilePoint> phase_profile(const OpticalStack& stack,
                                        const std::vector<double>& grid_nm,
                                        PairingMode mode, double pump_nm,
                                        double reference_lambda_nm) {
  if (grid_nm.empty()) return {};
  std::vector<ProfilePoint> out;
  out.reserve(grid_nm.size());
  for (double l : grid_nm) {
    double phi;
    if (mode == PairingMode::energy_conserving_pair) {
      phi = pair_phase(stack, l, partner_wavelength(pump_nm, l));
    } else {
      phi = single_photon_phase(stack, l);
    }
    out.push_back({l, phi});
  }
  // Subtract the value at the grid point nearest the reference wavelength so
  // only the profile shape remains.
  std::size_t ref = 0;
  if (reference_lambda_nm > 0.0) {
    double best = std::abs(grid_nm[0] - reference_lambda_nm);
    for (std::size_t i = 1; i < grid_nm.size(); ++i) {
      const double d = std::abs(grid_nm[i] - reference_lambda_nm);
      if (d < best) {
        best = d;
        ref = i;
      }
    }
  }
  const double offset = out[ref].phase_rad;
  for (auto& p : out) p.phase_rad -= offset;
  return out;
}

double stationary_signal_wavelength(const OpticalStack& stack, double pump_nm,
                                    double hint_nm, double lo_nm,
                                    double hi_nm) {
  const auto slope = [&](double l) { return pair_phase_slope(stack, pump_nm, l); };
  // Scan for sign changes and keep the root interval closest to the hint.
  const int n = 256;
  const double h = (hi_nm - lo_nm) / n;
  double best_a = 0.0, best_b = 0.0, best_dist = -1.0;
  double prev_x = lo_nm, prev_v = slope(lo_nm);
  for (int i = 1; i <= n; ++i) {
    const double x = lo_nm + i * h;
    const double v = slope(x);
    if (prev_v == 0.0 || prev_v * v < 0.0) {
      const double mid = 0.5 * (prev_x + x);
      const double dist = std::abs(mid - hint_nm);
      if (best_dist < 0.0 || dist < best_dist) {
        best_dist = dist;
        best_a = prev_x;
        best_b = x;
      }
    }
    prev_x = x;
    prev_v = v;
  }
  if (best_dist < 0.0) {
    std::ostringstream os;
    os << "no stationary point of the pair phase in [" << lo_nm << ", "
       << hi_nm << "] nm; slope at ends " << slope(lo_nm) << " / "
       << slope(hi_nm) << " rad/um";
    throw SolverError(os.str());
  }
  return brent_root(slope, best_a, best_b, 1e-6);
}

CompensationDesign optimal_compensator_length(
    const OpticalStack& first_pass, const MaterialModel& comp_o,
    const MaterialModel& comp_e, double lambda_s_nm, double lambda_i_nm,
    double temperature_c, FlatPhaseObjective objective, double bracket_lo_mm,
    double bracket_hi_mm) {
  if (&comp_o == &comp_e)
    throw ConfigError("compensator needs distinct ordinary/extraordinary "
                      "axis models");
  const double pump_nm = pump_from_pair(lambda_s_nm, lambda_i_nm);

  const auto with_compensator = [&](double length_mm) {
    OpticalStack stack = first_pass;
    stack.elements.push_back(OpticalElement{"compensator", &comp_o, &comp_e,
                                            length_mm, temperature_c, 1});
    return stack;
  };

  double length = 0.0;
  if (objective == FlatPhaseObjective::energy_conserving_pair) {
    const auto slope = [&](double L) {
      return pair_phase_slope(with_compensator(L), pump_nm, lambda_s_nm);
    };
    const double f_lo = slope(bracket_lo_mm), f_hi = slope(bracket_hi_mm);
    if (f_lo * f_hi > 0.0) {
      std::ostringstream os;
      os << "flat-phase solver: pair-phase slope does not change sign over ["
         << bracket_lo_mm << ", " << bracket_hi_mm << "] mm (slope "
         << f_lo << " rad/um at " << bracket_lo_mm << " mm, " << f_hi
         << " rad/um at " << bracket_hi_mm
         << " mm); the compensator dispersion cannot cancel the stack";
      throw SolverError(os.str());
    }
    length = brent_root(slope, bracket_lo_mm, bracket_hi_mm, 1e-5);
  } else {
    const auto objective_fn = [&](double L) {
      const auto stack = with_compensator(L);
      const double ss = single_photon_phase_slope(stack, lambda_s_nm);
      const double si = single_photon_phase_slope(stack, lambda_i_nm);
      return ss * ss + si * si;
    };
    length = golden_min(objective_fn, bracket_lo_mm, bracket_hi_mm, 0.01);
  }

  CompensationDesign design;
  design.signal_nm = lambda_s_nm;
  design.idler_nm = lambda_i_nm;
  design.pump_nm = pump_nm;
  design.optimal_length_mm = length;
  design.source_label = comp_e.source_label();
  design.objective = objective;
  const auto stack = with_compensator(length);
  design.residual_slope_signal = single_photon_phase_slope(stack, lambda_s_nm);
  design.residual_slope_idler = single_photon_phase_slope(stack, lambda_i_nm);
  design.residual_pair_slope = pair_phase_slope(stack, pump_nm, lambda_s_nm);
  try {
    design.plateau_signal_nm =
        stationary_signal_wavelength(stack, pump_nm, lambda_s_nm);
    design.plateau_idler_nm =
        partner_wavelength(pump_nm, design.plateau_signal_nm);
  } catch (const SolverError&) {
    design.plateau_signal_nm = 0.0;  // no plateau in band (per-photon mode)
    design.plateau_idler_nm = 0.0;
  }
  return design;
}

double temperature_phase_slope(const OpticalStack& stack, double lambda_s_nm,
                               double lambda_i_nm) {
  const double ls_um = lambda_s_nm * 1e-3;
  const double li_um = lambda_i_nm * 1e-3;
  double total = 0.0;
  for (const auto& e : stack.elements) {
    check_element(e);
    total += e.transit_count * e.length_mm * 1e3 *
             (e.delta_dn_dT(lambda_s_nm) / ls_um +
              e.delta_dn_dT(lambda_i_nm) / li_um);
  }
  return kTwoPi * total;
}

PiShift pi_shift_temperature(const OpticalStack& slab, double lambda_s_nm,
                             double lambda_i_nm) {
  const double slope = temperature_phase_slope(slab, lambda_s_nm, lambda_i_nm);
  if (std::abs(slope) < 1e-12)
    throw DomainError("phase is not temperature-tunable: thermo-optic slope "
                      "is zero for this stack");
  return PiShift{kPi / std::abs(slope), slope};
}

double phase_to_bell_angle(double phase_rad) {
  double r = std::fmod(phase_rad, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r;
}

SlabRounding round_to_slab_stock(double ideal_mm,
                                 const std::vector<double>& stock_mm) {
  if (stock_mm.empty()) throw ConfigError("empty slab stock");
  // Enumerate achievable subset sums; stocks are small (~10 pieces).
  struct Node {
    double sum;
    std::vector<double> slabs;
  };
  std::vector<Node> sums{{0.0, {}}};
  for (double piece : stock_mm) {
    const std::size_t n = sums.size();
    for (std::size_t i = 0; i < n; ++i) {
      Node next = sums[i];
      next.sum += piece;
      next.slabs.push_back(piece);
      sums.push_back(std::move(next));
    }
  }
  const Node* best = nullptr;
  for (const auto& node : sums) {
    if (node.sum <= 0.0) continue;
    if (!best || std::abs(node.sum - ideal_mm) <
                     std::abs(best->sum - ideal_mm) - 1e-12 ||
        (std::abs(std::abs(node.sum - ideal_mm) -
                  std::abs(best->sum - ideal_mm)) <= 1e-12 &&
         node.sum < best->sum)) {
      best = &node;
    }
  }
  SlabRounding out;
  out.length_mm = best->sum;
  out.residual_mm = best->sum - ideal_mm;
  out.slabs = best->slabs;
  std::sort(out.slabs.rbegin(), out.slabs.rend());
  return out;
}

}  // namespace twocolor
