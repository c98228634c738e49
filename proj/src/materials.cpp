#include "twocolor/materials.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "twocolor/numerics.hpp"

namespace twocolor {

using nlohmann::json;

std::string axis_name(Axis a) {
  switch (a) {
    case Axis::ordinary: return "ordinary";
    case Axis::extraordinary: return "extraordinary";
    case Axis::isotropic: return "isotropic";
  }
  return "?";
}

Axis axis_from_name(const std::string& s) {
  if (s == "ordinary" || s == "o") return Axis::ordinary;
  if (s == "extraordinary" || s == "e") return Axis::extraordinary;
  if (s == "isotropic") return Axis::isotropic;
  throw ConfigError("unknown axis name '" + s + "'");
}

std::string form_name(DispersionForm f) {
  switch (f) {
    case DispersionForm::constant_index: return "constant_index";
    case DispersionForm::sellmeier_abcd: return "sellmeier_abcd";
    case DispersionForm::sellmeier_rational3: return "sellmeier_rational3";
    case DispersionForm::sellmeier_fseries: return "sellmeier_fseries";
  }
  return "?";
}

DispersionForm form_from_name(const std::string& s) {
  if (s == "constant_index") return DispersionForm::constant_index;
  if (s == "sellmeier_abcd") return DispersionForm::sellmeier_abcd;
  if (s == "sellmeier_rational3") return DispersionForm::sellmeier_rational3;
  if (s == "sellmeier_fseries") return DispersionForm::sellmeier_fseries;
  throw ConfigError("unknown dispersion form '" + s + "'");
}

MaterialModel::MaterialModel(std::string material, Axis axis,
                             std::string source_label, DispersionForm form,
                             std::map<std::string, double> coeff,
                             std::vector<ThermoTerm> thermo,
                             double lambda_min_nm, double lambda_max_nm,
                             double reference_temperature_c)
    : material_(std::move(material)),
      axis_(axis),
      source_label_(std::move(source_label)),
      form_(form),
      coeff_(std::move(coeff)),
      thermo_(std::move(thermo)),
      lambda_min_nm_(lambda_min_nm),
      lambda_max_nm_(lambda_max_nm),
      reference_temperature_c_(reference_temperature_c) {}

std::string MaterialModel::display_name() const {
  std::string ax = axis_ == Axis::ordinary ? "o"
                   : axis_ == Axis::extraordinary ? "e"
                                                  : "iso";
  return material_ + "/" + source_label_ + "/" + ax;
}

void MaterialModel::check_range(double lambda_nm) const {
  if (!(lambda_nm >= lambda_min_nm_ && lambda_nm <= lambda_max_nm_)) {
    std::ostringstream os;
    os << "wavelength " << lambda_nm << " nm outside validity range ["
       << lambda_min_nm_ << ", " << lambda_max_nm_ << "] nm of model "
       << display_name();
    throw DomainError(os.str());
  }
}

double MaterialModel::coeff_at(const std::string& key) const {
  auto it = coeff_.find(key);
  if (it == coeff_.end())
    throw ConfigError("model " + display_name() + " missing coefficient '" +
                      key + "'");
  return it->second;
}

std::array<double, 4> MaterialModel::fseries_b() const {
  for (const auto& t : thermo_) {
    if (t.type == "f_series") {
      return {t.params.at("b1"), t.params.at("b2"), t.params.at("b3"),
              t.params.at("b4")};
    }
  }
  return {0.0, 0.0, 0.0, 0.0};
}

double MaterialModel::linear_thermo_offset(double temperature_c) const {
  double dn = 0.0;
  for (const auto& t : thermo_) {
    if (t.type == "linear_dn_dT")
      dn += t.params.at("per_K") * (temperature_c - reference_temperature_c_);
  }
  return dn;
}

double MaterialModel::linear_thermo_slope() const {
  double s = 0.0;
  for (const auto& t : thermo_)
    if (t.type == "linear_dn_dT") s += t.params.at("per_K");
  return s;
}

namespace {
// The fseries temperature argument used by the MgO:LN form.
inline double fseries_f(double t_c) { return (t_c - 24.5) * (t_c + 570.82); }
inline double fseries_df(double t_c) { return 2.0 * t_c + 546.32; }
}  // namespace

double MaterialModel::n_squared(double l_um, double temperature_c) const {
  const double l2 = l_um * l_um;
  switch (form_) {
    case DispersionForm::constant_index: {
      const double n0 = coeff_at("n");
      return n0 * n0;
    }
    case DispersionForm::sellmeier_abcd:
      return coeff_at("A") + coeff_at("B") / (l2 - coeff_at("C")) -
             coeff_at("D") * l2;
    case DispersionForm::sellmeier_rational3:
      return 1.0 + coeff_at("B1") * l2 / (l2 - coeff_at("C1")) +
             coeff_at("B2") * l2 / (l2 - coeff_at("C2")) +
             coeff_at("B3") * l2 / (l2 - coeff_at("C3"));
    case DispersionForm::sellmeier_fseries: {
      const auto b = fseries_b();
      const double f = fseries_f(temperature_c);
      const double cc = coeff_at("a3") + b[2] * f;
      return coeff_at("a1") + b[0] * f +
             (coeff_at("a2") + b[1] * f) / (l2 - cc * cc) +
             (coeff_at("a4") + b[3] * f) / (l2 - coeff_at("a5") * coeff_at("a5")) -
             coeff_at("a6") * l2;
    }
  }
  throw ConfigError("unhandled dispersion form");
}

double MaterialModel::dn2_dlambda(double l_um, double temperature_c) const {
  const double l2 = l_um * l_um;
  switch (form_) {
    case DispersionForm::constant_index:
      return 0.0;
    case DispersionForm::sellmeier_abcd: {
      const double den = l2 - coeff_at("C");
      return -2.0 * l_um * (coeff_at("B") / (den * den) + coeff_at("D"));
    }
    case DispersionForm::sellmeier_rational3: {
      double s = 0.0;
      const std::array<std::pair<const char*, const char*>, 3> terms = {
          std::pair{"B1", "C1"}, std::pair{"B2", "C2"}, std::pair{"B3", "C3"}};
      for (const auto& [bk, ck] : terms) {
        const double den = l2 - coeff_at(ck);
        s += -2.0 * coeff_at(bk) * coeff_at(ck) * l_um / (den * den);
      }
      return s;
    }
    case DispersionForm::sellmeier_fseries: {
      const auto b = fseries_b();
      const double f = fseries_f(temperature_c);
      const double cc = coeff_at("a3") + b[2] * f;
      const double d1 = l2 - cc * cc;
      const double d2 = l2 - coeff_at("a5") * coeff_at("a5");
      return -2.0 * l_um *
             ((coeff_at("a2") + b[1] * f) / (d1 * d1) +
              (coeff_at("a4") + b[3] * f) / (d2 * d2) + coeff_at("a6"));
    }
  }
  throw ConfigError("unhandled dispersion form");
}

double MaterialModel::dn2_dT(double l_um, double temperature_c) const {
  if (form_ != DispersionForm::sellmeier_fseries) return 0.0;
  const auto b = fseries_b();
  const double f = fseries_f(temperature_c);
  const double df = fseries_df(temperature_c);
  const double l2 = l_um * l_um;
  const double cc = coeff_at("a3") + b[2] * f;
  const double d1 = l2 - cc * cc;
  const double d2 = l2 - coeff_at("a5") * coeff_at("a5");
  // d/df of (a2 + b2 f)/(l2 - cc(f)^2) keeps both the numerator and the
  // moving-pole contributions.
  const double pole_term = (coeff_at("a2") + b[1] * f) * 2.0 * cc * b[2] /
                           (d1 * d1);
  return df * (b[0] + b[1] / d1 + pole_term + b[3] / d2);
}

double MaterialModel::index(double lambda_nm, double temperature_c) const {
  check_range(lambda_nm);
  const double l_um = lambda_nm * 1e-3;
  const double n2 = n_squared(l_um, temperature_c);
  if (!(n2 > 0.0) || !std::isfinite(n2))
    throw DomainError("model " + display_name() +
                      " evaluates to a non-physical index at " +
                      std::to_string(lambda_nm) + " nm");
  return std::sqrt(n2) + linear_thermo_offset(temperature_c);
}

double MaterialModel::dn_dlambda_um(double lambda_nm,
                                    double temperature_c) const {
  check_range(lambda_nm);
  const double l_um = lambda_nm * 1e-3;
  const double n2 = n_squared(l_um, temperature_c);
  return dn2_dlambda(l_um, temperature_c) / (2.0 * std::sqrt(n2));
}

double MaterialModel::dn_dT(double lambda_nm, double temperature_c) const {
  check_range(lambda_nm);
  const double l_um = lambda_nm * 1e-3;
  const double n2 = n_squared(l_um, temperature_c);
  return dn2_dT(l_um, temperature_c) / (2.0 * std::sqrt(n2)) +
         linear_thermo_slope();
}

double MaterialModel::group_index(double lambda_nm,
                                  double temperature_c) const {
  const double l_um = lambda_nm * 1e-3;
  return index(lambda_nm, temperature_c) -
         l_um * dn_dlambda_um(lambda_nm, temperature_c);
}

bool MaterialModel::temperature_dependent() const {
  for (const auto& t : thermo_) {
    if (t.type == "linear_dn_dT" && t.params.at("per_K") != 0.0) return true;
    if (t.type == "f_series") {
      for (const auto& [k, v] : t.params)
        if (v != 0.0) return true;
    }
  }
  return false;
}

json MaterialModel::to_json() const {
  json coeff;
  for (const auto& [k, v] : coeff_) coeff[k] = v;
  json thermo = json::array();
  for (const auto& t : thermo_) {
    json item;
    item["type"] = t.type;
    for (const auto& [k, v] : t.params) item[k] = v;
    thermo.push_back(item);
  }
  return json{{"form", form_name(form_)},
              {"coefficients", coeff},
              {"thermo_optic", thermo}};
}

MaterialModel MaterialModel::from_json(const json& axis_block,
                                       const std::string& material, Axis axis,
                                       const std::string& source_label,
                                       double lambda_min_nm,
                                       double lambda_max_nm,
                                       double reference_temperature_c) {
  if (!axis_block.contains("form") || !axis_block.contains("coefficients"))
    throw ConfigError("material " + material + "/" + source_label +
                      ": axis block needs 'form' and 'coefficients'");
  std::map<std::string, double> coeff;
  for (const auto& [k, v] : axis_block.at("coefficients").items())
    coeff[k] = v.get<double>();
  std::vector<ThermoTerm> thermo;
  for (const auto& item : axis_block.value("thermo_optic", json::array())) {
    ThermoTerm t;
    t.type = item.at("type").get<std::string>();
    if (t.type != "linear_dn_dT" && t.type != "f_series")
      throw ConfigError("material " + material + "/" + source_label +
                        ": unknown thermo_optic type '" + t.type + "'");
    for (const auto& [k, v] : item.items())
      if (k != "type") t.params[k] = v.get<double>();
    thermo.push_back(std::move(t));
  }
  return MaterialModel(material, axis, source_label,
                       form_from_name(axis_block.at("form").get<std::string>()),
                       std::move(coeff), std::move(thermo), lambda_min_nm,
                       lambda_max_nm, reference_temperature_c);
}

MaterialRegistry MaterialRegistry::load_directory(
    const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir))
    throw ConfigError("material data directory not found: " + dir.string());
  MaterialRegistry reg;
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".json") paths.push_back(entry.path());
  std::sort(paths.begin(), paths.end());
  if (paths.empty())
    throw ConfigError("no material data files (*.json) in " + dir.string());

  for (const auto& path : paths) {
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    json j;
    try {
      j = json::parse(text);
    } catch (const std::exception& e) {
      throw ConfigError("failed to parse " + path.string() + ": " + e.what());
    }
    MaterialFile file;
    file.path = path;
    file.content_hash = fnv1a64(text.data(), text.size());
    try {
      file.material = j.at("material").get<std::string>();
      file.source_label = j.at("source_label").get<std::string>();
      file.notes = j.value("notes", "");
      file.reference_temperature_c = j.at("reference_temperature_c").get<double>();
      const auto range = j.at("validity_wavelength_nm");
      file.lambda_min_nm = range.at(0).get<double>();
      file.lambda_max_nm = range.at(1).get<double>();
      for (const auto& [axis_key, axis_block] : j.at("axes").items()) {
        const Axis axis = axis_from_name(axis_key);
        reg.add(MaterialModel::from_json(axis_block, file.material, axis,
                                         file.source_label, file.lambda_min_nm,
                                         file.lambda_max_nm,
                                         file.reference_temperature_c));
      }
      for (const auto& a : j.value("anchors", json::array())) {
        Anchor anchor;
        anchor.kind = a.at("kind").get<std::string>();
        if (a.contains("axis"))
          anchor.axis = axis_from_name(a.at("axis").get<std::string>());
        anchor.wavelength_nm = a.at("wavelength_nm").get<double>();
        anchor.temperature_c = a.at("temperature_c").get<double>();
        anchor.value = a.at("value").get<double>();
        anchor.tolerance = a.at("tolerance").get<double>();
        file.anchors.push_back(anchor);
      }
    } catch (const json::exception& e) {
      throw ConfigError("bad material file " + path.string() + ": " + e.what());
    }
    reg.files_.push_back(std::move(file));
  }
  return reg;
}

void MaterialRegistry::add(MaterialModel model) {
  auto key = std::make_tuple(model.material(), model.axis(),
                             model.source_label());
  models_[std::move(key)] = std::move(model);
}

bool MaterialRegistry::has(const std::string& material, Axis axis,
                           const std::string& source_label) const {
  return models_.count({material, axis, source_label}) > 0;
}

const MaterialModel& MaterialRegistry::get(
    const std::string& material, Axis axis,
    const std::string& source_label) const {
  auto it = models_.find({material, axis, source_label});
  if (it == models_.end()) {
    std::ostringstream os;
    os << "no model for (" << material << ", " << axis_name(axis) << ", "
       << source_label << "); registered:";
    for (const auto& [key, model] : models_)
      os << " " << model.display_name();
    throw LookupError(os.str());
  }
  return it->second;
}

double MaterialRegistry::birefringence(const std::string& material,
                                       const std::string& source_label,
                                       double lambda_nm,
                                       double temperature_c) const {
  if (has(material, Axis::isotropic, source_label))
    throw LookupError("material " + material + "/" + source_label +
                      " is isotropic: no extraordinary axis, birefringence "
                      "undefined");
  const auto& e = get(material, Axis::extraordinary, source_label);
  const auto& o = get(material, Axis::ordinary, source_label);
  return e.index(lambda_nm, temperature_c) - o.index(lambda_nm, temperature_c);
}

std::vector<const MaterialModel*> MaterialRegistry::models() const {
  std::vector<const MaterialModel*> out;
  out.reserve(models_.size());
  for (const auto& [key, model] : models_) out.push_back(&model);
  return out;
}

std::vector<std::string> MaterialRegistry::source_labels(
    const std::string& material) const {
  std::vector<std::string> out;
  for (const auto& [key, model] : models_)
    if (std::get<0>(key) == material &&
        std::find(out.begin(), out.end(), std::get<2>(key)) == out.end())
      out.push_back(std::get<2>(key));
  return out;
}

std::vector<AnchorCheck> MaterialRegistry::check_anchors() const {
  std::vector<AnchorCheck> out;
  for (const auto& file : files_) {
    for (const auto& anchor : file.anchors) {
      AnchorCheck check;
      check.file = file.path.filename().string();
      check.anchor = anchor;
      if (anchor.kind == "birefringence") {
        check.computed = birefringence(file.material, file.source_label,
                                       anchor.wavelength_nm,
                                       anchor.temperature_c);
      } else if (anchor.kind == "index") {
        if (!anchor.axis)
          throw ConfigError("index anchor in " + check.file +
                            " is missing its axis");
        check.computed = get(file.material, *anchor.axis, file.source_label)
                             .index(anchor.wavelength_nm, anchor.temperature_c);
      } else {
        throw ConfigError("unknown anchor kind '" + anchor.kind + "' in " +
                          check.file);
      }
      check.pass = std::abs(check.computed - anchor.value) <= anchor.tolerance;
      out.push_back(check);
    }
  }
  return out;
}

}  // namespace twocolor
