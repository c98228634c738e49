#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "twocolor/errors.hpp"

namespace twocolor {

enum class Axis { ordinary, extraordinary, isotropic };

std::string axis_name(Axis a);
Axis axis_from_name(const std::string& s);

enum class DispersionForm {
  constant_index,      // n = n0 (test/fixture material)
  sellmeier_abcd,      // n^2 = A + B/(l^2 - C) - D*l^2
  sellmeier_rational3, // n^2 - 1 = sum_i B_i*l^2/(l^2 - C_i)
  sellmeier_fseries    // MgO:LN form with f = (T - 24.5)(T + 570.82)
};

std::string form_name(DispersionForm f);
DispersionForm form_from_name(const std::string& s);

// One thermo-optic contribution. "linear_dn_dT" adds per_K * (T - T_ref) to n;
// "f_series" supplies the b-coefficients of the fseries dispersion form.
struct ThermoTerm {
  std::string type;
  std::map<std::string, double> params;
};

// Validation anchor carried inside a data file: an index or birefringence
// value the loaded model must reproduce.
struct Anchor {
  std::string kind;  // "index" | "birefringence"
  std::optional<Axis> axis;
  double wavelength_nm = 0.0;
  double temperature_c = 0.0;
  double value = 0.0;
  double tolerance = 0.0;
};

// Temperature-dependent dispersion model for one crystal axis. Evaluation is
// fully analytic (index and both first derivatives) so downstream phase
// derivatives never rely on finite differences of near-cancelling sums.
class MaterialModel {
 public:
  MaterialModel() = default;
  MaterialModel(std::string material, Axis axis, std::string source_label,
                DispersionForm form, std::map<std::string, double> coeff,
                std::vector<ThermoTerm> thermo, double lambda_min_nm,
                double lambda_max_nm, double reference_temperature_c);

  double index(double lambda_nm, double temperature_c) const;
  // d n / d lambda in 1/um (lambda argument still nm).
  double dn_dlambda_um(double lambda_nm, double temperature_c) const;
  // d n / d T in 1/K.
  double dn_dT(double lambda_nm, double temperature_c) const;
  // Group index n_g = n - lambda * dn/dlambda.
  double group_index(double lambda_nm, double temperature_c) const;

  bool temperature_dependent() const;

  const std::string& material() const { return material_; }
  Axis axis() const { return axis_; }
  const std::string& source_label() const { return source_label_; }
  DispersionForm form() const { return form_; }
  std::pair<double, double> validity_nm() const {
    return {lambda_min_nm_, lambda_max_nm_};
  }
  double reference_temperature_c() const { return reference_temperature_c_; }
  const std::map<std::string, double>& coefficients() const { return coeff_; }
  const std::vector<ThermoTerm>& thermo_terms() const { return thermo_; }

  // Qualified name for error messages: "yvo4/zelmon/e".
  std::string display_name() const;

  nlohmann::json to_json() const;
  static MaterialModel from_json(const nlohmann::json& axis_block,
                                 const std::string& material, Axis axis,
                                 const std::string& source_label,
                                 double lambda_min_nm, double lambda_max_nm,
                                 double reference_temperature_c);

 private:
  void check_range(double lambda_nm) const;
  double coeff_at(const std::string& key) const;
  // n^2 and its lambda derivative (lambda in um), before linear thermo terms.
  double n_squared(double l_um, double temperature_c) const;
  double dn2_dlambda(double l_um, double temperature_c) const;
  double dn2_dT(double l_um, double temperature_c) const;
  double linear_thermo_offset(double temperature_c) const;
  double linear_thermo_slope() const;
  // f_series b-coefficients (zero when absent).
  std::array<double, 4> fseries_b() const;

  std::string material_;
  Axis axis_ = Axis::isotropic;
  std::string source_label_;
  DispersionForm form_ = DispersionForm::constant_index;
  std::map<std::string, double> coeff_;
  std::vector<ThermoTerm> thermo_;
  double lambda_min_nm_ = 0.0;
  double lambda_max_nm_ = 0.0;
  double reference_temperature_c_ = 24.5;
};

struct MaterialFile {
  std::string material;
  std::string source_label;
  std::string notes;
  double reference_temperature_c = 24.5;
  double lambda_min_nm = 0.0, lambda_max_nm = 0.0;
  std::vector<Anchor> anchors;
  std::filesystem::path path;
  std::uint64_t content_hash = 0;
};

struct AnchorCheck {
  std::string file;
  Anchor anchor;
  double computed = 0.0;
  bool pass = false;
};

// Registry of all loaded dispersion models, keyed (material, axis, source).
class MaterialRegistry {
 public:
  static MaterialRegistry load_directory(const std::filesystem::path& dir);

  const MaterialModel& get(const std::string& material, Axis axis,
                           const std::string& source_label) const;
  bool has(const std::string& material, Axis axis,
           const std::string& source_label) const;

  // n_e - n_o; LookupError if either axis is missing (isotropic materials
  // have no extraordinary axis by construction).
  double birefringence(const std::string& material,
                       const std::string& source_label, double lambda_nm,
                       double temperature_c) const;

  std::vector<const MaterialModel*> models() const;
  const std::vector<MaterialFile>& files() const { return files_; }
  std::vector<std::string> source_labels(const std::string& material) const;

  // Evaluate every anchor of every loaded file.
  std::vector<AnchorCheck> check_anchors() const;

  void add(MaterialModel model);

 private:
  std::map<std::tuple<std::string, Axis, std::string>, MaterialModel> models_;
  std::vector<MaterialFile> files_;
};

}  // namespace twocolor
