#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "twocolor/analysis.hpp"
#include "twocolor/materials.hpp"
#include "twocolor/qpm.hpp"
#include "twocolor/simulate.hpp"

namespace twocolor {

// Data directory resolution: explicit flag > TWOCOLOR_DATA_DIR env var >
// compiled-in default (the repository's data/ directory).
std::filesystem::path resolve_data_dir(
    const std::optional<std::filesystem::path>& flag);

MaterialRegistry load_registry(const std::filesystem::path& data_dir);

// Device profile: every physical default of the reference design, loaded from
// data/device_profile.json.
struct DeviceProfile {
  double pump_nm = 532.0;
  double signal_nm = 894.3;
  double idler_nm = 1313.1;

  std::string crystal_material = "mgoln";
  std::string crystal_source = "calibrated_fform";
  double crystal_length_mm = 40.0;
  double poling_period_nominal_um = 7.0;
  double poling_period_effective_um = 6.97;
  std::string qpm_axis = "extraordinary";
  int qpm_order = 1;
  std::string pair_transit_axis = "ordinary";
  double oven_min_c = 20.0;
  double oven_max_c = 160.0;

  std::string rhomb_material = "bk7";
  std::string rhomb_source = "schott";
  double rhomb_length_mm = 31.4;
  int rhomb_transits = 2;
  double rhomb_temperature_c = 24.5;

  std::string compensator_material = "yvo4";
  std::string compensator_source = "zelmon";
  double installed_length_mm = 153.0;
  double stabilized_length_mm = 30.0;
  double compensator_temperature_c = 24.5;
  std::vector<double> slab_stock_mm;

  SourceConfig counting;
  double jitter_sigma_k = 0.1461;
  double fidelity_target = 0.753;
};

DeviceProfile load_device_profile(const std::filesystem::path& data_dir);

// Provenance stamp emitted at the top of every output: tool id, the resolved
// configuration, and FNV-1a hashes of the data files the run depended on.
// Deliberately contains no timestamps so reruns are byte-identical.
struct Provenance {
  std::string tool;
  nlohmann::json config_echo() const;
  std::string config_json;  // compact JSON string of resolved parameters
  std::vector<std::pair<std::string, std::uint64_t>> data_hashes;

  std::string comment_block() const;      // "# ..."-style lines for CSV
  nlohmann::json json_block() const;      // object for JSON reports
};

Provenance make_provenance(const std::string& tool,
                           const nlohmann::json& config,
                           const MaterialRegistry& registry);

// Records CSV (the simulate/analyze interchange format). Columns:
// basis_label,theta_signal_deg,theta_idler_deg,t_s,N_ii,N_ij,N_ji,N_jj,seed
// QWP flags are implied by the basis label (LR = QWP at 45 deg in both arms).
void write_records_csv(const std::filesystem::path& path,
                       const std::vector<CountRecord>& records,
                       const Provenance& prov);
std::vector<CountRecord> read_records_csv(const std::filesystem::path& path);

// Generic numeric curve CSV with a provenance header.
void write_curve_csv(const std::filesystem::path& path,
                     const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows,
                     const Provenance& prov);

// Analysis report JSON.
void write_report_json(const std::filesystem::path& path,
                       const FidelityReport& report,
                       std::optional<double> bootstrap_sigma,
                       const Provenance& prov);
nlohmann::json report_to_json(const FidelityReport& report,
                              std::optional<double> bootstrap_sigma);

}  // namespace twocolor
