#include "twocolor/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "twocolor/numerics.hpp"

namespace twocolor {

namespace {

// Shortest round-trip decimal representation.
std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc{})
    throw DataError("cannot parse " + what + " from '" + s + "'");
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) {
    // Trim surrounding whitespace.
    const auto first = field.find_first_not_of(" \t\r");
    const auto last = field.find_last_not_of(" \t\r");
    fields.push_back(first == std::string::npos
                         ? std::string()
                         : field.substr(first, last - first + 1));
  }
  return fields;
}

constexpr const char* kRecordColumns =
    "basis_label,theta_signal_deg,theta_idler_deg,t_s,N_ii,N_ij,N_ji,N_jj,"
    "seed";

}  // namespace

std::filesystem::path resolve_data_dir(
    const std::optional<std::filesystem::path>& flag) {
  std::filesystem::path dir;
  if (flag) {
    dir = *flag;
  } else if (const char* env = std::getenv("TWOCOLOR_DATA_DIR")) {
    dir = env;
  } else {
#ifdef TWOCOLOR_DEFAULT_DATA_DIR
    dir = TWOCOLOR_DEFAULT_DATA_DIR;
#else
    dir = "data";
#endif
  }
  if (!std::filesystem::is_directory(dir))
    throw ConfigError("data directory not found: " + dir.string());
  return dir;
}

MaterialRegistry load_registry(const std::filesystem::path& data_dir) {
  return MaterialRegistry::load_directory(data_dir / "materials");
}

DeviceProfile load_device_profile(const std::filesystem::path& data_dir) {
  const auto path = data_dir / "device_profile.json";
  std::ifstream in(path);
  if (!in) throw DataError("cannot open device profile: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("device profile " + path.string() + ": " + e.what());
  }

  DeviceProfile p;
  try {
    p.pump_nm = j.at("pump_wavelength_nm").get<double>();
    p.signal_nm = j.at("signal_wavelength_nm").get<double>();
    p.idler_nm = j.at("idler_wavelength_nm").get<double>();

    const auto& c = j.at("crystal");
    p.crystal_material = c.at("material").get<std::string>();
    p.crystal_source = c.at("source").get<std::string>();
    p.crystal_length_mm = c.at("length_mm").get<double>();
    p.poling_period_nominal_um = c.at("poling_period_nominal_um").get<double>();
    p.poling_period_effective_um =
        c.at("poling_period_effective_um").get<double>();
    p.qpm_axis = c.at("qpm_axis").get<std::string>();
    p.qpm_order = c.at("qpm_order").get<int>();
    p.pair_transit_axis = c.at("pair_transit_axis").get<std::string>();
    p.oven_min_c = c.at("oven_min_c").get<double>();
    p.oven_max_c = c.at("oven_max_c").get<double>();

    const auto& r = j.at("rhomb");
    p.rhomb_material = r.at("material").get<std::string>();
    p.rhomb_source = r.at("source").get<std::string>();
    p.rhomb_length_mm = r.at("length_mm").get<double>();
    p.rhomb_transits = r.at("transits").get<int>();
    p.rhomb_temperature_c = r.at("temperature_c").get<double>();

    const auto& comp = j.at("compensator");
    p.compensator_material = comp.at("material").get<std::string>();
    p.compensator_source = comp.at("default_source").get<std::string>();
    p.installed_length_mm = comp.at("installed_length_mm").get<double>();
    p.stabilized_length_mm = comp.at("stabilized_length_mm").get<double>();
    p.compensator_temperature_c = comp.at("temperature_c").get<double>();
    p.slab_stock_mm = comp.at("slab_stock_mm").get<std::vector<double>>();

    const auto& k = j.at("counting");
    p.counting.pair_rate_mcps_per_mw = k.at("pair_rate_mcps_per_mw").get<double>();
    p.counting.pump_power_mw = k.at("pump_power_mw").get<double>();
    p.counting.signal_linewidth_ghz = k.at("signal_linewidth_ghz").get<double>();
    p.counting.idler_linewidth_ghz = k.at("idler_linewidth_ghz").get<double>();
    p.counting.detection_efficiency_product =
        k.at("detection_efficiency_product").get<double>();
    p.counting.integration_time_s = k.at("integration_time_s").get<double>();
    p.counting.accidental_rate_cps = k.at("accidental_rate_cps").get<double>();

    p.jitter_sigma_k = j.at("jitter").at("temperature_sigma_k").get<double>();
    p.fidelity_target = j.at("fidelity_target").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError("device profile " + path.string() + ": " + e.what());
  }
  p.counting.validate();
  return p;
}

nlohmann::json Provenance::config_echo() const {
  return nlohmann::json::parse(config_json);
}

std::string Provenance::comment_block() const {
  std::ostringstream os;
  os << "# tool: " << tool << "\n";
  os << "# config: " << config_json << "\n";
  for (const auto& [file, hash] : data_hashes) {
    char hex[32];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(hash));
    os << "# data: " << file << " fnv1a64=" << hex << "\n";
  }
  return os.str();
}

nlohmann::json Provenance::json_block() const {
  nlohmann::json data = nlohmann::json::object();
  for (const auto& [file, hash] : data_hashes) {
    char hex[32];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(hash));
    data[file] = hex;
  }
  return nlohmann::json{
      {"tool", tool}, {"config", config_echo()}, {"data", data}};
}

Provenance make_provenance(const std::string& tool,
                           const nlohmann::json& config,
                           const MaterialRegistry& registry) {
  Provenance prov;
  prov.tool = tool;
  prov.config_json = config.dump();
  for (const auto& file : registry.files())
    prov.data_hashes.emplace_back(file.path.filename().string(),
                                  file.content_hash);
  return prov;
}

void write_records_csv(const std::filesystem::path& path,
                       const std::vector<CountRecord>& records,
                       const Provenance& prov) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << prov.comment_block();
  out << kRecordColumns << "\n";
  for (const auto& rec : records) {
    out << rec.basis_label << ',' << fmt(rec.hwp_signal_rad * 180.0 / kPi)
        << ',' << fmt(rec.hwp_idler_rad * 180.0 / kPi) << ','
        << fmt(rec.integration_time_s);
    for (int k = 0; k < 4; ++k) out << ',' << fmt(rec.counts[k]);
    out << ',' << rec.seed << "\n";
  }
  if (!out.flush()) throw DataError("failed writing " + path.string());
}

std::vector<CountRecord> read_records_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open records file: " + path.string());
  std::vector<CountRecord> records;
  std::string line;
  bool header_seen = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      std::string plain = line;
      plain.erase(std::remove(plain.begin(), plain.end(), ' '), plain.end());
      plain.erase(std::remove(plain.begin(), plain.end(), '\r'), plain.end());
      if (plain != kRecordColumns)
        throw DataError(path.string() +
                        ": unexpected header; wanted columns " +
                        kRecordColumns);
      header_seen = true;
      continue;
    }
    const auto fields = split_csv_line(line);
    if (fields.size() != 9) {
      std::ostringstream os;
      os << path.string() << ":" << lineno << ": expected 9 fields, got "
         << fields.size();
      throw DataError(os.str());
    }
    CountRecord rec;
    rec.basis_label = fields[0];
    rec.hwp_signal_rad = parse_double(fields[1], "theta_signal_deg") * kPi / 180.0;
    rec.hwp_idler_rad = parse_double(fields[2], "theta_idler_deg") * kPi / 180.0;
    rec.integration_time_s = parse_double(fields[3], "t_s");
    for (int k = 0; k < 4; ++k)
      rec.counts[k] = parse_double(fields[4 + k], "counts");
    rec.seed = static_cast<std::uint64_t>(
        std::strtoull(fields[8].c_str(), nullptr, 10));
    rec.qwp_signal = rec.qwp_idler = (rec.basis_label == "LR");
    records.push_back(rec);
  }
  if (!header_seen)
    throw DataError(path.string() + ": no header row found");
  return records;
}

void write_curve_csv(const std::filesystem::path& path,
                     const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows,
                     const Provenance& prov) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << prov.comment_block();
  for (std::size_t k = 0; k < columns.size(); ++k)
    out << (k ? "," : "") << columns[k];
  out << "\n";
  for (const auto& row : rows) {
    if (row.size() != columns.size())
      throw DataError("curve row width does not match column count");
    for (std::size_t k = 0; k < row.size(); ++k)
      out << (k ? "," : "") << fmt(row[k]);
    out << "\n";
  }
  if (!out.flush()) throw DataError("failed writing " + path.string());
}

namespace {

nlohmann::json visibility_to_json(const BasisVisibility& v) {
  return nlohmann::json{{"value", v.value},
                        {"sigma", v.sigma},
                        {"per_setting", {v.v_i, v.v_j}}};
}

nlohmann::json sweep_to_json(const FittedSweep& s) {
  return nlohmann::json{
      {"parallel_angle_deg", s.parallel_angle_rad * 180.0 / kPi},
      {"amplitude", s.fit.amplitude},
      {"signed_amplitude", s.fit.signed_amplitude(s.parallel_angle_rad)},
      {"offset", s.fit.offset},
      {"phase_const_rad", s.fit.phase_const},
      {"residual_rms", s.fit.residual_rms},
      {"poisson_weighted", s.fit.poisson_weighted}};
}

}  // namespace

nlohmann::json report_to_json(const FidelityReport& report,
                              std::optional<double> bootstrap_sigma) {
  nlohmann::json fits = nlohmann::json::object();
  for (const auto& [label, sweeps] : report.fits) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& s : sweeps) arr.push_back(sweep_to_json(s));
    fits[label] = arr;
  }
  nlohmann::json j{
      {"visibilities",
       {{"HV", visibility_to_json(report.v_hv)},
        {"DA", visibility_to_json(report.v_da)},
        {"LR", visibility_to_json(report.v_lr)}}},
      {"fidelity", report.fidelity},
      {"sigma_fidelity", report.sigma},
      {"entangled", report.entangled},
      {"unphysical_warning", report.unphysical_warning},
      {"fits", fits}};
  if (bootstrap_sigma) j["bootstrap_sigma_fidelity"] = *bootstrap_sigma;
  return j;
}

void write_report_json(const std::filesystem::path& path,
                       const FidelityReport& report,
                       std::optional<double> bootstrap_sigma,
                       const Provenance& prov) {
  nlohmann::json j = report_to_json(report, bootstrap_sigma);
  j["provenance"] = prov.json_block();
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << "\n";
  if (!out.flush()) throw DataError("failed writing " + path.string());
}

}  // namespace twocolor
