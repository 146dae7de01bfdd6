#include <fstream>
#include <set>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "d2dopt/harness.hpp"

namespace d2dopt::harness {

namespace {

using nlohmann::json;

Range range_from(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 2)
    throw std::invalid_argument("config: " + key + " must be [lo, hi]");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& ex) {
    throw std::invalid_argument("config: " + std::string(ex.what()));
  }
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");

  static const std::set<std::string> known{
      "scenario",      "nodes",         "antennas",      "subchannels",
      "power_budget",  "bandwidth",     "noise_power",   "seeds",
      "seed_count",    "methods",       "data_bits",     "compute_speed",
      "compute_power", "sweep",         "restarts",      "alternations",
      "timing",        "strict_properness", "output"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw std::invalid_argument("config: unknown key '" + key + "'");
  if (j.contains("seeds") && j.contains("seed_count"))
    throw std::invalid_argument("config: give either seeds or seed_count, not both");

  ScenarioConfig cfg;
  try {
    if (j.contains("scenario"))
      cfg.scenario = scenario_from_string(j["scenario"].get<std::string>());
    if (j.contains("nodes")) cfg.num_nodes = j["nodes"].get<int>();
    if (j.contains("antennas")) cfg.antennas = j["antennas"].get<int>();
    if (j.contains("subchannels")) cfg.num_subchannels = j["subchannels"].get<int>();
    if (j.contains("power_budget")) cfg.power_budget = j["power_budget"].get<double>();
    if (j.contains("bandwidth")) cfg.bandwidth = j["bandwidth"].get<double>();
    if (j.contains("noise_power")) cfg.noise_power = j["noise_power"].get<double>();
    if (j.contains("seeds"))
      cfg.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    if (j.contains("seed_count")) {
      const int n = j["seed_count"].get<int>();
      if (n < 0) throw std::invalid_argument("config: seed_count must be >= 0");
      for (int i = 0; i < n; ++i) cfg.seeds.push_back(static_cast<std::uint64_t>(i));
    }
    if (j.contains("methods")) {
      cfg.methods.clear();
      for (const auto& name : j["methods"])
        cfg.methods.push_back(method_from_string(name.get<std::string>()));
    }
    if (j.contains("data_bits")) cfg.data_bits = range_from(j["data_bits"], "data_bits");
    if (j.contains("compute_speed"))
      cfg.compute_speed = range_from(j["compute_speed"], "compute_speed");
    if (j.contains("compute_power"))
      cfg.compute_power = range_from(j["compute_power"], "compute_power");
    if (j.contains("sweep")) cfg.sweep = j["sweep"].get<std::vector<int>>();
    if (j.contains("restarts")) cfg.num_restarts = j["restarts"].get<int>();
    if (j.contains("alternations")) cfg.alternations = j["alternations"].get<int>();
    if (j.contains("timing")) {
      const std::string mode = j["timing"].get<std::string>();
      if (mode == "none")
        cfg.timing = TimingMode::kNone;
      else if (mode == "measured")
        cfg.timing = TimingMode::kMeasured;
      else
        throw std::invalid_argument("config: timing must be 'none' or 'measured'");
    }
    if (j.contains("strict_properness"))
      cfg.strict_properness = j["strict_properness"].get<bool>();
    if (j.contains("output")) cfg.output_path = j["output"].get<std::string>();
  } catch (const json::exception& ex) {
    throw std::invalid_argument("config: " + std::string(ex.what()));
  }
  return cfg;
}

}  // namespace d2dopt::harness
