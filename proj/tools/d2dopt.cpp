// Command line front end: run experiment scenarios from a JSON config,
// validate configs, and cross-check instances against the brute-force
// reference solver.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "d2dopt/alloc.hpp"
#include "d2dopt/harness.hpp"
#include "d2dopt/oracle.hpp"

namespace {

using namespace d2dopt;

std::string show(const Allocation& a) {
  if (a.size() == 0) return "(none)";
  std::string s;
  for (const Link& l : a.links()) {
    if (!s.empty()) s += ' ';
    s += "(" + std::to_string(l.tx) + "," + std::to_string(l.rx) + ")@" +
         std::to_string(l.subchannel);
  }
  return s;
}

int cmd_run(const harness::ScenarioConfig& cfg) {
  const auto warnings = harness::validate_config(cfg);
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";

  const auto rows = harness::run_scenario(cfg);
  if (cfg.output_path.empty()) {
    harness::write_csv(std::cout, rows, cfg);
  } else {
    std::printf("%zu rows -> %s\n", rows.size(), cfg.output_path.c_str());
  }
  return 0;
}

int cmd_validate(const harness::ScenarioConfig& cfg) {
  const auto warnings = harness::validate_config(cfg);
  for (const std::string& w : warnings) std::cout << "warning: " << w << "\n";
  std::printf("config ok, fnv1a=%016llx\n",
              static_cast<unsigned long long>(harness::config_hash(cfg)));
  return 0;
}

int cmd_oracle(const std::string& instance_path) {
  std::ifstream in(instance_path);
  if (!in) {
    std::cerr << "cannot open " << instance_path << "\n";
    return 1;
  }
  const auto [net, ch] = harness::load_instance(in);
  std::printf("instance: K=%d S=%d P=%g\n", net.size(), net.num_subchannels,
              net.power_budget);

  const oracle::BruteForceResult ref = oracle::brute_force_allocate(net, {}, ch);
  const alloc::AllocResult exact = alloc::exact_allocate(net, {}, ch);
  const alloc::AllocResult greedy = alloc::greedy_allocate(net, {}, ch);

  std::printf("brute force: E_P=%.12g links=%s (%ld allocations scored)\n",
              ref.energy.total, show(ref.allocation).c_str(), ref.evaluated);
  std::printf("exact:       E_P=%.12g links=%s\n", exact.energy.total,
              show(exact.allocation).c_str());
  std::printf("greedy:      E_P=%.12g links=%s\n", greedy.energy.total,
              show(greedy.allocation).c_str());

  const bool match = exact.energy.total == ref.energy.total &&
                     exact.allocation.links() == ref.allocation.links();
  std::printf("exact matches brute force: %s\n", match ? "yes" : "no");
  return match ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"energy-minimal offloading experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string instance_path;
  std::string scenario_name;
  std::string out_path;
  std::vector<std::string> method_names;
  std::vector<std::uint64_t> seeds;
  int seed_count = -1;
  int nodes = -1, antennas = -1, subchannels = -1;
  double power = 0.0;
  bool strict = false;

  CLI::App* run = app.add_subcommand("run", "run a scenario and emit result rows");
  run->add_option("--config", config_path, "JSON config file")->required();
  run->add_option("--scenario", scenario_name, "override the scenario");
  run->add_option("--nodes", nodes, "override K");
  run->add_option("--antennas", antennas, "override N");
  run->add_option("--subchannels", subchannels, "override S");
  run->add_option("--power", power, "override the power budget");
  run->add_option("--seeds", seeds, "override the seed list")->delimiter(',');
  run->add_option("--seed-count", seed_count, "use seeds 0..n-1");
  run->add_option("--methods", method_names, "override the method list")->delimiter(',');
  run->add_option("--out", out_path, "override the output path");
  run->add_flag("--strict-properness", strict, "make properness violations fatal");

  CLI::App* validate = app.add_subcommand("validate", "check a config and exit");
  validate->add_option("--config", config_path, "JSON config file")->required();

  CLI::App* oracle_cmd =
      app.add_subcommand("oracle", "run the brute-force checkers on a dumped instance");
  oracle_cmd->add_option("--instance", instance_path, "instance dump file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (oracle_cmd->parsed()) return cmd_oracle(instance_path);

    harness::ScenarioConfig cfg = harness::load_config(config_path);
    if (validate->parsed()) return cmd_validate(cfg);

    // flags beat file values
    if (!scenario_name.empty()) cfg.scenario = harness::scenario_from_string(scenario_name);
    if (nodes > 0) cfg.num_nodes = nodes;
    if (antennas > 0) cfg.antennas = antennas;
    if (subchannels > 0) cfg.num_subchannels = subchannels;
    if (power > 0.0) cfg.power_budget = power;
    if (!seeds.empty()) cfg.seeds = seeds;
    if (seed_count >= 0) {
      cfg.seeds.clear();
      for (int i = 0; i < seed_count; ++i) cfg.seeds.push_back(i);
    }
    if (!method_names.empty()) {
      cfg.methods.clear();
      for (const std::string& name : method_names)
        cfg.methods.push_back(harness::method_from_string(name));
    }
    if (!out_path.empty()) cfg.output_path = out_path;
    if (strict) cfg.strict_properness = true;
    return cmd_run(cfg);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
}
