#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "d2dopt/types.hpp"

// Experiment front-end: seeded instance generation, parameter sweeps, and
// deterministic CSV emission. Everything downstream of a config is a pure
// function of it; reruns produce byte-identical files (with timing off).
namespace d2dopt::harness {

enum class Scenario { kSingle, kLinksSweep, kIterations, kSubchannelsSweep, kNodesSweep };
enum class Method { kGreedy, kExact, kRandom, kLocal };
enum class TimingMode { kNone, kMeasured };  // measured wall times break byte determinism

std::string to_string(Scenario s);
std::string to_string(Method m);
Scenario scenario_from_string(const std::string& name);  // throws std::invalid_argument
Method method_from_string(const std::string& name);      // throws std::invalid_argument

// Closed interval for a uniform draw.
struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct ScenarioConfig {
  Scenario scenario = Scenario::kSingle;
  int num_nodes = 10;        // K
  int antennas = 6;          // N, all nodes alike
  int num_subchannels = 3;   // S
  double power_budget = 5.0; // P, watts
  double bandwidth = 1e6;    // W, Hz per subchannel
  double noise_power = 1.0;  // sigma^2

  std::vector<std::uint64_t> seeds;
  std::vector<Method> methods{Method::kGreedy, Method::kRandom, Method::kLocal};

  Range data_bits{1e6, 2e7};       // I_k
  Range compute_speed{1e5, 2e6};   // C_k, bits/s
  Range compute_power{0.5, 1.0};   // F_k, watts

  // Sweep points; empty means the scenario default (links: 0..floor(K/2),
  // subchannels: 1..S, nodes: {4, 8, 12}).
  std::vector<int> sweep;

  int num_restarts = 10;
  int alternations = 10;
  TimingMode timing = TimingMode::kNone;
  bool strict_properness = false;
  std::string output_path;  // empty: return rows without writing
};

struct ResultRow {
  std::string scenario;
  std::uint64_t seed = 0;
  std::string method;
  std::string sweep_var;   // "none", "max_links", "iteration", "subchannels", "nodes"
  double sweep_value = 0.0;
  EnergyBreakdown energy;
  int num_links = 0;
  int alternations = 0;
  double wall_ms = 0.0;
  std::string status = "ok";  // or "error:<reason>", never dropped
};

struct AggregateRow {
  std::string scenario;
  std::string method;
  std::string sweep_var;
  double sweep_value = 0.0;
  int count = 0;          // ok rows only
  double mean_total = 0.0;
  double best_total = 0.0;
  double mean_communication = 0.0;
  double mean_computation = 0.0;
  double mean_links = 0.0;
};

// Antenna properness (2N >= floor(K/2) + 1) and range sanity for every sweep
// point. Returns human-readable warnings; throws std::invalid_argument on
// malformed configs, and on properness violations when strict_properness is
// set.
std::vector<std::string> validate_config(const ScenarioConfig& cfg);

// Node parameters from streams keyed (seed, node index), channel matrices
// from streams keyed (seed, tx, rx) with row-major entry order, so the draw
// never depends on execution order.
std::pair<NetworkInstance, ChannelSet> generate_instance(const ScenarioConfig& cfg,
                                                         std::uint64_t seed);

// Runs every seed x sweep point x method, one row each (the iterations
// scenario emits one row per alternation of the best restart). Rows are
// sorted by (scenario, sweep_value, seed, method). Writes output_path and its
// ".agg.csv" sibling when output_path is non-empty.
std::vector<ResultRow> run_scenario(const ScenarioConfig& cfg);

// Mean and best per (sweep point, method) over rows with status "ok".
std::vector<AggregateRow> emit_plot_data(const std::vector<ResultRow>& rows);

// CSV serialization. The header carries the schema version and the FNV-1a
// hash of the canonical config string.
void write_csv(std::ostream& out, const std::vector<ResultRow>& rows,
               const ScenarioConfig& cfg);
void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows,
                         const ScenarioConfig& cfg);

// Canonical "key=value;" serialization of every semantic field, and its
// 64-bit FNV-1a hash as printed in CSV headers.
std::string canonical_config(const ScenarioConfig& cfg);
std::uint64_t config_hash(const ScenarioConfig& cfg);

// JSON config file; unknown keys rejected. CLI overrides are applied by the
// caller after loading.
ScenarioConfig load_config(const std::string& path);

// Textual instance dump, round-trip exact for every field (%.17g, channel
// entries as real/imag pairs).
void dump_instance(std::ostream& out, const NetworkInstance& net, const ChannelSet& ch);
std::pair<NetworkInstance, ChannelSet> load_instance(std::istream& in);

}  // namespace d2dopt::harness
