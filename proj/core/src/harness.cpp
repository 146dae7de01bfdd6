#include "d2dopt/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <tuple>

#include "d2dopt/model.hpp"
#include "d2dopt/optimizer.hpp"
#include "d2dopt/rng.hpp"

namespace d2dopt::harness {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ' ';
  return s;
}

const char* sweep_var_name(Scenario s) {
  switch (s) {
    case Scenario::kSingle: return "none";
    case Scenario::kLinksSweep: return "max_links";
    case Scenario::kIterations: return "iteration";
    case Scenario::kSubchannelsSweep: return "subchannels";
    case Scenario::kNodesSweep: return "nodes";
  }
  return "none";
}

std::vector<int> sweep_points(const ScenarioConfig& cfg) {
  if (!cfg.sweep.empty() && cfg.scenario != Scenario::kSingle &&
      cfg.scenario != Scenario::kIterations)
    return cfg.sweep;
  switch (cfg.scenario) {
    case Scenario::kSingle:
    case Scenario::kIterations:
      return {0};
    case Scenario::kLinksSweep: {
      std::vector<int> pts;
      for (int l = 0; l <= cfg.num_nodes / 2; ++l) pts.push_back(l);
      return pts;
    }
    case Scenario::kSubchannelsSweep: {
      std::vector<int> pts;
      for (int s = 1; s <= cfg.num_subchannels; ++s) pts.push_back(s);
      return pts;
    }
    case Scenario::kNodesSweep:
      return {4, 8, 12};
  }
  return {0};
}

// The instance and cap actually used at one sweep point.
struct PointSetup {
  ScenarioConfig cfg;
  int max_links = -1;
};

PointSetup at_point(const ScenarioConfig& cfg, int value) {
  PointSetup p{cfg, -1};
  switch (cfg.scenario) {
    case Scenario::kLinksSweep:
      p.max_links = value;
      break;
    case Scenario::kSubchannelsSweep:
      p.cfg.num_subchannels = value;
      break;
    case Scenario::kNodesSweep:
      p.cfg.num_nodes = value;
      break;
    default:
      break;
  }
  return p;
}

opt::RunConfig run_config(const ScenarioConfig& cfg, std::uint64_t seed, Method m,
                          int max_links) {
  opt::RunConfig rc;
  rc.num_restarts = cfg.num_restarts;
  rc.alternations = cfg.alternations;
  rc.allocator = m == Method::kExact ? opt::Allocator::kExact : opt::Allocator::kGreedy;
  rc.rng_seed = seed;
  rc.max_links = max_links;
  return rc;
}

double properness_bound(int num_nodes) { return num_nodes / 2 + 1; }

}  // namespace

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::kSingle: return "single";
    case Scenario::kLinksSweep: return "links_sweep";
    case Scenario::kIterations: return "iterations";
    case Scenario::kSubchannelsSweep: return "subchannels_sweep";
    case Scenario::kNodesSweep: return "nodes_sweep";
  }
  return "single";
}

std::string to_string(Method m) {
  switch (m) {
    case Method::kGreedy: return "greedy";
    case Method::kExact: return "exact";
    case Method::kRandom: return "random";
    case Method::kLocal: return "local";
  }
  return "greedy";
}

Scenario scenario_from_string(const std::string& name) {
  for (Scenario s : {Scenario::kSingle, Scenario::kLinksSweep, Scenario::kIterations,
                     Scenario::kSubchannelsSweep, Scenario::kNodesSweep})
    if (to_string(s) == name) return s;
  throw std::invalid_argument("unknown scenario: " + name);
}

Method method_from_string(const std::string& name) {
  for (Method m : {Method::kGreedy, Method::kExact, Method::kRandom, Method::kLocal})
    if (to_string(m) == name) return m;
  throw std::invalid_argument("unknown method: " + name);
}

std::vector<std::string> validate_config(const ScenarioConfig& cfg) {
  const auto bad = [](const std::string& what) {
    throw std::invalid_argument("config: " + what);
  };
  if (cfg.num_nodes < 1) bad("nodes must be positive");
  if (cfg.antennas < 1) bad("antennas must be positive");
  if (cfg.num_subchannels < 1) bad("subchannels must be positive");
  if (!(cfg.power_budget > 0.0)) bad("power budget must be positive");
  if (!(cfg.bandwidth > 0.0)) bad("bandwidth must be positive");
  if (!(cfg.noise_power > 0.0)) bad("noise power must be positive");
  if (cfg.num_restarts < 1) bad("restarts must be positive");
  if (cfg.alternations < 1) bad("alternations must be positive");
  if (cfg.methods.empty()) bad("no methods selected");
  if (!(cfg.data_bits.lo >= 0.0 && cfg.data_bits.hi >= cfg.data_bits.lo))
    bad("data bits range invalid");
  if (!(cfg.compute_speed.lo > 0.0 && cfg.compute_speed.hi >= cfg.compute_speed.lo))
    bad("compute speed range invalid");
  if (!(cfg.compute_power.lo > 0.0 && cfg.compute_power.hi >= cfg.compute_power.lo))
    bad("compute power range invalid");
  for (int v : cfg.sweep) {
    if (cfg.scenario == Scenario::kLinksSweep && v < 0) bad("link cap must be >= 0");
    if (cfg.scenario == Scenario::kSubchannelsSweep && v < 1)
      bad("swept subchannel count must be >= 1");
    if (cfg.scenario == Scenario::kNodesSweep && v < 1)
      bad("swept node count must be >= 1");
  }

  std::vector<std::string> warnings;
  std::vector<int> node_counts{cfg.num_nodes};
  if (cfg.scenario == Scenario::kNodesSweep) node_counts = sweep_points(cfg);
  for (int k : node_counts) {
    if (2 * cfg.antennas >= properness_bound(k)) continue;
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "properness violated: 2N >= floor(K/2)+1 needs N >= %d at K = %d, "
                  "got N = %d",
                  (k / 2 + 2) / 2, k, cfg.antennas);
    if (cfg.strict_properness) throw std::invalid_argument(std::string("config: ") + buf);
    warnings.emplace_back(buf);
  }
  return warnings;
}

std::pair<NetworkInstance, ChannelSet> generate_instance(const ScenarioConfig& cfg,
                                                         std::uint64_t seed) {
  NetworkInstance net;
  net.power_budget = cfg.power_budget;
  net.bandwidth = cfg.bandwidth;
  net.noise_power = cfg.noise_power;
  net.num_subchannels = cfg.num_subchannels;
  for (int k = 0; k < cfg.num_nodes; ++k) {
    rng::Stream s(seed, rng::kNodeDraw, static_cast<std::uint64_t>(k));
    NodeProfile node;
    node.data_bits = s.uniform(cfg.data_bits.lo, cfg.data_bits.hi);
    node.compute_speed = s.uniform(cfg.compute_speed.lo, cfg.compute_speed.hi);
    node.compute_power = s.uniform(cfg.compute_power.lo, cfg.compute_power.hi);
    node.tx_antennas = cfg.antennas;
    node.rx_antennas = cfg.antennas;
    net.nodes.push_back(node);
  }
  net.validate();

  ChannelSet ch(cfg.num_nodes);
  for (int tx = 0; tx < cfg.num_nodes; ++tx) {
    for (int rx = 0; rx < cfg.num_nodes; ++rx) {
      if (tx == rx) continue;
      rng::Stream s(seed, rng::kChannelDraw, static_cast<std::uint64_t>(tx),
                    static_cast<std::uint64_t>(rx));
      CMat h(cfg.antennas, cfg.antennas);
      for (int i = 0; i < cfg.antennas; ++i)
        for (int j = 0; j < cfg.antennas; ++j) h(i, j) = s.complex_gaussian();
      ch.at(tx, rx) = std::move(h);
    }
  }
  ch.validate(net);
  return {std::move(net), std::move(ch)};
}

std::vector<ResultRow> run_scenario(const ScenarioConfig& cfg) {
  validate_config(cfg);
  using clock = std::chrono::steady_clock;
  const bool timed = cfg.timing == TimingMode::kMeasured;

  std::vector<ResultRow> rows;
  for (int value : sweep_points(cfg)) {
    const PointSetup point = at_point(cfg, value);
    for (std::uint64_t seed : cfg.seeds) {
      const auto [net, ch] = generate_instance(point.cfg, seed);
      for (Method m : cfg.methods) {
        ResultRow base;
        base.scenario = to_string(cfg.scenario);
        base.seed = seed;
        base.method = to_string(m);
        base.sweep_var = sweep_var_name(cfg.scenario);
        base.sweep_value = value;

        const clock::time_point start = clock::now();
        try {
          if (m == Method::kLocal) {
            base.energy = opt::local_baseline(net);
          } else if (m == Method::kRandom) {
            const opt::Solution sol = opt::random_wmmse_baseline(net, ch, seed);
            base.energy = sol.energy;
            base.num_links = sol.allocation.size();
          } else {
            const opt::RunSummary sum =
                opt::alternate(net, ch, run_config(cfg, seed, m, point.max_links));
            base.energy = sum.best.energy;
            base.num_links = sum.best.allocation.size();
            base.alternations = static_cast<int>(sum.best.trajectory.size()) - 1;
            if (cfg.scenario == Scenario::kIterations) {
              // one row per alternation of the best restart
              if (timed)
                base.wall_ms = std::chrono::duration<double, std::milli>(clock::now() -
                                                                         start)
                                   .count();
              for (std::size_t t = 0; t < sum.best.trajectory.size(); ++t) {
                ResultRow it = base;
                it.sweep_value = static_cast<double>(t);
                it.energy = sum.best.trajectory[t];
                it.num_links = sum.best.trajectory_links[t];
                rows.push_back(std::move(it));
              }
              continue;
            }
          }
        } catch (const std::exception& ex) {
          base.energy = {};
          base.num_links = 0;
          base.alternations = 0;
          base.status = "error:" + sanitize(ex.what());
        }
        if (timed)
          base.wall_ms =
              std::chrono::duration<double, std::milli>(clock::now() - start).count();
        rows.push_back(std::move(base));
      }
    }
  }

  std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.scenario, a.sweep_value, a.seed, a.method) <
           std::tie(b.scenario, b.sweep_value, b.seed, b.method);
  });

  if (!cfg.output_path.empty()) {
    std::ofstream out(cfg.output_path);
    if (!out) throw std::runtime_error("cannot write " + cfg.output_path);
    write_csv(out, rows, cfg);

    std::string agg_path = cfg.output_path;
    const std::string suffix = ".csv";
    if (agg_path.size() >= suffix.size() &&
        agg_path.compare(agg_path.size() - suffix.size(), suffix.size(), suffix) == 0)
      agg_path.resize(agg_path.size() - suffix.size());
    agg_path += ".agg.csv";
    std::ofstream agg(agg_path);
    if (!agg) throw std::runtime_error("cannot write " + agg_path);
    write_aggregate_csv(agg, emit_plot_data(rows), cfg);
  }
  return rows;
}

std::vector<AggregateRow> emit_plot_data(const std::vector<ResultRow>& rows) {
  std::map<std::tuple<std::string, std::string, double, std::string>, AggregateRow> groups;
  for (const ResultRow& r : rows) {
    if (r.status != "ok") continue;
    AggregateRow& g =
        groups[std::make_tuple(r.scenario, r.sweep_var, r.sweep_value, r.method)];
    if (g.count == 0) {
      g.scenario = r.scenario;
      g.method = r.method;
      g.sweep_var = r.sweep_var;
      g.sweep_value = r.sweep_value;
      g.best_total = r.energy.total;
    }
    g.count += 1;
    g.mean_total += r.energy.total;
    g.best_total = std::min(g.best_total, r.energy.total);
    g.mean_communication += r.energy.communication;
    g.mean_computation += r.energy.computation;
    g.mean_links += r.num_links;
  }
  std::vector<AggregateRow> out;
  out.reserve(groups.size());
  for (auto& [key, g] : groups) {
    g.mean_total /= g.count;
    g.mean_communication /= g.count;
    g.mean_computation /= g.count;
    g.mean_links /= g.count;
    out.push_back(std::move(g));
  }
  return out;
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows,
               const ScenarioConfig& cfg) {
  char head[64];
  std::snprintf(head, sizeof head, "# config fnv1a=%016llx\n",
                static_cast<unsigned long long>(config_hash(cfg)));
  out << "# d2dopt results schema v1\n" << head;
  out << "scenario,seed,method,sweep_var,sweep_value,E_P_joules,E_M_joules,"
         "E_F_joules,num_links,alternations,wall_ms,status\n";
  for (const ResultRow& r : rows) {
    out << r.scenario << ',' << r.seed << ',' << r.method << ',' << r.sweep_var << ','
        << fmt_short(r.sweep_value) << ',' << fmt(r.energy.total) << ','
        << fmt(r.energy.communication) << ',' << fmt(r.energy.computation) << ','
        << r.num_links << ',' << r.alternations << ',' << fmt_short(r.wall_ms) << ','
        << r.status << '\n';
  }
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows,
                         const ScenarioConfig& cfg) {
  char head[64];
  std::snprintf(head, sizeof head, "# config fnv1a=%016llx\n",
                static_cast<unsigned long long>(config_hash(cfg)));
  out << "# d2dopt aggregates schema v1\n" << head;
  out << "scenario,method,sweep_var,sweep_value,count,mean_E_P_joules,best_E_P_joules,"
         "mean_E_M_joules,mean_E_F_joules,mean_links\n";
  for (const AggregateRow& r : rows) {
    out << r.scenario << ',' << r.method << ',' << r.sweep_var << ','
        << fmt_short(r.sweep_value) << ',' << r.count << ',' << fmt(r.mean_total) << ','
        << fmt(r.best_total) << ',' << fmt(r.mean_communication) << ','
        << fmt(r.mean_computation) << ',' << fmt(r.mean_links) << '\n';
  }
}

std::string canonical_config(const ScenarioConfig& cfg) {
  std::string s = "scenario=" + to_string(cfg.scenario);
  s += ";nodes=" + std::to_string(cfg.num_nodes);
  s += ";antennas=" + std::to_string(cfg.antennas);
  s += ";subchannels=" + std::to_string(cfg.num_subchannels);
  s += ";power=" + fmt(cfg.power_budget);
  s += ";bandwidth=" + fmt(cfg.bandwidth);
  s += ";noise=" + fmt(cfg.noise_power);
  s += ";seeds=";
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i)
    s += (i ? "," : "") + std::to_string(cfg.seeds[i]);
  s += ";methods=";
  for (std::size_t i = 0; i < cfg.methods.size(); ++i)
    s += (i ? "," : std::string{}) + to_string(cfg.methods[i]);
  s += ";data=" + fmt(cfg.data_bits.lo) + "," + fmt(cfg.data_bits.hi);
  s += ";speed=" + fmt(cfg.compute_speed.lo) + "," + fmt(cfg.compute_speed.hi);
  s += ";fpower=" + fmt(cfg.compute_power.lo) + "," + fmt(cfg.compute_power.hi);
  s += ";sweep=";
  for (std::size_t i = 0; i < cfg.sweep.size(); ++i)
    s += (i ? "," : "") + std::to_string(cfg.sweep[i]);
  s += ";restarts=" + std::to_string(cfg.num_restarts);
  s += ";alternations=" + std::to_string(cfg.alternations);
  s += ";timing=" + std::string(cfg.timing == TimingMode::kMeasured ? "measured" : "none");
  s += ";strict=" + std::to_string(cfg.strict_properness ? 1 : 0);
  return s;
}

std::uint64_t config_hash(const ScenarioConfig& cfg) {
  const std::string s = canonical_config(cfg);
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace d2dopt::harness
