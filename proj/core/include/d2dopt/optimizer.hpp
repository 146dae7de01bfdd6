#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "d2dopt/mimo.hpp"
#include "d2dopt/types.hpp"

namespace d2dopt::opt {

// Alternating decomposition: network resource step (link selection plus
// subchannel assignment) and signal design step, repeated from several random
// initializations. Also hosts the local-only and random-matching baselines.

enum class Allocator { kGreedy, kExact };
enum class Report { kBest, kMean };

struct RunConfig {
  int num_restarts = 10;
  int alternations = 10;  // cap per restart
  Allocator allocator = Allocator::kGreedy;
  std::uint64_t rng_seed = 0;
  Report report = Report::kBest;
  double energy_tolerance = 1e-6;  // relative E_P change that counts as converged
  int max_links = -1;              // forwarded to the allocator, < 0 means no cap
  mimo::WmmseConfig wmmse;
};

struct Solution {
  Allocation allocation;
  BeamformingState beamforming;
  EnergyBreakdown energy;
  std::vector<EnergyBreakdown> trajectory;  // index 0 is the initial state
  std::vector<int> trajectory_links;        // link count at each trajectory point
  int restart_index = 0;
};

struct RunSummary {
  Solution best;                        // minimizer, ties to the lower restart index
  double mean_energy = 0.0;             // over per-restart final energies
  std::vector<double> mean_trajectory;  // column mean, short runs padded with last value
  std::vector<double> restart_energies; // final E_P per restart, fallback applied
};

// Random starting point: node-disjoint pairs drawn from the candidate set up
// to floor(K/2), uniform subchannels, unit-sphere directions per node with
// per-link power P / L_max. Deterministic in the seed.
std::pair<Allocation, BeamformingState> initialize(const NetworkInstance& net,
                                                   const ChannelSet& ch,
                                                   std::uint64_t seed);

// Energy with every node computing its own data.
EnergyBreakdown local_baseline(const NetworkInstance& net);

// Full multi-restart alternation. Every restart ends at or below the local
// baseline (worse runs are replaced by the local-only solution; their
// trajectories keep the raw values).
RunSummary alternate(const NetworkInstance& net, const ChannelSet& ch,
                     const RunConfig& cfg);

// Random matching baseline: floor(K/2) uniformly random disjoint pairs,
// ignoring the candidate set; the slower node transmits (tie: lower index);
// random subchannels; one signal-design pass; energy reported honestly.
Solution random_wmmse_baseline(const NetworkInstance& net, const ChannelSet& ch,
                               std::uint64_t seed,
                               const mimo::WmmseConfig& wmmse = {});

}  // namespace d2dopt::opt
