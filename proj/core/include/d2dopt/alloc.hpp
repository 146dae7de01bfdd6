#pragma once

#include <optional>
#include <vector>

#include "d2dopt/types.hpp"

namespace d2dopt::alloc {

struct SavedEnergy {
  int tx = 0;
  int rx = 0;
  std::optional<int> subchannel;  // set when scored against a partial allocation
  double value = 0.0;             // D = E_k - E_{k,k'}, joules
};

struct SolverStats {
  long nodes_explored = 0;
  long candidates_evaluated = 0;
  double wall_ms = 0.0;
};

struct AllocResult {
  Allocation allocation;
  EnergyBreakdown energy;  // re-evaluated with full mutual interference
  SolverStats stats;
};

struct GreedyOptions {
  int max_links = -1;  // < 0 means no cap beyond floor(K / 2)
};

struct ExactOptions {
  int max_nodes = 8;   // enumeration refuses larger networks
  int max_links = -1;
};

// Saved energy of candidate (tx, rx). Without a subchannel the rate is
// interference-free; with one, the rate sees interference from the partial
// allocation's links on that subchannel. Throws std::domain_error when the
// pair's rate is non-positive (infeasible link).
SavedEnergy saved_energy(int tx, int rx, std::optional<int> subchannel,
                         const Allocation& partial, const BeamformingState& bf,
                         const ChannelSet& ch, const NetworkInstance& net);

// Two-phase greedy: fresh subchannels first by interference-free saved
// energy, then reuse of occupied subchannels scored against the partial
// allocation. Stops when the best saved energy is non-positive, candidates
// run out, or the link cap is hit. Ties break toward the smaller (tx, rx)
// pair, then the smaller subchannel.
AllocResult greedy_allocate(const NetworkInstance& net, const BeamformingState& bf,
                            const ChannelSet& ch, const GreedyOptions& opts = {});

// Globally minimal E_P over every node-disjoint subset of the candidate set
// and every subchannel assignment, for the given beams. Branch-and-bound with
// subchannel-symmetry reduction; ties prefer fewer links, then the smaller
// canonical link list. Throws std::invalid_argument when the network exceeds
// max_nodes.
AllocResult exact_allocate(const NetworkInstance& net, const BeamformingState& bf,
                           const ChannelSet& ch, const ExactOptions& opts = {});

}  // namespace d2dopt::alloc
