#pragma once

#include <vector>

#include "d2dopt/types.hpp"

namespace d2dopt::oracle {

// Reference checkers, kept deliberately independent of the solver code paths:
// plain subset recursion plus a subchannel odometer, energies through the
// public evaluators only. Slow on purpose; use for verification.

struct BruteForceResult {
  Allocation allocation;   // canonical form
  EnergyBreakdown energy;
  long evaluated = 0;      // allocations scored, label duplicates included
};

// Exhaustive minimum of E_P over all node-disjoint candidate subsets and all
// subchannel assignments. Same tie-breaking as the exact solver: fewer links
// first, then the smaller canonical link list. Throws std::invalid_argument
// above max_nodes.
BruteForceResult brute_force_allocate(const NetworkInstance& net,
                                      const BeamformingState& bf, const ChannelSet& ch,
                                      int max_nodes = 8);

}  // namespace d2dopt::oracle
