#include "d2dopt/oracle.hpp"

#include <stdexcept>
#include <string>
#include <vector>

#include "d2dopt/model.hpp"

namespace d2dopt::oracle {

namespace {

struct Enumerator {
  const NetworkInstance& net;
  const BeamformingState& beams;
  const ChannelSet& ch;
  std::vector<LinkPair> candidates;

  bool has_best = false;
  BruteForceResult best;

  void consider(const std::vector<LinkPair>& subset) {
    const int s = net.num_subchannels;
    const std::size_t m = subset.size();
    std::vector<int> labels(m, 0);
    while (true) {
      std::vector<Link> links;
      links.reserve(m);
      for (std::size_t i = 0; i < m; ++i)
        links.push_back({subset[i].tx, subset[i].rx, labels[i]});
      score(canonical_allocation(Allocation(std::move(links))));

      // odometer over all s^m label assignments
      std::size_t pos = 0;
      while (pos < m && ++labels[pos] == s) labels[pos++] = 0;
      if (pos == m) break;
    }
  }

  void score(const Allocation& alloc) {
    ++best.evaluated;
    EnergyBreakdown e;
    try {
      e = model::evaluate_allocation(net, alloc, beams, ch);
    } catch (const std::domain_error&) {
      return;  // a zero-rate link makes this assignment infeasible
    }
    if (!has_best || e.total < best.energy.total ||
        (e.total == best.energy.total &&
         (alloc.size() < best.allocation.size() ||
          (alloc.size() == best.allocation.size() &&
           alloc.links() < best.allocation.links())))) {
      has_best = true;
      best.allocation = alloc;
      best.energy = e;
    }
  }

  void recurse(std::size_t idx, std::vector<LinkPair>& picked, std::vector<bool>& used) {
    if (idx == candidates.size()) {
      consider(picked);
      return;
    }
    recurse(idx + 1, picked, used);  // skip this pair
    const LinkPair p = candidates[idx];
    if (!used[static_cast<std::size_t>(p.tx)] && !used[static_cast<std::size_t>(p.rx)]) {
      used[static_cast<std::size_t>(p.tx)] = true;
      used[static_cast<std::size_t>(p.rx)] = true;
      picked.push_back(p);
      recurse(idx + 1, picked, used);
      picked.pop_back();
      used[static_cast<std::size_t>(p.tx)] = false;
      used[static_cast<std::size_t>(p.rx)] = false;
    }
  }
};

}  // namespace

BruteForceResult brute_force_allocate(const NetworkInstance& net,
                                      const BeamformingState& bf, const ChannelSet& ch,
                                      int max_nodes) {
  if (net.size() > max_nodes)
    throw std::invalid_argument("brute_force_allocate: network of " +
                                std::to_string(net.size()) + " nodes exceeds cap of " +
                                std::to_string(max_nodes));
  const std::vector<LinkPair> candidates = model::candidate_links(net);
  BeamformingState beams;
  for (const LinkPair& p : candidates) beams.set(p, model::resolved_beam(bf, p, ch, net));
  Enumerator run{net, beams, ch, candidates, false, {}};
  std::vector<LinkPair> picked;
  std::vector<bool> used(static_cast<std::size_t>(net.size()), false);
  run.recurse(0, picked, used);
  return run.best;
}

}  // namespace d2dopt::oracle
