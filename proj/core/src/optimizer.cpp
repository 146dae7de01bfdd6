#include "d2dopt/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "d2dopt/alloc.hpp"
#include "d2dopt/model.hpp"
#include "d2dopt/rng.hpp"

namespace d2dopt::opt {

namespace {

// Unit-sphere directions drawn once per node, then combined for every ordered
// pair; callers keep only the pairs they actually select.
BeamformingState node_sphere_beams(const NetworkInstance& net, std::uint64_t seed,
                                   double per_link_power) {
  const int k = net.size();
  std::vector<CVec> f(static_cast<std::size_t>(k)), z(static_cast<std::size_t>(k));
  for (int a = 0; a < k; ++a) {
    f[static_cast<std::size_t>(a)] =
        rng::Stream(seed, rng::kInitBeam, static_cast<std::uint64_t>(a))
            .unit_sphere(net.nodes[static_cast<std::size_t>(a)].tx_antennas);
    z[static_cast<std::size_t>(a)] =
        rng::Stream(seed, rng::kInitComb, static_cast<std::uint64_t>(a))
            .unit_sphere(net.nodes[static_cast<std::size_t>(a)].rx_antennas);
  }
  const double scale = std::sqrt(per_link_power);
  BeamformingState bf;
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      if (a == b) continue;
      bf.set({a, b}, {scale * f[static_cast<std::size_t>(a)], z[static_cast<std::size_t>(b)]});
    }
  return bf;
}

EnergyBreakdown evaluate_or_local(const NetworkInstance& net, Allocation& alloc,
                                  const BeamformingState& bf, const ChannelSet& ch) {
  if (alloc.empty()) return model::total_energy(net, Allocation{}, {}, {});
  try {
    return model::evaluate_allocation(net, alloc, bf, ch);
  } catch (const std::domain_error&) {
    alloc = Allocation{};  // a dead link slipped through, fall back to local
    return model::total_energy(net, Allocation{}, {}, {});
  }
}

// Keep only entries for the allocation's links. Anything else would be a
// stale draw or a leftover from an abandoned allocation; dropping it lets the
// allocator rate unallocated candidates by the matched-filter fallback
// instead of whatever beam they happened to carry.
BeamformingState restrict_to(const BeamformingState& bf, const Allocation& alloc) {
  BeamformingState out;
  for (const Link& l : alloc.links()) {
    const LinkPair p{l.tx, l.rx};
    if (bf.contains(p)) out.set(p, bf.at(p));
  }
  return out;
}

Allocation drop_links(const Allocation& alloc, const std::vector<LinkPair>& dead) {
  if (dead.empty()) return alloc;
  std::vector<Link> keep;
  for (const Link& l : alloc.links()) {
    if (std::find(dead.begin(), dead.end(), LinkPair{l.tx, l.rx}) == dead.end())
      keep.push_back(l);
  }
  return Allocation(keep);
}

Solution run_restart(const NetworkInstance& net, const ChannelSet& ch,
                     const RunConfig& cfg, int restart) {
  const std::uint64_t seed =
      rng::derive_seed(cfg.rng_seed, rng::kRestart, static_cast<std::uint64_t>(restart));
  auto [allocation, bf] = initialize(net, ch, seed);

  Solution sol;
  sol.restart_index = restart;
  EnergyBreakdown cur = evaluate_or_local(net, allocation, bf, ch);
  sol.trajectory.push_back(cur);
  sol.trajectory_links.push_back(allocation.size());

  // The loop can cycle between allocations instead of settling (the signal
  // step optimizes time, not energy, so the two steps need not agree); the
  // restart reports its best evaluated iterate, trajectory stays the raw
  // record.
  sol.allocation = allocation;
  sol.beamforming = bf;
  sol.energy = cur;

  for (int t = 0; t < cfg.alternations; ++t) {
    const alloc::AllocResult step =
        cfg.allocator == Allocator::kExact
            ? alloc::exact_allocate(net, bf, ch, {.max_links = cfg.max_links})
            : alloc::greedy_allocate(net, bf, ch, {.max_links = cfg.max_links});
    allocation = step.allocation;

    const mimo::WmmseResult w = mimo::wmmse_optimize(net, allocation, bf, ch, cfg.wmmse);
    allocation = drop_links(allocation, w.low_rate_links);
    bf = restrict_to(w.beams, allocation);

    const EnergyBreakdown prev = cur;
    cur = evaluate_or_local(net, allocation, bf, ch);
    sol.trajectory.push_back(cur);
    sol.trajectory_links.push_back(allocation.size());
    if (cur.total < sol.energy.total) {
      sol.allocation = allocation;
      sol.beamforming = bf;
      sol.energy = cur;
    }
    if (std::abs(cur.total - prev.total) <
        cfg.energy_tolerance * std::max(prev.total, 1e-300))
      break;
  }
  const EnergyBreakdown local = local_baseline(net);
  if (sol.energy.total > local.total) {
    sol.allocation = Allocation{};
    sol.energy = local;  // trajectory keeps the raw alternation record
  }
  return sol;
}

}  // namespace

std::pair<Allocation, BeamformingState> initialize(const NetworkInstance& net,
                                                   const ChannelSet& ch,
                                                   std::uint64_t seed) {
  (void)ch;
  const int cap = net.max_links();
  const BeamformingState drawn =
      node_sphere_beams(net, seed, net.power_budget / std::max(1, cap));

  std::vector<LinkPair> alive = model::candidate_links(net);
  rng::Stream draw(seed, rng::kInitLinks);
  std::vector<Link> links;
  while (!alive.empty() && static_cast<int>(links.size()) < cap) {
    const LinkPair p =
        alive[static_cast<std::size_t>(draw.uniform_int(0, static_cast<int>(alive.size()) - 1))];
    const int sc = draw.uniform_int(0, net.num_subchannels - 1);
    links.push_back({p.tx, p.rx, sc});
    std::erase_if(alive, [&](const LinkPair& q) {
      return q.tx == p.tx || q.tx == p.rx || q.rx == p.tx || q.rx == p.rx;
    });
  }
  Allocation alloc(std::move(links));
  return {alloc, restrict_to(drawn, alloc)};
}

EnergyBreakdown local_baseline(const NetworkInstance& net) {
  return model::total_energy(net, Allocation{}, {}, {});
}

RunSummary alternate(const NetworkInstance& net, const ChannelSet& ch,
                     const RunConfig& cfg) {
  RunSummary out;
  if (model::candidate_links(net).empty()) {
    // nothing can ever be offloaded profitably
    Solution sol;
    sol.energy = local_baseline(net);
    sol.trajectory = {sol.energy};
    sol.trajectory_links = {0};
    out.best = sol;
    out.mean_energy = sol.energy.total;
    out.mean_trajectory = {sol.energy.total};
    out.restart_energies.assign(static_cast<std::size_t>(cfg.num_restarts),
                                sol.energy.total);
    return out;
  }

  std::vector<Solution> runs;
  runs.reserve(static_cast<std::size_t>(cfg.num_restarts));
  for (int r = 0; r < cfg.num_restarts; ++r)
    runs.push_back(run_restart(net, ch, cfg, r));

  std::size_t best = 0;
  std::size_t longest = 0;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    out.restart_energies.push_back(runs[r].energy.total);
    if (runs[r].energy.total < runs[best].energy.total) best = r;
    longest = std::max(longest, runs[r].trajectory.size());
  }
  out.best = runs[best];
  out.mean_energy =
      std::accumulate(out.restart_energies.begin(), out.restart_energies.end(), 0.0) /
      static_cast<double>(runs.size());
  out.mean_trajectory.assign(longest, 0.0);
  for (const Solution& s : runs) {
    for (std::size_t t = 0; t < longest; ++t) {
      const std::size_t i = std::min(t, s.trajectory.size() - 1);  // pad with last
      out.mean_trajectory[t] += s.trajectory[i].total;
    }
  }
  for (double& v : out.mean_trajectory) v /= static_cast<double>(runs.size());
  return out;
}

Solution random_wmmse_baseline(const NetworkInstance& net, const ChannelSet& ch,
                               std::uint64_t seed, const mimo::WmmseConfig& wmmse) {
  const int k = net.size();
  rng::Stream draw(seed, rng::kRandomMatch);
  std::vector<int> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), 0);
  for (int i = k - 1; i >= 1; --i)
    std::swap(order[static_cast<std::size_t>(i)],
              order[static_cast<std::size_t>(draw.uniform_int(0, i))]);

  std::vector<Link> links;
  for (int i = 0; i + 1 < k; i += 2) {
    const int a = order[static_cast<std::size_t>(i)];
    const int b = order[static_cast<std::size_t>(i + 1)];
    const double ca = net.nodes[static_cast<std::size_t>(a)].compute_speed;
    const double cb = net.nodes[static_cast<std::size_t>(b)].compute_speed;
    int tx = a, rx = b;
    if (cb < ca || (cb == ca && b < a)) {
      tx = b;
      rx = a;
    }
    links.push_back({tx, rx, draw.uniform_int(0, net.num_subchannels - 1)});
  }

  Solution sol;
  sol.allocation = Allocation(std::move(links));
  BeamformingState bf =
      node_sphere_beams(net, seed, net.power_budget / std::max(1, net.max_links()));
  const mimo::WmmseResult w = mimo::wmmse_optimize(net, sol.allocation, bf, ch, wmmse);
  sol.allocation = drop_links(sol.allocation, w.low_rate_links);
  sol.beamforming = restrict_to(w.beams, sol.allocation);
  sol.energy = evaluate_or_local(net, sol.allocation, sol.beamforming, ch);
  sol.trajectory = {sol.energy};
  sol.trajectory_links = {sol.allocation.size()};
  return sol;
}

}  // namespace d2dopt::opt
