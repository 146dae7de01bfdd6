#include "d2dopt/alloc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "d2dopt/model.hpp"

namespace d2dopt::alloc {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Beam entries for every candidate pair, with matched-filter fallbacks filled
// in, so scoring and final evaluation see one consistent signal state.
BeamformingState effective_beams(const std::vector<LinkPair>& pairs,
                                 const BeamformingState& bf, const ChannelSet& ch,
                                 const NetworkInstance& net) {
  BeamformingState out;
  for (const LinkPair& p : pairs) out.set(p, model::resolved_beam(bf, p, ch, net));
  return out;
}

}  // namespace

SavedEnergy saved_energy(int tx, int rx, std::optional<int> subchannel,
                         const Allocation& partial, const BeamformingState& bf,
                         const ChannelSet& ch, const NetworkInstance& net) {
  const LinkBeam beam = model::resolved_beam(bf, {tx, rx}, ch, net);
  const double signal = std::norm(model::pair_gain(beam.combiner, ch.at(tx, rx), beam.beamformer));
  double denom = net.noise_power;
  if (subchannel) {
    for (const Link& l : partial.links()) {
      if (l.subchannel != *subchannel) continue;
      const LinkBeam other = model::resolved_beam(bf, {l.tx, l.rx}, ch, net);
      denom += std::norm(model::pair_gain(beam.combiner, ch.at(l.tx, rx), other.beamformer));
    }
  }
  const double rate = net.bandwidth * std::log2(1.0 + signal / denom);
  const double offload =
      model::offload_energy(tx, rx, rate, beam.beamformer.squaredNorm(), net);
  return {tx, rx, subchannel, model::local_energy(tx, net) - offload};
}

AllocResult greedy_allocate(const NetworkInstance& net, const BeamformingState& bf,
                            const ChannelSet& ch, const GreedyOptions& opts) {
  const auto start = Clock::now();
  const std::vector<LinkPair> candidates = model::candidate_links(net);
  const BeamformingState beams = effective_beams(candidates, bf, ch, net);
  const int cap = opts.max_links < 0 ? net.max_links()
                                     : std::min(opts.max_links, net.max_links());

  SolverStats stats;
  std::vector<LinkPair> alive = candidates;
  std::vector<Link> chosen;
  int fresh = 0;  // subchannels handed out so far

  while (static_cast<int>(chosen.size()) < cap && !alive.empty()) {
    const Allocation partial(chosen);
    bool found = false;
    double best_value = 0.0;
    LinkPair best_pair;
    int best_subchannel = 0;

    if (fresh < net.num_subchannels) {
      // Phase 1: a fresh subchannel is available, score interference-free.
      for (const LinkPair& p : alive) {
        ++stats.candidates_evaluated;
        SavedEnergy d;
        try {
          d = saved_energy(p.tx, p.rx, std::nullopt, partial, beams, ch, net);
        } catch (const std::domain_error&) {
          continue;  // dead pair, rate underflowed to zero
        }
        if (!found || d.value > best_value) {
          found = true;
          best_value = d.value;
          best_pair = p;
          best_subchannel = fresh;
        }
      }
    } else {
      // Phase 2: every subchannel is occupied, score each reuse against the
      // links already holding it.
      for (const LinkPair& p : alive) {
        for (int i = 0; i < net.num_subchannels; ++i) {
          ++stats.candidates_evaluated;
          SavedEnergy d;
          try {
            d = saved_energy(p.tx, p.rx, i, partial, beams, ch, net);
          } catch (const std::domain_error&) {
            continue;
          }
          if (!found || d.value > best_value) {
            found = true;
            best_value = d.value;
            best_pair = p;
            best_subchannel = i;
          }
        }
      }
    }

    if (!found || best_value <= 0.0) break;  // nothing left worth connecting

    chosen.push_back({best_pair.tx, best_pair.rx, best_subchannel});
    if (best_subchannel == fresh) ++fresh;
    std::erase_if(alive, [&](const LinkPair& p) {
      return p.tx == best_pair.tx || p.tx == best_pair.rx || p.rx == best_pair.tx ||
             p.rx == best_pair.rx;
    });
  }

  AllocResult result;
  result.allocation = Allocation(std::move(chosen));
  result.energy = model::evaluate_allocation(net, result.allocation, beams, ch);
  stats.wall_ms = elapsed_ms(start);
  result.stats = stats;
  return result;
}

namespace {

// Shared state of the branch-and-bound enumeration.
struct ExactSearch {
  ExactSearch(const NetworkInstance& n, const std::vector<LinkPair>& c,
              const BeamformingState& b)
      : net(n), candidates(c), beams(b) {}

  const NetworkInstance& net;
  const std::vector<LinkPair>& candidates;
  const BeamformingState& beams;
  int cap_links = 0;

  // Gain tables: signal and cross interference between candidate pairs.
  // cross[p][q] = |z_p^H H_{q.tx -> p.rx} g_q|^2.
  std::vector<std::vector<double>> cross;
  std::vector<double> signal;
  std::vector<double> link_power;

  // Per-node savings upper bound for pruning.
  std::vector<double> savings_ub;

  std::vector<Link> current;
  std::vector<int> current_idx;
  std::vector<bool> node_used;
  double remaining_savings = 0.0;

  bool has_best = false;
  double best_energy = 0.0;
  EnergyBreakdown best_breakdown;
  std::vector<Link> best_links;
  SolverStats stats;

  bool better_than_best(double energy, const std::vector<Link>& links) const {
    if (!has_best) return true;
    if (energy < best_energy) return true;
    if (energy > best_energy) return false;
    if (links.size() != best_links.size()) return links.size() < best_links.size();
    return links < best_links;
  }

  // Rates of the current partial in canonical order, from the gain tables.
  // Mirrors model::link_rate arithmetic exactly. Returns false when a link
  // rate is non-positive, which also dooms every extension.
  bool current_rates(std::vector<double>& rates) const {
    const std::size_t n = current.size();
    rates.resize(n);
    for (std::size_t a = 0; a < n; ++a) {
      const int pa = current_idx[a];
      double denom = net.noise_power;
      for (std::size_t b = 0; b < n; ++b) {
        if (b == a || current[b].subchannel != current[a].subchannel) continue;
        denom += cross[static_cast<std::size_t>(pa)][static_cast<std::size_t>(current_idx[b])];
      }
      const double r =
          net.bandwidth * std::log2(1.0 + signal[static_cast<std::size_t>(pa)] / denom);
      if (!(r > 0.0)) return false;
      rates[a] = r;
    }
    return true;
  }

  void dfs(int start_idx, int used_subchannels) {
    ++stats.nodes_explored;
    std::vector<double> rates;
    if (!current_rates(rates)) return;  // dead link now, dead in every extension

    std::vector<double> powers(current.size());
    for (std::size_t a = 0; a < current.size(); ++a)
      powers[a] = link_power[static_cast<std::size_t>(current_idx[a])];
    const Allocation alloc(current);
    const EnergyBreakdown e = model::total_energy(net, alloc, rates, powers);
    if (better_than_best(e.total, current)) {
      has_best = true;
      best_energy = e.total;
      best_breakdown = e;
      best_links = current;
    }

    if (static_cast<int>(current.size()) >= cap_links) return;
    // Extensions only shrink existing rates, so their energy is bounded below
    // by the current total minus the free-space savings still available.
    if (e.total - remaining_savings > best_energy + 1e-9 * (1.0 + std::abs(best_energy)))
      return;

    for (int j = start_idx; j < static_cast<int>(candidates.size()); ++j) {
      const LinkPair p = candidates[static_cast<std::size_t>(j)];
      if (node_used[static_cast<std::size_t>(p.tx)] || node_used[static_cast<std::size_t>(p.rx)])
        continue;
      const int sc_limit = std::min(used_subchannels + 1, net.num_subchannels);
      for (int sc = 0; sc < sc_limit; ++sc) {
        current.push_back({p.tx, p.rx, sc});
        current_idx.push_back(j);
        node_used[static_cast<std::size_t>(p.tx)] = true;
        node_used[static_cast<std::size_t>(p.rx)] = true;
        const double saved = savings_ub[static_cast<std::size_t>(p.tx)] +
                             savings_ub[static_cast<std::size_t>(p.rx)];
        remaining_savings -= saved;

        dfs(j + 1, std::max(used_subchannels, sc + 1));

        remaining_savings += saved;
        node_used[static_cast<std::size_t>(p.tx)] = false;
        node_used[static_cast<std::size_t>(p.rx)] = false;
        current_idx.pop_back();
        current.pop_back();
      }
    }
  }
};

}  // namespace

AllocResult exact_allocate(const NetworkInstance& net, const BeamformingState& bf,
                           const ChannelSet& ch, const ExactOptions& opts) {
  if (net.size() > opts.max_nodes)
    throw std::invalid_argument("exact_allocate: network of " + std::to_string(net.size()) +
                                " nodes exceeds the enumeration cap of " +
                                std::to_string(opts.max_nodes));
  const auto start = Clock::now();
  const std::vector<LinkPair> candidates = model::candidate_links(net);
  const BeamformingState beams = effective_beams(candidates, bf, ch, net);

  ExactSearch search{net, candidates, beams};
  search.cap_links =
      opts.max_links < 0 ? net.max_links() : std::min(opts.max_links, net.max_links());

  const std::size_t np = candidates.size();
  search.cross.assign(np, std::vector<double>(np, 0.0));
  search.signal.assign(np, 0.0);
  search.link_power.assign(np, 0.0);
  for (std::size_t p = 0; p < np; ++p) {
    const LinkBeam& bp = beams.at(candidates[p]);
    search.link_power[p] = bp.beamformer.squaredNorm();
    for (std::size_t q = 0; q < np; ++q) {
      // node-sharing combos never coexist in an allocation; their channel may
      // not even be defined (q.tx == p.rx), so leave those entries at zero
      if (q != p && (candidates[q].tx == candidates[p].tx ||
                     candidates[q].tx == candidates[p].rx ||
                     candidates[q].rx == candidates[p].tx ||
                     candidates[q].rx == candidates[p].rx))
        continue;
      const LinkBeam& bq = beams.at(candidates[q]);
      search.cross[p][q] = std::norm(model::pair_gain(
          bp.combiner, ch.at(candidates[q].tx, candidates[p].rx), bq.beamformer));
    }
    search.signal[p] = search.cross[p][p];
    search.stats.candidates_evaluated += static_cast<long>(np);
  }

  // node_best[k]: cheapest conceivable handling of node k's data in any
  // extension (stay local, or ship interference-free over its best pair).
  search.savings_ub.assign(static_cast<std::size_t>(net.size()), 0.0);
  for (int k = 0; k < net.size(); ++k) {
    const double local = model::local_energy(k, net);
    double best = local;
    for (std::size_t p = 0; p < np; ++p) {
      if (candidates[p].tx != k) continue;
      const double rate =
          net.bandwidth * std::log2(1.0 + search.signal[p] / net.noise_power);
      if (!(rate > 0.0)) continue;
      best = std::min(best, model::offload_energy(k, candidates[p].rx, rate,
                                                  search.link_power[p], net));
    }
    search.savings_ub[static_cast<std::size_t>(k)] = std::max(0.0, local - best);
    search.remaining_savings += search.savings_ub[static_cast<std::size_t>(k)];
  }

  search.node_used.assign(static_cast<std::size_t>(net.size()), false);
  search.dfs(0, 0);

  AllocResult result;
  result.allocation = Allocation(search.best_links);
  result.energy = search.best_breakdown;
  result.stats = search.stats;
  result.stats.wall_ms = elapsed_ms(start);
  return result;
}

}  // namespace d2dopt::alloc
