#include "d2dopt/types.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>

namespace d2dopt {

void NetworkInstance::validate() const {
  if (size() < 2) throw std::invalid_argument("network needs at least 2 nodes");
  if (!(power_budget > 0.0)) throw std::invalid_argument("power_budget must be positive");
  if (!(bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be positive");
  if (!(noise_power > 0.0)) throw std::invalid_argument("noise_power must be positive");
  if (num_subchannels < 1) throw std::invalid_argument("num_subchannels must be >= 1");
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const NodeProfile& p = nodes[k];
    const std::string at = " (node " + std::to_string(k) + ")";
    if (!(p.data_bits >= 0.0) || !std::isfinite(p.data_bits))
      throw std::invalid_argument("data_bits must be finite and non-negative" + at);
    if (!(p.compute_speed > 0.0)) throw std::invalid_argument("compute_speed must be positive" + at);
    if (!(p.compute_power > 0.0)) throw std::invalid_argument("compute_power must be positive" + at);
    if (p.tx_antennas < 1 || p.rx_antennas < 1)
      throw std::invalid_argument("antenna counts must be >= 1" + at);
  }
}

ChannelSet::ChannelSet(int num_nodes) : k_(num_nodes) {
  if (num_nodes < 0) throw std::invalid_argument("ChannelSet: negative node count");
  mats_.resize(static_cast<std::size_t>(num_nodes) * static_cast<std::size_t>(num_nodes));
}

const CMat& ChannelSet::at(int tx, int rx) const {
  if (tx < 0 || rx < 0 || tx >= k_ || rx >= k_)
    throw std::out_of_range("ChannelSet::at: node index out of range");
  return mats_[static_cast<std::size_t>(tx) * static_cast<std::size_t>(k_) +
               static_cast<std::size_t>(rx)];
}

CMat& ChannelSet::at(int tx, int rx) {
  return const_cast<CMat&>(static_cast<const ChannelSet&>(*this).at(tx, rx));
}

void ChannelSet::validate(const NetworkInstance& net) const {
  if (k_ != net.size()) throw std::invalid_argument("ChannelSet size mismatch");
  for (int tx = 0; tx < k_; ++tx) {
    for (int rx = 0; rx < k_; ++rx) {
      if (tx == rx) continue;
      const CMat& h = at(tx, rx);
      if (h.rows() != net.nodes[static_cast<std::size_t>(rx)].rx_antennas ||
          h.cols() != net.nodes[static_cast<std::size_t>(tx)].tx_antennas)
        throw std::invalid_argument("channel matrix shape mismatch for pair (" +
                                    std::to_string(tx) + "," + std::to_string(rx) + ")");
      if (!h.allFinite()) throw std::invalid_argument("channel matrix has non-finite entries");
    }
  }
}

Allocation::Allocation(std::vector<Link> links) : links_(std::move(links)) {
  std::set<int> used;
  for (const Link& l : links_) {
    if (l.tx == l.rx) throw std::invalid_argument("self-link not allowed");
    if (l.tx < 0 || l.rx < 0) throw std::invalid_argument("negative node index");
    if (l.subchannel < 0) throw std::invalid_argument("negative subchannel index");
    if (!used.insert(l.tx).second || !used.insert(l.rx).second)
      throw std::invalid_argument("node appears in more than one link");
  }
  std::sort(links_.begin(), links_.end(),
            [](const Link& a, const Link& b) { return std::pair{a.tx, a.rx} < std::pair{b.tx, b.rx}; });
}

bool Allocation::uses_node(int k) const {
  for (const Link& l : links_)
    if (l.tx == k || l.rx == k) return true;
  return false;
}

bool Allocation::transmits(int k) const {
  for (const Link& l : links_)
    if (l.tx == k) return true;
  return false;
}

Allocation canonical_allocation(const Allocation& alloc) {
  std::map<int, int> relabel;
  std::vector<Link> out;
  out.reserve(alloc.links().size());
  for (const Link& l : alloc.links()) {
    auto [it, fresh] = relabel.emplace(l.subchannel, static_cast<int>(relabel.size()));
    (void)fresh;
    out.push_back({l.tx, l.rx, it->second});
  }
  return Allocation(std::move(out));
}

const LinkBeam& BeamformingState::at(LinkPair p) const {
  auto it = entries_.find(p);
  if (it == entries_.end())
    throw std::out_of_range("no beam entry for pair (" + std::to_string(p.tx) + "," +
                            std::to_string(p.rx) + ")");
  return it->second;
}

double BeamformingState::total_link_power(const Allocation& alloc) const {
  double sum = 0.0;
  for (const Link& l : alloc.links()) sum += at({l.tx, l.rx}).beamformer.squaredNorm();
  return sum;
}

}  // namespace d2dopt
