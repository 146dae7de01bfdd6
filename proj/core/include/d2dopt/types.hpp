#pragma once

#include <compare>
#include <complex>
#include <map>
#include <vector>

#include <Eigen/Dense>

namespace d2dopt {

using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

// Per-node task and hardware profile. SI units throughout: bits, bits/s,
// watts. data_bits may be zero (degenerate task); everything else must be
// strictly positive.
struct NodeProfile {
  double data_bits = 0.0;      // I_k
  double compute_speed = 1.0;  // C_k, bits/s
  double compute_power = 1.0;  // F_k, watts
  int tx_antennas = 1;
  int rx_antennas = 1;
};

// One network snapshot: node profiles plus shared radio parameters.
struct NetworkInstance {
  std::vector<NodeProfile> nodes;
  double power_budget = 1.0;   // P, watts, shared by all transmitters
  double bandwidth = 1e6;      // W, Hz per subchannel
  double noise_power = 1.0;    // sigma^2, watts
  int num_subchannels = 1;     // S

  int size() const { return static_cast<int>(nodes.size()); }
  int max_links() const { return size() / 2; }
  void validate() const;  // throws std::invalid_argument on bad fields
};

struct LinkPair {
  int tx = 0;
  int rx = 0;
  auto operator<=>(const LinkPair&) const = default;
};

// Channel matrices H_{k,k'} for every ordered node pair, rx antennas by tx
// antennas. Entries on the diagonal (k == k') are unused.
class ChannelSet {
 public:
  ChannelSet() = default;
  explicit ChannelSet(int num_nodes);

  int num_nodes() const { return k_; }
  const CMat& at(int tx, int rx) const;
  CMat& at(int tx, int rx);
  void validate(const NetworkInstance& net) const;  // shapes and finiteness

 private:
  int k_ = 0;
  std::vector<CMat> mats_;
};

struct Link {
  int tx = 0;
  int rx = 0;
  int subchannel = 0;  // 0-based
  auto operator<=>(const Link&) const = default;
};

// A set of directed links with subchannel assignments. Construction enforces
// the structural constraints: no self-links, every node in at most one link
// in any role, subchannel indices non-negative. Links are kept sorted by
// (tx, rx) so downstream arithmetic has one canonical evaluation order.
class Allocation {
 public:
  Allocation() = default;
  explicit Allocation(std::vector<Link> links);

  int size() const { return static_cast<int>(links_.size()); }
  bool empty() const { return links_.empty(); }
  const std::vector<Link>& links() const { return links_; }
  const Link& operator[](int n) const { return links_[static_cast<std::size_t>(n)]; }
  bool uses_node(int k) const;
  bool transmits(int k) const;

 private:
  std::vector<Link> links_;
};

// Relabels subchannels in first-use order along the sorted link list, so
// allocations that differ only by a subchannel permutation compare equal.
Allocation canonical_allocation(const Allocation& alloc);

// Transmit beamformer with the power folded in (g = sqrt(P_k) f_k) plus the
// receive combiner for one directed pair.
struct LinkBeam {
  CVec beamformer;  // dimension: tx antennas of the pair's transmitter
  CVec combiner;    // dimension: rx antennas of the pair's receiver
};

// Signal-design state keyed by directed pair. May carry entries for many
// candidate pairs, not only currently allocated links; the power budget
// applies to the sum over an allocation's links.
class BeamformingState {
 public:
  bool contains(LinkPair p) const { return entries_.count(p) != 0; }
  const LinkBeam& at(LinkPair p) const;
  void set(LinkPair p, LinkBeam beam) { entries_[p] = std::move(beam); }
  std::size_t size() const { return entries_.size(); }
  const std::map<LinkPair, LinkBeam>& entries() const { return entries_; }

  // Sum of squared beamformer norms over the allocation's links.
  double total_link_power(const Allocation& alloc) const;

 private:
  std::map<LinkPair, LinkBeam> entries_;
};

struct EnergyBreakdown {
  double total = 0.0;          // E_P, joules
  double communication = 0.0;  // E_M, joules
  double computation = 0.0;    // E_F, joules
};

}  // namespace d2dopt
