#pragma once

// Shared fixtures for the test suite.
//
// The three-node fixture: every node carries a 10 Mbit task at 1 W compute
// power; compute speeds are 10, 2, 1 Mbit/s for nodes 0, 1, 2. With every
// link rate pinned at 2 Mbit/s the energies work out to
//   all-local 16 J, offload 2->0 at 12 J, offload 1->0 at 17 J,
// and the candidate set is {(1,0), (2,0), (2,1)}.
// Rates hit exactly 2 Mbit/s through scalar channels h = sqrt(3), unit
// beamformers and combiners, sigma^2 = 1, W = 1 MHz: log2(1 + 3) * 1e6.

#include <cmath>
#include <vector>

#include "d2dopt/model.hpp"
#include "d2dopt/rng.hpp"
#include "d2dopt/types.hpp"

namespace d2dtest {

inline d2dopt::NetworkInstance three_node_net() {
  d2dopt::NetworkInstance net;
  net.nodes = {
      {1e7, 1e7, 1.0, 1, 1},  // fast node
      {1e7, 2e6, 1.0, 1, 1},
      {1e7, 1e6, 1.0, 1, 1},  // slow node
  };
  net.power_budget = 1.0;
  net.bandwidth = 1e6;
  net.noise_power = 1.0;
  net.num_subchannels = 1;
  return net;
}

inline d2dopt::ChannelSet three_node_channels() {
  d2dopt::ChannelSet ch(3);
  for (int tx = 0; tx < 3; ++tx)
    for (int rx = 0; rx < 3; ++rx) {
      if (tx == rx) continue;
      ch.at(tx, rx) = d2dopt::CMat::Constant(1, 1, std::sqrt(3.0));
    }
  return ch;
}

inline d2dopt::BeamformingState three_node_bf() {
  d2dopt::BeamformingState bf;
  for (int tx = 0; tx < 3; ++tx)
    for (int rx = 0; rx < 3; ++rx) {
      if (tx == rx) continue;
      d2dopt::LinkBeam beam;
      beam.beamformer = d2dopt::CVec::Ones(1);
      beam.combiner = d2dopt::CVec::Ones(1);
      bf.set({tx, rx}, beam);
    }
  return bf;
}

// Random instance with i.i.d. CN(0,1) channels, draws keyed by (seed, index).
inline std::pair<d2dopt::NetworkInstance, d2dopt::ChannelSet> random_instance(
    std::uint64_t seed, int num_nodes, int antennas, int subchannels,
    double power_budget = 5.0) {
  d2dopt::NetworkInstance net;
  net.power_budget = power_budget;
  net.bandwidth = 1e6;
  net.noise_power = 1.0;
  net.num_subchannels = subchannels;
  for (int k = 0; k < num_nodes; ++k) {
    d2dopt::rng::Stream s(seed, d2dopt::rng::kNodeDraw, static_cast<std::uint64_t>(k));
    d2dopt::NodeProfile p;
    p.data_bits = s.uniform(1.0, 20.0) * 1e6;
    p.compute_speed = s.uniform(0.1, 2.0) * 1e6;
    p.compute_power = s.uniform(0.5, 1.0);
    p.tx_antennas = antennas;
    p.rx_antennas = antennas;
    net.nodes.push_back(p);
  }
  d2dopt::ChannelSet ch(num_nodes);
  for (int tx = 0; tx < num_nodes; ++tx)
    for (int rx = 0; rx < num_nodes; ++rx) {
      if (tx == rx) continue;
      d2dopt::rng::Stream s(seed, d2dopt::rng::kChannelDraw, static_cast<std::uint64_t>(tx),
                            static_cast<std::uint64_t>(rx));
      d2dopt::CMat h(antennas, antennas);
      for (int i = 0; i < antennas; ++i)
        for (int j = 0; j < antennas; ++j) h(i, j) = s.complex_gaussian();
      ch.at(tx, rx) = h;
    }
  return {net, ch};
}

// Unit-sphere beams for every ordered pair, each at the given power.
inline d2dopt::BeamformingState random_bf(const d2dopt::NetworkInstance& net,
                                          std::uint64_t seed, double per_link_power) {
  d2dopt::BeamformingState bf;
  for (int tx = 0; tx < net.size(); ++tx)
    for (int rx = 0; rx < net.size(); ++rx) {
      if (tx == rx) continue;
      d2dopt::rng::Stream sf(seed, d2dopt::rng::kInitBeam, static_cast<std::uint64_t>(tx),
                             static_cast<std::uint64_t>(rx));
      d2dopt::LinkBeam beam;
      beam.beamformer =
          std::sqrt(per_link_power) *
          sf.unit_sphere(net.nodes[static_cast<std::size_t>(tx)].tx_antennas);
      beam.combiner = sf.unit_sphere(net.nodes[static_cast<std::size_t>(rx)].rx_antennas);
      bf.set({tx, rx}, beam);
    }
  return bf;
}

}  // namespace d2dtest
