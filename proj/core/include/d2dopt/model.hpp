#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "d2dopt/types.hpp"

namespace d2dopt::model {

// z^H H g, the effective scalar channel seen through combiner z and
// beamformer g. Shared by every rate evaluation so identical inputs always
// produce identical floating-point results.
std::complex<double> pair_gain(const CVec& z, const CMat& h, const CVec& g);

// Subchannel co-occurrence matrix M = sum_i m_i m_i^T over the allocation's
// links; M(n,n) = 1 since every link holds exactly one subchannel.
Eigen::MatrixXi cooccurrence(const Allocation& alloc);

// Achievable rate of link n in bits/s under mutual co-channel interference:
//   W log2(1 + |z^H H g|^2 / (sum_{m != n} M(n,m) |z^H H_{k_m,k'_n} g_m|^2 + sigma^2)).
// Expects the exported beam representation: unit-norm combiners, power folded
// into g. A zero desired-signal beamformer yields rate 0 (degenerate input;
// the caller must treat the link as unusable).
double link_rate(int n, const Allocation& alloc, const BeamformingState& bf,
                 const ChannelSet& ch, const NetworkInstance& net);

// E_k = F_k I_k / C_k.
double local_energy(int k, const NetworkInstance& net);

// E_{k,k'} = P_k I_k / R_{k,k'} + F_{k'} I_k / C_{k'}. The transmitter's data
// length rides at the receiver's speed and power. Throws std::domain_error on
// rate <= 0 so allocators must prune dead links explicitly.
double offload_energy(int tx, int rx, double rate, double tx_power,
                      const NetworkInstance& net);

// Full breakdown for an allocation given per-link rates and transmit powers:
// total = E_P, communication = E_M, computation = E_F = E_P - E_M. Nodes not
// transmitting process their own data locally, receivers included.
EnergyBreakdown total_energy(const NetworkInstance& net, const Allocation& alloc,
                             std::span<const double> rates,
                             std::span<const double> tx_powers);

// Candidate set X = {(k,k') : F_k I_k / C_k > F_{k'} I_k / C_{k'}}, sorted by
// (tx, rx). Nodes with zero data length have no outgoing candidates.
std::vector<LinkPair> candidate_links(const NetworkInstance& net);

// Rates from link_rate, powers from the beam state, then total_energy. The
// one evaluation path shared by solvers, oracles, and the optimizer.
EnergyBreakdown evaluate_allocation(const NetworkInstance& net, const Allocation& alloc,
                                    const BeamformingState& bf, const ChannelSet& ch);

// Matched-filter default for a pair absent from a beam state: beamformer
// sqrt(power) times the dominant right singular vector of H, combiner the
// dominant left singular vector.
LinkBeam matched_filter_beam(LinkPair p, const ChannelSet& ch, double power);

// Entry from bf when present, matched-filter default at power P / L_max
// otherwise.
LinkBeam resolved_beam(const BeamformingState& bf, LinkPair p, const ChannelSet& ch,
                       const NetworkInstance& net);

}  // namespace d2dopt::model
