#include "d2dopt/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/SVD>

namespace d2dopt::model {

std::complex<double> pair_gain(const CVec& z, const CMat& h, const CVec& g) {
  if (z.size() != h.rows() || g.size() != h.cols())
    throw std::invalid_argument("pair_gain: dimension mismatch");
  return z.dot(h * g);  // Eigen dot conjugates the first argument: z^H (H g)
}

Eigen::MatrixXi cooccurrence(const Allocation& alloc) {
  const int n = alloc.size();
  Eigen::MatrixXi m = Eigen::MatrixXi::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      m(a, b) = alloc[a].subchannel == alloc[b].subchannel ? 1 : 0;
  return m;
}

double link_rate(int n, const Allocation& alloc, const BeamformingState& bf,
                 const ChannelSet& ch, const NetworkInstance& net) {
  if (n < 0 || n >= alloc.size()) throw std::out_of_range("link_rate: bad link index");
  const Link& ln = alloc[n];
  const LinkBeam& bn = bf.at({ln.tx, ln.rx});
  const double signal = std::norm(pair_gain(bn.combiner, ch.at(ln.tx, ln.rx), bn.beamformer));
  double denom = net.noise_power;
  for (int m = 0; m < alloc.size(); ++m) {
    if (m == n) continue;
    const Link& lm = alloc[m];
    if (lm.subchannel != ln.subchannel) continue;
    const LinkBeam& bm = bf.at({lm.tx, lm.rx});
    denom += std::norm(pair_gain(bn.combiner, ch.at(lm.tx, ln.rx), bm.beamformer));
  }
  return net.bandwidth * std::log2(1.0 + signal / denom);
}

double local_energy(int k, const NetworkInstance& net) {
  const NodeProfile& p = net.nodes.at(static_cast<std::size_t>(k));
  return p.compute_power * p.data_bits / p.compute_speed;
}

double offload_energy(int tx, int rx, double rate, double tx_power,
                      const NetworkInstance& net) {
  if (!(rate > 0.0))
    throw std::domain_error("offload_energy: non-positive rate on link (" +
                            std::to_string(tx) + "," + std::to_string(rx) + ")");
  if (tx_power < 0.0) throw std::domain_error("offload_energy: negative transmit power");
  const NodeProfile& src = net.nodes.at(static_cast<std::size_t>(tx));
  const NodeProfile& dst = net.nodes.at(static_cast<std::size_t>(rx));
  return tx_power * src.data_bits / rate + dst.compute_power * src.data_bits / dst.compute_speed;
}

EnergyBreakdown total_energy(const NetworkInstance& net, const Allocation& alloc,
                             std::span<const double> rates,
                             std::span<const double> tx_powers) {
  const auto count = static_cast<std::size_t>(alloc.size());
  if (rates.size() != count || tx_powers.size() != count)
    throw std::invalid_argument("total_energy: rates/powers length mismatch");
  double communication = 0.0;
  double computation = 0.0;
  for (int n = 0; n < alloc.size(); ++n) {
    const Link& l = alloc[n];
    const auto i = static_cast<std::size_t>(n);
    if (!(rates[i] > 0.0))
      throw std::domain_error("total_energy: non-positive rate on link (" +
                              std::to_string(l.tx) + "," + std::to_string(l.rx) + ")");
    const NodeProfile& src = net.nodes.at(static_cast<std::size_t>(l.tx));
    const NodeProfile& dst = net.nodes.at(static_cast<std::size_t>(l.rx));
    communication += tx_powers[i] * src.data_bits / rates[i];
    computation += dst.compute_power * src.data_bits / dst.compute_speed;
  }
  for (int k = 0; k < net.size(); ++k)
    if (!alloc.transmits(k)) computation += local_energy(k, net);
  return {communication + computation, communication, computation};
}

std::vector<LinkPair> candidate_links(const NetworkInstance& net) {
  std::vector<LinkPair> out;
  for (int k = 0; k < net.size(); ++k) {
    for (int kp = 0; kp < net.size(); ++kp) {
      if (k == kp) continue;
      const NodeProfile& a = net.nodes[static_cast<std::size_t>(k)];
      const NodeProfile& b = net.nodes[static_cast<std::size_t>(kp)];
      if (a.compute_power * a.data_bits / a.compute_speed >
          b.compute_power * a.data_bits / b.compute_speed)
        out.push_back({k, kp});
    }
  }
  return out;  // construction order is already (tx, rx) sorted
}

EnergyBreakdown evaluate_allocation(const NetworkInstance& net, const Allocation& alloc,
                                    const BeamformingState& bf, const ChannelSet& ch) {
  std::vector<double> rates(static_cast<std::size_t>(alloc.size()));
  std::vector<double> powers(static_cast<std::size_t>(alloc.size()));
  for (int n = 0; n < alloc.size(); ++n) {
    rates[static_cast<std::size_t>(n)] = link_rate(n, alloc, bf, ch, net);
    powers[static_cast<std::size_t>(n)] =
        bf.at({alloc[n].tx, alloc[n].rx}).beamformer.squaredNorm();
  }
  return total_energy(net, alloc, rates, powers);
}

LinkBeam matched_filter_beam(LinkPair p, const ChannelSet& ch, double power) {
  const CMat& h = ch.at(p.tx, p.rx);
  Eigen::JacobiSVD<CMat> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
  LinkBeam beam;
  beam.beamformer = std::sqrt(power) * svd.matrixV().col(0);
  beam.combiner = svd.matrixU().col(0);
  return beam;
}

LinkBeam resolved_beam(const BeamformingState& bf, LinkPair p, const ChannelSet& ch,
                       const NetworkInstance& net) {
  if (bf.contains(p)) return bf.at(p);
  return matched_filter_beam(p, ch, net.power_budget / net.max_links());
}

}  // namespace d2dopt::model
