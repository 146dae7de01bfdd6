#include "d2dopt/mimo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "d2dopt/model.hpp"

namespace d2dopt::mimo {

namespace {

double clamp_mse(double e, double floor) {
  return std::clamp(e, floor, 1.0 - floor);
}

// c(x) = -1/ln x, the delay-per-bit transform of the MSE.
double c_of(double x) { return -1.0 / std::log(x); }

// Per-link quadratic pieces of the beamformer block, in eigenbasis form so
// the power curve p(mu) is cheap to evaluate during bisection.
struct LinkQuadratic {
  Eigen::MatrixXcd basis;      // eigenvectors of A_n
  Eigen::VectorXd eigenvalues; // ascending, >= 0 up to roundoff
  CVec b_coeff;                // eigenbasis coordinates of b_n
};

double power_at(const std::vector<LinkQuadratic>& quads, double mu) {
  double p = 0.0;
  for (const LinkQuadratic& q : quads) {
    for (int i = 0; i < q.eigenvalues.size(); ++i) {
      const double d = q.eigenvalues[i] + mu;
      p += std::norm(q.b_coeff[i]) / (d * d);
    }
  }
  return p;
}

// Minimum-norm solution at mu = 0: components in the (numerical) null space
// of A carry no b energy and are dropped instead of divided by ~0.
double power_at_zero(const std::vector<LinkQuadratic>& quads) {
  double p = 0.0;
  for (const LinkQuadratic& q : quads) {
    const double lmax = q.eigenvalues.size() ? q.eigenvalues[q.eigenvalues.size() - 1] : 0.0;
    const double thr = lmax * 1e-12;
    for (int i = 0; i < q.eigenvalues.size(); ++i) {
      if (q.eigenvalues[i] <= thr) continue;
      p += std::norm(q.b_coeff[i]) / (q.eigenvalues[i] * q.eigenvalues[i]);
    }
  }
  return p;
}

CVec beamformer_at(const LinkQuadratic& q, double mu, bool filtered) {
  const double lmax = q.eigenvalues.size() ? q.eigenvalues[q.eigenvalues.size() - 1] : 0.0;
  const double thr = lmax * 1e-12;
  CVec coeff(q.eigenvalues.size());
  for (int i = 0; i < q.eigenvalues.size(); ++i) {
    if (filtered && q.eigenvalues[i] <= thr) {
      coeff[i] = 0.0;
      continue;
    }
    coeff[i] = q.b_coeff[i] / (q.eigenvalues[i] + mu);
  }
  return q.basis * coeff;
}

}  // namespace

CVec mmse_combiner(int n, const std::vector<CVec>& g, const Allocation& alloc,
                   const ChannelSet& ch, const NetworkInstance& net) {
  const Link& ln = alloc[n];
  const int nr = net.nodes[static_cast<std::size_t>(ln.rx)].rx_antennas;
  CMat j = net.noise_power * CMat::Identity(nr, nr);
  for (int m = 0; m < alloc.size(); ++m) {
    if (alloc[m].subchannel != ln.subchannel) continue;  // m == n included
    const CVec hg = ch.at(alloc[m].tx, ln.rx) * g[static_cast<std::size_t>(m)];
    j += hg * hg.adjoint();
  }
  return j.llt().solve(ch.at(ln.tx, ln.rx) * g[static_cast<std::size_t>(n)]);
}

double link_mse(int n, const std::vector<CVec>& z, const std::vector<CVec>& g,
                const Allocation& alloc, const ChannelSet& ch,
                const NetworkInstance& net) {
  const Link& ln = alloc[n];
  const CVec& zn = z[static_cast<std::size_t>(n)];
  double e = std::norm(1.0 - model::pair_gain(zn, ch.at(ln.tx, ln.rx),
                                              g[static_cast<std::size_t>(n)]));
  for (int m = 0; m < alloc.size(); ++m) {
    if (m == n || alloc[m].subchannel != ln.subchannel) continue;
    e += std::norm(model::pair_gain(zn, ch.at(alloc[m].tx, ln.rx),
                                    g[static_cast<std::size_t>(m)]));
  }
  return e + net.noise_power * zn.squaredNorm();
}

double link_sinr(int n, const std::vector<CVec>& z, const std::vector<CVec>& g,
                 const Allocation& alloc, const ChannelSet& ch,
                 const NetworkInstance& net) {
  const Link& ln = alloc[n];
  const CVec& zn = z[static_cast<std::size_t>(n)];
  const double signal = std::norm(model::pair_gain(zn, ch.at(ln.tx, ln.rx),
                                                   g[static_cast<std::size_t>(n)]));
  double denom = net.noise_power * zn.squaredNorm();
  for (int m = 0; m < alloc.size(); ++m) {
    if (m == n || alloc[m].subchannel != ln.subchannel) continue;
    denom += std::norm(model::pair_gain(zn, ch.at(alloc[m].tx, ln.rx),
                                        g[static_cast<std::size_t>(m)]));
  }
  return denom > 0.0 ? signal / denom : 0.0;
}

double update_weight(double mse, double mse_floor) {
  const double e = clamp_mse(mse, mse_floor);
  const double l = std::log(e);
  return 1.0 / (e * l * l);
}

std::vector<CVec> solve_beamformers(const std::vector<CVec>& z,
                                    const std::vector<double>& w, const Allocation& alloc,
                                    const ChannelSet& ch, const NetworkInstance& net,
                                    double* mu_out, double bisection_tolerance) {
  const int count = alloc.size();
  std::vector<LinkQuadratic> quads(static_cast<std::size_t>(count));
  for (int n = 0; n < count; ++n) {
    const Link& ln = alloc[n];
    const double in_wn =
        net.nodes[static_cast<std::size_t>(ln.tx)].data_bits * w[static_cast<std::size_t>(n)];
    const CVec v_own = ch.at(ln.tx, ln.rx).adjoint() * z[static_cast<std::size_t>(n)];
    CMat a = in_wn * (v_own * v_own.adjoint());
    const CVec b = in_wn * v_own;
    for (int m = 0; m < count; ++m) {
      if (m == n || alloc[m].subchannel != ln.subchannel) continue;
      const CVec v = ch.at(ln.tx, alloc[m].rx).adjoint() * z[static_cast<std::size_t>(m)];
      a += net.nodes[static_cast<std::size_t>(alloc[m].tx)].data_bits *
           w[static_cast<std::size_t>(m)] * (v * v.adjoint());
    }
    Eigen::SelfAdjointEigenSolver<CMat> es(a);
    LinkQuadratic& q = quads[static_cast<std::size_t>(n)];
    q.basis = es.eigenvectors();
    q.eigenvalues = es.eigenvalues().cwiseMax(0.0);
    q.b_coeff = q.basis.adjoint() * b;
  }

  const double budget = net.power_budget;
  double mu = 0.0;
  bool filtered = true;
  if (power_at_zero(quads) > budget) {
    filtered = false;
    double lo = 0.0;
    double hi = 1.0;
    for (int i = 0; i < 200 && power_at(quads, hi) > budget; ++i) hi *= 2.0;
    for (int i = 0; i < 2000; ++i) {
      if (budget - power_at(quads, hi) <= bisection_tolerance * budget) break;
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;  // interval exhausted at double precision
      if (power_at(quads, mid) > budget)
        lo = mid;
      else
        hi = mid;
    }
    mu = hi;  // feasible side: power at hi never exceeds the budget
  }

  std::vector<CVec> g(static_cast<std::size_t>(count));
  for (int n = 0; n < count; ++n)
    g[static_cast<std::size_t>(n)] =
        beamformer_at(quads[static_cast<std::size_t>(n)], mu, filtered);
  if (mu_out) *mu_out = mu;
  return g;
}

WmmseResult wmmse_optimize(const NetworkInstance& net, const Allocation& alloc,
                           const BeamformingState& init, const ChannelSet& ch,
                           const WmmseConfig& cfg) {
  WmmseResult out;
  out.beams = init;
  if (alloc.empty()) {
    out.converged = true;
    return out;
  }

  const std::size_t count = static_cast<std::size_t>(alloc.size());
  std::vector<CVec> g(count), z(count);
  for (int n = 0; n < alloc.size(); ++n)
    g[static_cast<std::size_t>(n)] =
        model::resolved_beam(init, {alloc[n].tx, alloc[n].rx}, ch, net).beamformer;

  std::vector<double> w(count, 2.0), w_prev(count, 1.0), gamma(count, 0.5), e(count, 0.0);
  WmmseState best;
  double best_surrogate = std::numeric_limits<double>::infinity();

  WmmseState cur;
  bool converged = false;
  int rounds = 0;
  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    for (int n = 0; n < alloc.size(); ++n)
      z[static_cast<std::size_t>(n)] = mmse_combiner(n, g, alloc, ch, net);
    w_prev = w;
    for (int n = 0; n < alloc.size(); ++n) {
      const double en = link_mse(n, z, g, alloc, ch, net);
      gamma[static_cast<std::size_t>(n)] = clamp_mse(en, cfg.mse_floor);
      w[static_cast<std::size_t>(n)] = update_weight(en, cfg.mse_floor);
    }
    g = solve_beamformers(z, w, alloc, ch, net, nullptr, cfg.bisection_tolerance);

    double surrogate = 0.0;
    for (int n = 0; n < alloc.size(); ++n) {
      const std::size_t i = static_cast<std::size_t>(n);
      e[i] = link_mse(n, z, g, alloc, ch, net);
      const double data = net.nodes[static_cast<std::size_t>(alloc[n].tx)].data_bits;
      surrogate += data * (w[i] * e[i] + c_of(gamma[i]) - w[i] * gamma[i]);
    }
    rounds = iter;
    out.surrogate_history.push_back(surrogate);

    cur.beamformers = g;
    cur.combiners = z;
    cur.weights = w;
    cur.mse = e;
    cur.surrogate_value = surrogate;
    cur.iteration = iter;
    if (surrogate < best_surrogate) {
      best_surrogate = surrogate;
      best = cur;
    }

    double delta = 0.0;
    for (std::size_t i = 0; i < count; ++i)
      delta += std::log2(w[i]) - std::log2(w_prev[i]);
    if (std::abs(delta) < cfg.tolerance) {
      converged = true;
      break;
    }
  }

  out.state = converged ? cur : best;
  out.converged = converged;
  out.iterations = rounds;
  out.surrogate = out.state.surrogate_value;

  for (int n = 0; n < alloc.size(); ++n) {
    const std::size_t i = static_cast<std::size_t>(n);
    LinkBeam beam;
    beam.beamformer = out.state.beamformers[i];
    const double zn = out.state.combiners[i].norm();
    beam.combiner = zn > 0.0 ? CVec(out.state.combiners[i] / zn) : out.state.combiners[i];
    out.beams.set({alloc[n].tx, alloc[n].rx}, beam);
  }
  for (int n = 0; n < alloc.size(); ++n) {
    if (model::link_rate(n, alloc, out.beams, ch, net) < cfg.rate_floor)
      out.low_rate_links.push_back({alloc[n].tx, alloc[n].rx});
  }
  return out;
}

}  // namespace d2dopt::mimo
