#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "d2dopt/mimo.hpp"
#include "d2dopt/model.hpp"
#include "d2dopt/rng.hpp"
#include "helpers.hpp"

using namespace d2dopt;
namespace dmo = d2dopt::mimo;
namespace dm = d2dopt::model;

namespace {

// Two nodes, one scalar link 0 -> 1.
NetworkInstance scalar_net(double data_bits = 1.0, double power_budget = 2.0) {
  NetworkInstance net;
  net.nodes = {{data_bits, 1e6, 1.0, 1, 1}, {data_bits, 1e6, 1.0, 1, 1}};
  net.power_budget = power_budget;
  net.bandwidth = 1e6;
  net.noise_power = 1.0;
  net.num_subchannels = 1;
  return net;
}

ChannelSet scalar_channel(double h) {
  ChannelSet ch(2);
  ch.at(0, 1) = CMat::Constant(1, 1, h);
  ch.at(1, 0) = CMat::Constant(1, 1, h);
  return ch;
}

// Four nodes with two directed links, channels CN(0,1), antennas n x n.
struct TwoLinkFixture {
  NetworkInstance net;
  ChannelSet ch;
  Allocation alloc;
};

TwoLinkFixture two_link_fixture(std::uint64_t seed, int antennas, int subchannels,
                                bool share_subchannel, double power_budget) {
  TwoLinkFixture f;
  auto [net, ch] = d2dtest::random_instance(seed, 4, antennas, subchannels, power_budget);
  f.net = net;
  f.ch = ch;
  f.alloc = Allocation({{0, 1, 0}, {2, 3, share_subchannel ? 0 : 1}});
  return f;
}

double weighted_mse_objective(const std::vector<CVec>& z, const std::vector<CVec>& g,
                              const std::vector<double>& w, const Allocation& alloc,
                              const ChannelSet& ch, const NetworkInstance& net) {
  double q = 0.0;
  for (int n = 0; n < alloc.size(); ++n)
    q += net.nodes[static_cast<std::size_t>(alloc[n].tx)].data_bits *
         w[static_cast<std::size_t>(n)] * dmo::link_mse(n, z, g, alloc, ch, net);
  return q;
}

}  // namespace

TEST_CASE("mmse combiner on the scalar fixture") {
  const NetworkInstance net = scalar_net();
  const ChannelSet ch = scalar_channel(2.0);
  const Allocation alloc({{0, 1, 0}});
  const std::vector<CVec> g = {CVec::Ones(1)};
  const CVec z = dmo::mmse_combiner(0, g, alloc, ch, net);
  REQUIRE(z.size() == 1);
  CHECK(z[0].real() == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(z[0].imag() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(dmo::link_mse(0, {z}, g, alloc, ch, net) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("mmse combiner is a matched filter without interference") {
  NetworkInstance net;
  net.nodes = {{1e6, 1e6, 1.0, 2, 3}, {1e6, 1e6, 1.0, 2, 3}};
  net.power_budget = 2.0;
  ChannelSet ch(2);
  rng::Stream s(9, rng::kChannelDraw, 0, 1);
  CMat h(3, 2);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j) h(i, j) = s.complex_gaussian();
  ch.at(0, 1) = h;
  ch.at(1, 0) = h.adjoint();
  const Allocation alloc({{0, 1, 0}});
  const CVec g = s.unit_sphere(2);
  const CVec z = dmo::mmse_combiner(0, {g}, alloc, ch, net);
  const CVec hg = h * g;
  CHECK(std::abs(z.dot(hg)) ==
        doctest::Approx(z.norm() * hg.norm()).epsilon(1e-9));  // collinear
}

TEST_CASE("mmse combiner of a dead beamformer is zero") {
  const NetworkInstance net = scalar_net();
  const ChannelSet ch = scalar_channel(2.0);
  const Allocation alloc({{0, 1, 0}});
  const CVec z = dmo::mmse_combiner(0, {CVec::Zero(1)}, alloc, ch, net);
  CHECK(z.norm() == 0.0);
}

TEST_CASE("link mse hand values") {
  const NetworkInstance net = scalar_net();
  const Allocation alloc({{0, 1, 0}});
  SUBCASE("zero beamformer, unit combiner") {
    const ChannelSet ch = scalar_channel(2.0);
    CHECK(dmo::link_mse(0, {CVec::Ones(1)}, {CVec::Zero(1)}, alloc, ch, net) ==
          doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("perfect alignment leaves only the noise term") {
    const ChannelSet ch = scalar_channel(1.0);
    CHECK(dmo::link_mse(0, {CVec::Ones(1)}, {CVec::Ones(1)}, alloc, ch, net) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("interference enters through the co-channel sum") {
    auto [net4, ch4] = d2dtest::random_instance(11, 4, 2, 1);
    const Allocation shared({{0, 1, 0}, {2, 3, 0}});
    const Allocation split({{0, 1, 0}, {2, 3, 1}});
    rng::Stream s(12, rng::kInitBeam, 0);
    const std::vector<CVec> g = {s.unit_sphere(2), s.unit_sphere(2)};
    const std::vector<CVec> z = {s.unit_sphere(2), s.unit_sphere(2)};
    // same signal state, interference only in the shared case
    CHECK(dmo::link_mse(0, z, g, shared, ch4, net4) >
          dmo::link_mse(0, z, g, split, ch4, net4));
  }
}

TEST_CASE("weight update hand values") {
  CHECK(dmo::update_weight(std::exp(-1.0)) ==
        doctest::Approx(std::exp(1.0)).epsilon(1e-12));
  CHECK(dmo::update_weight(0.5) == doctest::Approx(4.1627379620112155).epsilon(1e-12));
  SUBCASE("saturates instead of diverging at the boundaries") {
    const double top = dmo::update_weight(1.0);
    CHECK(std::isfinite(top));
    CHECK(top == dmo::update_weight(2.0));  // both clamp to 1 - floor
    const double bottom = dmo::update_weight(0.0);
    CHECK(std::isfinite(bottom));
    CHECK(bottom > 0.0);
  }
}

TEST_CASE("beamformer block scalar closed forms") {
  const Allocation alloc({{0, 1, 0}});
  const std::vector<CVec> z = {CVec::Ones(1)};
  const std::vector<double> w = {1.0};
  SUBCASE("roomy budget stays unconstrained") {
    const NetworkInstance net = scalar_net(1.0, 2.0);
    double mu = -1.0;
    const auto g = dmo::solve_beamformers(z, w, alloc, scalar_channel(1.0), net, &mu);
    REQUIRE(g.size() == 1);
    CHECK(std::abs(g[0][0] - 1.0) < 1e-9);
    CHECK(mu == 0.0);
  }
  SUBCASE("tight budget activates the multiplier") {
    const NetworkInstance net = scalar_net(1.0, 0.25);
    double mu = -1.0;
    const auto g = dmo::solve_beamformers(z, w, alloc, scalar_channel(1.0), net, &mu);
    CHECK(std::abs(g[0][0] - 0.5) < 1e-6);
    CHECK(mu == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(g[0].squaredNorm() <= 0.25 + 1e-12);
  }
}

TEST_CASE("beamformer block satisfies the KKT stationarity, finite differences") {
  TwoLinkFixture f = two_link_fixture(21, 3, 1, true, 5.0);
  rng::Stream s(22, rng::kInitBeam, 0);
  std::vector<CVec> g0 = {std::sqrt(2.5) * s.unit_sphere(3), std::sqrt(2.5) * s.unit_sphere(3)};
  std::vector<CVec> z(2);
  std::vector<double> w(2);
  for (int n = 0; n < 2; ++n) z[static_cast<std::size_t>(n)] = dmo::mmse_combiner(n, g0, f.alloc, f.ch, f.net);
  for (int n = 0; n < 2; ++n)
    w[static_cast<std::size_t>(n)] = dmo::update_weight(dmo::link_mse(n, z, g0, f.alloc, f.ch, f.net));

  double mu = 0.0;
  std::vector<CVec> g = dmo::solve_beamformers(z, w, f.alloc, f.ch, f.net, &mu);

  // Lagrangian gradient by central differences; exact for a quadratic, so the
  // residual is pure roundoff.
  const auto lagrangian = [&](const std::vector<CVec>& gv) {
    double p = 0.0;
    for (const CVec& v : gv) p += v.squaredNorm();
    return weighted_mse_objective(z, gv, w, f.alloc, f.ch, f.net) + mu * p;
  };
  double scale = 0.0;
  for (int n = 0; n < 2; ++n)
    scale += f.net.nodes[static_cast<std::size_t>(f.alloc[n].tx)].data_bits *
             w[static_cast<std::size_t>(n)];
  double worst = 0.0;
  for (std::size_t n = 0; n < 2; ++n) {
    for (int i = 0; i < 3; ++i) {
      for (int part = 0; part < 2; ++part) {
        const double h = 1e-4;
        const std::complex<double> delta =
            part == 0 ? std::complex<double>(h, 0.0) : std::complex<double>(0.0, h);
        std::vector<CVec> gp = g, gm = g;
        gp[n][i] += delta;
        gm[n][i] -= delta;
        worst = std::max(worst, std::abs(lagrangian(gp) - lagrangian(gm)) / (2.0 * h));
      }
    }
  }
  CHECK(worst <= 1e-6 * scale);
}

TEST_CASE("mmse combiner beats random unit combiners in per-link mse") {
  TwoLinkFixture f = two_link_fixture(31, 3, 1, true, 5.0);
  rng::Stream s(32, rng::kInitBeam, 1);
  std::vector<CVec> g = {std::sqrt(2.0) * s.unit_sphere(3), std::sqrt(3.0) * s.unit_sphere(3)};
  std::vector<CVec> z(2);
  for (int n = 0; n < 2; ++n) z[static_cast<std::size_t>(n)] = dmo::mmse_combiner(n, g, f.alloc, f.ch, f.net);
  for (int n = 0; n < 2; ++n) {
    const double e_mmse = dmo::link_mse(n, z, g, f.alloc, f.ch, f.net);
    rng::Stream rs(33, rng::kInitComb, static_cast<std::uint64_t>(n));
    for (int t = 0; t < 200; ++t) {
      std::vector<CVec> zr = z;
      zr[static_cast<std::size_t>(n)] = rs.unit_sphere(3);
      CHECK(e_mmse <= dmo::link_mse(n, zr, g, f.alloc, f.ch, f.net) + 1e-12);
    }
  }
}

TEST_CASE("sinr is invariant under combiner scaling") {
  TwoLinkFixture f = two_link_fixture(41, 2, 1, true, 5.0);
  rng::Stream s(42, rng::kInitBeam, 2);
  const std::vector<CVec> g = {s.unit_sphere(2), s.unit_sphere(2)};
  std::vector<CVec> z = {s.unit_sphere(2), s.unit_sphere(2)};
  const double before = dmo::link_sinr(0, z, g, f.alloc, f.ch, f.net);
  z[0] *= std::complex<double>(0.3, -1.7);
  const double after = dmo::link_sinr(0, z, g, f.alloc, f.ch, f.net);
  CHECK(after == doctest::Approx(before).epsilon(1e-12));
}

TEST_CASE("single link converges to capacity at full power") {
  NetworkInstance net;
  net.nodes = {{5e6, 1e6, 1.0, 3, 3}, {5e6, 1e6, 1.0, 3, 3}};
  net.power_budget = 4.0;
  net.bandwidth = 1e6;
  net.noise_power = 1.0;
  net.num_subchannels = 1;
  ChannelSet ch(2);
  rng::Stream s(51, rng::kChannelDraw, 0, 1);
  CMat h(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) h(i, j) = s.complex_gaussian();
  ch.at(0, 1) = h;
  ch.at(1, 0) = h.adjoint();
  const Allocation alloc({{0, 1, 0}});

  dmo::WmmseConfig cfg;
  cfg.tolerance = 1e-10;
  cfg.max_iterations = 5000;
  const BeamformingState init = d2dtest::random_bf(net, 52, net.power_budget);
  const dmo::WmmseResult r = dmo::wmmse_optimize(net, alloc, init, ch, cfg);
  REQUIRE(r.converged);

  const double smax = Eigen::JacobiSVD<CMat>(h).singularValues()[0];
  const double capacity = net.bandwidth * std::log2(1.0 + net.power_budget * smax * smax);
  const double rate = dm::link_rate(0, alloc, r.beams, ch, net);
  CHECK(rate == doctest::Approx(capacity).epsilon(1e-6));
  CHECK(r.beams.at({0, 1}).beamformer.squaredNorm() ==
        doctest::Approx(net.power_budget).epsilon(1e-6));
  CHECK(r.beams.at({0, 1}).combiner.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.low_rate_links.empty());
}

TEST_CASE("two separated links split power like the grid-search optimum") {
  TwoLinkFixture f = two_link_fixture(61, 2, 2, false, 6.0);
  dmo::WmmseConfig cfg;
  cfg.tolerance = 1e-10;
  cfg.max_iterations = 5000;
  const dmo::WmmseResult r = dmo::wmmse_optimize(f.net, f.alloc, BeamformingState{}, f.ch, cfg);
  REQUIRE(r.converged);

  const double i0 = f.net.nodes[0].data_bits;
  const double i2 = f.net.nodes[2].data_bits;
  const double t_wmmse = i0 / dm::link_rate(0, f.alloc, r.beams, f.ch, f.net) +
                         i2 / dm::link_rate(1, f.alloc, r.beams, f.ch, f.net);

  const double s0 = Eigen::JacobiSVD<CMat>(f.ch.at(0, 1)).singularValues()[0];
  const double s2 = Eigen::JacobiSVD<CMat>(f.ch.at(2, 3)).singularValues()[0];
  double t_grid = std::numeric_limits<double>::infinity();
  const int steps = 4000;
  for (int j = 1; j < steps; ++j) {
    const double p0 = f.net.power_budget * j / steps;
    const double p1 = f.net.power_budget - p0;
    const double t = i0 / (f.net.bandwidth * std::log2(1.0 + p0 * s0 * s0)) +
                     i2 / (f.net.bandwidth * std::log2(1.0 + p1 * s2 * s2));
    t_grid = std::min(t_grid, t);
  }
  CHECK(t_wmmse == doctest::Approx(t_grid).epsilon(1e-3));
}

TEST_CASE("surrogate is non-increasing round over round at high sinr") {
  for (std::uint64_t seed : {71, 72, 73, 74, 75}) {
    auto [net, ch] = d2dtest::random_instance(seed, 6, 6, 3, 10.0);
    const Allocation alloc({{0, 1, 0}, {2, 3, 1}, {4, 5, 2}});
    dmo::WmmseConfig cfg;
    cfg.tolerance = 1e-8;
    cfg.max_iterations = 300;
    const dmo::WmmseResult r = dmo::wmmse_optimize(net, alloc, BeamformingState{}, ch, cfg);
    REQUIRE(r.surrogate_history.size() > 1);
    for (std::size_t i = 1; i < r.surrogate_history.size(); ++i) {
      CHECK(r.surrogate_history[i] <=
            r.surrogate_history[i - 1] +
                1e-9 * std::max(1.0, std::abs(r.surrogate_history[i - 1])));
    }
  }
}

TEST_CASE("natural log and base-2 weights give the same beamformers") {
  TwoLinkFixture f = two_link_fixture(81, 3, 1, true, 5.0);
  rng::Stream s(82, rng::kInitBeam, 3);
  const std::vector<CVec> g_init = {std::sqrt(2.5) * s.unit_sphere(3),
                                    std::sqrt(2.5) * s.unit_sphere(3)};
  const double ln2sq = std::log(2.0) * std::log(2.0);

  std::vector<CVec> g_e = g_init, g_2 = g_init;
  for (int round = 0; round < 30; ++round) {
    std::vector<CVec> z_e(2), z_2(2);
    std::vector<double> w_e(2), w_2(2);
    for (int n = 0; n < 2; ++n) {
      z_e[static_cast<std::size_t>(n)] = dmo::mmse_combiner(n, g_e, f.alloc, f.ch, f.net);
      z_2[static_cast<std::size_t>(n)] = dmo::mmse_combiner(n, g_2, f.alloc, f.ch, f.net);
    }
    for (int n = 0; n < 2; ++n) {
      w_e[static_cast<std::size_t>(n)] =
          dmo::update_weight(dmo::link_mse(n, z_e, g_e, f.alloc, f.ch, f.net));
      // base-2 weight is the natural-log weight times ln(2)^2, uniformly
      w_2[static_cast<std::size_t>(n)] =
          ln2sq * dmo::update_weight(dmo::link_mse(n, z_2, g_2, f.alloc, f.ch, f.net));
    }
    g_e = dmo::solve_beamformers(z_e, w_e, f.alloc, f.ch, f.net);
    g_2 = dmo::solve_beamformers(z_2, w_2, f.alloc, f.ch, f.net);
  }
  for (std::size_t n = 0; n < 2; ++n)
    CHECK((g_e[n] - g_2[n]).norm() <= 1e-6 * (1.0 + g_e[n].norm()));
}

TEST_CASE("returned power is feasible with complementary slackness") {
  for (std::uint64_t seed : {91, 92, 93}) {
    TwoLinkFixture f = two_link_fixture(seed, 2, 1, true, 3.0);
    rng::Stream s(seed + 100, rng::kInitBeam, 4);
    std::vector<CVec> g = {std::sqrt(1.5) * s.unit_sphere(2), std::sqrt(1.5) * s.unit_sphere(2)};
    std::vector<CVec> z(2);
    std::vector<double> w(2);
    for (int n = 0; n < 2; ++n) z[static_cast<std::size_t>(n)] = dmo::mmse_combiner(n, g, f.alloc, f.ch, f.net);
    for (int n = 0; n < 2; ++n)
      w[static_cast<std::size_t>(n)] =
          dmo::update_weight(dmo::link_mse(n, z, g, f.alloc, f.ch, f.net));
    double mu = 0.0;
    const auto gs = dmo::solve_beamformers(z, w, f.alloc, f.ch, f.net, &mu);
    double p = 0.0;
    for (const CVec& v : gs) p += v.squaredNorm();
    CHECK(p <= f.net.power_budget + 1e-9);
    CHECK(mu >= 0.0);
    // slackness residual scaled by the product's own factors
    CHECK(std::abs(mu * (p - f.net.power_budget)) <=
          1e-6 * (1.0 + mu * f.net.power_budget));
  }
}

TEST_CASE("wmmse full runs keep the power budget") {
  for (std::uint64_t seed : {95, 96}) {
    TwoLinkFixture f = two_link_fixture(seed, 3, 1, true, 4.0);
    const dmo::WmmseResult r = dmo::wmmse_optimize(f.net, f.alloc, BeamformingState{}, f.ch, {});
    const double p = r.beams.total_link_power(f.alloc);
    CHECK(p <= f.net.power_budget + 1e-9);
  }
}

TEST_CASE("empty allocation returns the initial state untouched") {
  const NetworkInstance net = scalar_net();
  const ChannelSet ch = scalar_channel(2.0);
  BeamformingState init;
  init.set({0, 1}, {CVec::Constant(1, 0.7), CVec::Ones(1)});
  const dmo::WmmseResult r = dmo::wmmse_optimize(net, Allocation{}, init, ch, {});
  CHECK(r.converged);
  CHECK(r.iterations == 0);
  CHECK(r.surrogate_history.empty());
  CHECK(r.beams.at({0, 1}).beamformer[0] == std::complex<double>(0.7, 0.0));
}

TEST_CASE("hitting the iteration cap reports non-convergence with usable beams") {
  TwoLinkFixture f = two_link_fixture(97, 2, 1, true, 4.0);
  dmo::WmmseConfig cfg;
  cfg.tolerance = 0.0;  // unattainable
  cfg.max_iterations = 3;
  const dmo::WmmseResult r = dmo::wmmse_optimize(f.net, f.alloc, BeamformingState{}, f.ch, cfg);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 3);
  CHECK(r.surrogate_history.size() == 3);
  CHECK(r.beams.contains({0, 1}));
  CHECK(r.beams.contains({2, 3}));
  // best-surrogate round is what gets exported
  CHECK(r.surrogate ==
        *std::min_element(r.surrogate_history.begin(), r.surrogate_history.end()));
}

TEST_CASE("internal sinr agrees with the exported unit-norm rate") {
  TwoLinkFixture f = two_link_fixture(98, 3, 1, true, 4.0);
  const dmo::WmmseResult r = dmo::wmmse_optimize(f.net, f.alloc, BeamformingState{}, f.ch, {});
  for (int n = 0; n < f.alloc.size(); ++n) {
    const double sinr =
        dmo::link_sinr(n, r.state.combiners, r.state.beamformers, f.alloc, f.ch, f.net);
    const double rate = dm::link_rate(n, f.alloc, r.beams, f.ch, f.net);
    CHECK(rate == doctest::Approx(f.net.bandwidth * std::log2(1.0 + sinr)).epsilon(1e-9));
  }
}
