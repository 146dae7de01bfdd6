#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "d2dopt/harness.hpp"

namespace d2dopt::harness {

namespace {

void put(std::ostream& out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

void expect(std::istream& in, const char* token) {
  std::string got;
  if (!(in >> got) || got != token)
    throw std::runtime_error("instance parse: expected '" + std::string(token) +
                             "', got '" + got + "'");
}

double read_double(std::istream& in, const char* what) {
  double v;
  if (!(in >> v)) throw std::runtime_error(std::string("instance parse: bad ") + what);
  return v;
}

int read_int(std::istream& in, const char* what) {
  int v;
  if (!(in >> v)) throw std::runtime_error(std::string("instance parse: bad ") + what);
  return v;
}

}  // namespace

void dump_instance(std::ostream& out, const NetworkInstance& net, const ChannelSet& ch) {
  out << "d2dopt-instance v1\n";
  out << "radio ";
  put(out, net.power_budget);
  out << ' ';
  put(out, net.bandwidth);
  out << ' ';
  put(out, net.noise_power);
  out << ' ' << net.num_subchannels << '\n';
  out << "nodes " << net.size() << '\n';
  for (const NodeProfile& n : net.nodes) {
    put(out, n.data_bits);
    out << ' ';
    put(out, n.compute_speed);
    out << ' ';
    put(out, n.compute_power);
    out << ' ' << n.tx_antennas << ' ' << n.rx_antennas << '\n';
  }
  for (int tx = 0; tx < net.size(); ++tx) {
    for (int rx = 0; rx < net.size(); ++rx) {
      if (tx == rx) continue;
      const CMat& h = ch.at(tx, rx);
      out << "channel " << tx << ' ' << rx << ' ' << h.rows() << ' ' << h.cols() << '\n';
      for (Eigen::Index i = 0; i < h.rows(); ++i) {
        for (Eigen::Index j = 0; j < h.cols(); ++j) {
          if (i != 0 || j != 0) out << ' ';
          put(out, h(i, j).real());
          out << ' ';
          put(out, h(i, j).imag());
        }
      }
      out << '\n';
    }
  }
  out << "end\n";
}

std::pair<NetworkInstance, ChannelSet> load_instance(std::istream& in) {
  expect(in, "d2dopt-instance");
  expect(in, "v1");

  NetworkInstance net;
  expect(in, "radio");
  net.power_budget = read_double(in, "power budget");
  net.bandwidth = read_double(in, "bandwidth");
  net.noise_power = read_double(in, "noise power");
  net.num_subchannels = read_int(in, "subchannel count");

  expect(in, "nodes");
  const int k = read_int(in, "node count");
  if (k < 1) throw std::runtime_error("instance parse: node count must be positive");
  for (int i = 0; i < k; ++i) {
    NodeProfile n;
    n.data_bits = read_double(in, "data bits");
    n.compute_speed = read_double(in, "compute speed");
    n.compute_power = read_double(in, "compute power");
    n.tx_antennas = read_int(in, "tx antennas");
    n.rx_antennas = read_int(in, "rx antennas");
    net.nodes.push_back(n);
  }
  net.validate();

  ChannelSet ch(k);
  for (int tx = 0; tx < k; ++tx) {
    for (int rx = 0; rx < k; ++rx) {
      if (tx == rx) continue;
      expect(in, "channel");
      if (read_int(in, "tx index") != tx || read_int(in, "rx index") != rx)
        throw std::runtime_error("instance parse: channels out of order");
      const int rows = read_int(in, "row count");
      const int cols = read_int(in, "column count");
      if (rows < 1 || cols < 1)
        throw std::runtime_error("instance parse: bad channel shape");
      CMat h(rows, cols);
      for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
          const double re = read_double(in, "channel entry");
          const double im = read_double(in, "channel entry");
          h(i, j) = {re, im};
        }
      }
      ch.at(tx, rx) = std::move(h);
    }
  }
  expect(in, "end");
  ch.validate(net);
  return {std::move(net), std::move(ch)};
}

}  // namespace d2dopt::harness
