#include "d2dopt/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace d2dopt::rng {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b,
                          std::uint64_t c) {
  std::uint64_t h = root;
  (void)splitmix64(h);
  h ^= a;
  (void)splitmix64(h);
  h ^= b;
  (void)splitmix64(h);
  h ^= c;
  return splitmix64(h);
}

Stream::Stream(std::uint64_t seed) : eng_(seed) {}

Stream::Stream(std::uint64_t root, std::uint64_t a, std::uint64_t b, std::uint64_t c)
    : eng_(derive_seed(root, a, b, c)) {}

std::uint64_t Stream::next_u64() { return eng_(); }

double Stream::uniform() {
  // 53 random mantissa bits -> [0, 1)
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Stream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

int Stream::uniform_int(int lo, int hi) {
  if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
  const auto span = static_cast<double>(hi) - static_cast<double>(lo) + 1.0;
  int v = lo + static_cast<int>(uniform() * span);
  return v > hi ? hi : v;
}

double Stream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller; u1 shifted away from zero so log stays finite.
  double u1 = uniform();
  double u2 = uniform();
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

std::complex<double> Stream::complex_gaussian() {
  const double re = normal();
  const double im = normal();
  return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

Eigen::VectorXcd Stream::unit_sphere(int dim) {
  if (dim <= 0) throw std::invalid_argument("unit_sphere: dim must be positive");
  Eigen::VectorXcd v(dim);
  for (int i = 0; i < dim; ++i) v(i) = {normal(), normal()};
  const double n = v.norm();
  if (n == 0.0) {
    v.setZero();
    v(0) = 1.0;
    return v;
  }
  return v / n;
}

}  // namespace d2dopt::rng
