#pragma once

#include <vector>

#include "d2dopt/types.hpp"

namespace d2dopt::mimo {

// Signal design for a fixed allocation: minimize the communication-demand
// upper bound sum(I_n / R_n) over beamformers (power folded in) and
// combiners, through the weighted-MSE reformulation. Blocks: MMSE combiner,
// weight update w = 1/(e ln^2 e), per-link quadratic program for the
// beamformers under the sum power budget.

struct WmmseConfig {
  double tolerance = 1e-4;          // stop once |sum log2 w - previous| drops below
  int max_iterations = 100;
  double bisection_tolerance = 1e-9;  // relative slack on the power constraint
  double mse_floor = 1e-12;           // clamps e into [floor, 1 - floor]
  double rate_floor = 1.0;            // bit/s; slower links get reported back
};

// Per-link iterate, vectors indexed in allocation order.
struct WmmseState {
  std::vector<CVec> beamformers;  // g, power folded in
  std::vector<CVec> combiners;    // z, unnormalized MMSE receivers
  std::vector<double> weights;
  std::vector<double> mse;
  double surrogate_value = 0.0;
  int iteration = 0;
};

struct WmmseResult {
  BeamformingState beams;  // exported per-pair state, combiners unit norm
  WmmseState state;        // internal iterate the export was taken from
  bool converged = false;
  int iterations = 0;
  double surrogate = 0.0;
  std::vector<double> surrogate_history;  // one value per completed round
  std::vector<LinkPair> low_rate_links;   // rate below cfg.rate_floor at exit
};

// MMSE receiver for link n: z = J^-1 H g with J the co-channel covariance
// plus noise. Unnormalized; the true MSE minimizer.
CVec mmse_combiner(int n, const std::vector<CVec>& g, const Allocation& alloc,
                   const ChannelSet& ch, const NetworkInstance& net);

// Mean square error of link n under arbitrary combiners and beamformers,
// general-norm noise term sigma^2 ||z||^2.
double link_mse(int n, const std::vector<CVec>& z, const std::vector<CVec>& g,
                const Allocation& alloc, const ChannelSet& ch,
                const NetworkInstance& net);

// SINR of link n with noise referred through the combiner. Invariant under
// nonzero complex scaling of z.
double link_sinr(int n, const std::vector<CVec>& z, const std::vector<CVec>& g,
                 const Allocation& alloc, const ChannelSet& ch,
                 const NetworkInstance& net);

// w = 1/(e ln^2 e) with e clamped into [mse_floor, 1 - mse_floor].
double update_weight(double mse, double mse_floor = 1e-12);

// Beamformer block: minimize sum_n I_n w_n e_n over all g jointly under
// sum ||g||^2 <= P. Each g_n solves (A_n + mu I) g_n = b_n; mu = 0 when the
// unconstrained solution fits the budget, otherwise bisected so the sum
// meets P from below. Writes the multiplier to *mu_out when non-null.
std::vector<CVec> solve_beamformers(const std::vector<CVec>& z,
                                    const std::vector<double>& w, const Allocation& alloc,
                                    const ChannelSet& ch, const NetworkInstance& net,
                                    double* mu_out = nullptr,
                                    double bisection_tolerance = 1e-9);

// Full alternation: combiners, weights, beamformers per round, stopping on
// the weight-change criterion. Missing init entries fall back to matched
// filters at P / max_links. An empty allocation returns init untouched.
// Non-convergence returns the best-surrogate round with converged = false.
WmmseResult wmmse_optimize(const NetworkInstance& net, const Allocation& alloc,
                           const BeamformingState& init, const ChannelSet& ch,
                           const WmmseConfig& cfg = {});

}  // namespace d2dopt::mimo
