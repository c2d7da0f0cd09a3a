#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qpnls/bounds.hpp"
#include "qpnls/solver.hpp"
#include "qpnls/spectral.hpp"

namespace qpnls {

// lhs = max over nodes and indices of |c(t,n)| (1+|n|)^rate, rhs = bound.
BoundReport verify_decay(const Trajectory& traj, double rate, double bound);

// Ratio test against the factorial envelope rate^k / k!:
//   deltas[k+1] / deltas[k] <= envelope_rate / (k+1) * 1.5  for k >= 2
// (1-based iterate index). Also fits deltas ~ C rho^k / k! in log space.
struct CauchyReport {
  BoundReport report;
  bool sufficient = false;    // at least 4 nonzero deltas
  bool strictly_decreasing_from_2 = false;
  double fitted_log_c = 0.0;  // log C
  double fitted_rho = 0.0;
  std::vector<double> ratios;  // ratios[i] = deltas[i+1]/deltas[i]
};
CauchyReport cauchy_report(const std::vector<double>& deltas, double envelope_rate);

// Evolves the same initial data through Picard and RK4 and reports the sup
// difference; a positive perturbation_scale additionally shifts the RK4
// data by a seeded in-class perturbation, probing continuous dependence.
struct UniquenessReport {
  double sup_diff = 0.0;
  double perturbation_scale = 0.0;
  bool picard_converged = false;
};
UniquenessReport uniqueness_probe(const ProblemSpec& spec,
                                  const CoefficientField& c0,
                                  double perturbation_scale);

// Weakly nonlinear runs: for each epsilon evolve with nonlinearity
// coefficient epsilon to t = epsilon^(-1+eta) and compare against the free
// flow in the coefficient-ell^1 (sup-norm proxy) and H^s metrics.
struct AsymptoticsReport {
  std::vector<double> epsilons;
  double eta = 0.0;
  int s = 0;
  std::vector<double> t_values;
  std::vector<double> linf_diffs;  // coefficient-ell^1 bound
  std::vector<double> hs_diffs;
  double slope_linf = 0.0;  // log-log least squares
  double slope_hs = 0.0;
};

struct AsymptoticsOptions {
  double dt_max = 0.01;
  std::int64_t max_steps = 4'000'000;
};

AsymptoticsReport asymptotics_experiment(const CoefficientField& c0,
                                         const FrequencyVector& omega, int p,
                                         const std::vector<double>& epsilons,
                                         double eta, int s,
                                         const AsymptoticsOptions& opts);

// For m = 0..m_max: sum_n |<n>|^m |c(n)| against the Gevrey envelope.
// Refuses non-exponential initial data.
std::vector<BoundReport> gevrey_check(const InitialData& data,
                                      const FrequencyVector& omega, double rho,
                                      double A, int m_max);

}  // namespace qpnls
