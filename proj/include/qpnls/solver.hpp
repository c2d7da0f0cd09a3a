#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qpnls/lattice.hpp"
#include "qpnls/spectral.hpp"

namespace qpnls {

// Uniform grid on [0, t_end]; the step count is even because the Duhamel
// quadrature extends composite Simpson prefixes two nodes at a time.
struct TimeGrid {
  double t_end = 0;
  int steps = 0;

  TimeGrid() = default;
  TimeGrid(double t_end_, int steps_);

  double dt() const { return t_end / steps; }
  double node(int i) const { return t_end * i / steps; }
  int node_count() const { return steps + 1; }

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

enum class Provenance { linear, rk4, picard };

// One coefficient field per grid node; fields[0] is the initial data.
struct Trajectory {
  TimeGrid grid;
  std::vector<CoefficientField> fields;
  Provenance provenance = Provenance::linear;
  int picard_depth = 0;

  const CoefficientField& at(int node) const { return fields[static_cast<std::size_t>(node)]; }
};

struct Tolerances {
  double picard_stop = 1e-12;
  double cross_solver = 1e-4;
  double mass_drift = 1e-8;
  double min_divisor_warn = 1e-6;
};

// Complete description of a run; P = 2p+1 is always derived.
struct ProblemSpec {
  int nu = 2;
  int p = 1;
  std::vector<double> omega_entries;
  int lambda_sign = +1;
  double amplitude = 1.0;
  DecayModel decay_model = DecayModel::polynomial;
  double decay_rate = 12.0;
  int box_radius = 4;
  TimeGrid grid;
  int picard_depth = 8;
  PhaseScheme phase_scheme = PhaseScheme::seeded_random;
  std::uint64_t seed = 0;
  Tolerances tol;

  int big_p() const { return 2 * p + 1; }
  FrequencyVector omega() const { return FrequencyVector(omega_entries); }
  LatticeBox box() const { return LatticeBox(nu, box_radius); }
  InitialData initial_data() const;
};

// c(t_i, n) = e^{-i <n>^2 t_i} c0(n); moduli preserved exactly.
Trajectory linear_flow(const CoefficientField& c0, const FrequencyVector& omega,
                       const TimeGrid& grid);

// cdot(n) = -i <n>^2 c(n) + i lambda * alt_convolution(c, p)(n).
// lambda is +-1 for the full equation or a small epsilon for the weakly
// nonlinear runs.
CoefficientField galerkin_rhs(const CoefficientField& c,
                              const FrequencyVector& omega, int p, double lambda);

// Classical RK4 on galerkin_rhs over the grid; throws divergence_error
// naming the step if a non-finite value appears.
Trajectory rk4_solve(const CoefficientField& c0, const FrequencyVector& omega,
                     int p, double lambda, const TimeGrid& grid);

// Same stepper without storing the path; returns the final field and the
// largest relative drift of sum |c|^2 seen along the way.
struct Rk4Final {
  CoefficientField field;
  double max_rel_mass_drift;
};
Rk4Final rk4_final(const CoefficientField& c0, const FrequencyVector& omega,
                   int p, double lambda, const TimeGrid& grid);

// Exact single-mode solution c(t) = a exp(-i <n0>^2 t + i lambda |a|^2p t).
Complex plane_wave_exact(Complex a, const MultiIndex& n0,
                         const FrequencyVector& omega, int p, double lambda,
                         double t);

// One Duhamel sweep: node i receives
//   e^{-i<n>^2 t_i} c0 + i lambda int_0^{t_i} e^{-i<n>^2(t_i-s)} F(s) ds
// with F(s_j) = alt_convolution(prev at s_j) and the integral taken by
// composite Simpson on even prefixes plus a trapezoid correction on odd
// ones. A zero prev reproduces linear_flow bit for bit.
Trajectory picard_step(const Trajectory& prev, const CoefficientField& c0,
                       const FrequencyVector& omega, int p, double lambda,
                       const TimeGrid& grid);

struct PicardOptions {
  int max_iterations = 8;
  double stop_tol = 1e-12;
  std::optional<double> t0;  // enables the divergence heuristic when known
};

struct PicardResult {
  Trajectory trajectory;
  std::vector<double> deltas;  // deltas[k-1] = sup |c_k - c_{k-1}|
  bool converged = false;
  bool divergence_reported = false;
  int iterations = 0;
};

// Iterates picard_step from the zero trajectory (so iterate 1 is the linear
// solution) until deltas fall below stop_tol or max_iterations is reached.
PicardResult picard_solve(const CoefficientField& c0, const FrequencyVector& omega,
                          int p, double lambda, const TimeGrid& grid,
                          const PicardOptions& opts);

// sum |c(n)|^2; conserved exactly by the closed-box system.
double mass(const CoefficientField& c);

double sup_difference(const Trajectory& a, const Trajectory& b);
double max_abs(const CoefficientField& c);

// One CSV per node plus an NDJSON manifest
// {node_index, t, mass, linf_coeff, discarded_mass}.
void write_trajectory(const std::string& dir, const Trajectory& traj, int p);

}  // namespace qpnls
