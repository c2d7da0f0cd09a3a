#include "qpnls/solver.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "qpnls/errors.hpp"
#include "qpnls/io.hpp"

namespace qpnls {

TimeGrid::TimeGrid(double t_end_, int steps_) : t_end(t_end_), steps(steps_) {
  if (!(t_end > 0.0)) throw argument_error("TimeGrid: t_end must be positive");
  if (steps < 2 || steps % 2 != 0)
    throw argument_error("TimeGrid: steps must be a positive even integer");
}

InitialData ProblemSpec::initial_data() const {
  return decay_model == DecayModel::polynomial
             ? make_poly_data(amplitude, decay_rate, box(), p, phase_scheme, seed)
             : make_exp_data(amplitude, decay_rate, box(), p, phase_scheme, seed);
}

namespace {

Complex phase_factor(double w2, double t) { return std::polar(1.0, -w2 * t); }

std::vector<double> squared_frequencies(const LatticeBox& box,
                                        const FrequencyVector& omega) {
  if (box.dim() != omega.dim())
    throw argument_error("solver: box and frequency dimensions differ");
  std::vector<double> w2(box.count());
  std::size_t flat = 0;
  box.for_each([&](std::span<const int> n) {
    const double w = inner_product(n, omega);
    w2[flat++] = w * w;
  });
  return w2;
}

bool all_finite(const CoefficientField& c) {
  for (const Complex& v : c.values())
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

}  // namespace

Trajectory linear_flow(const CoefficientField& c0, const FrequencyVector& omega,
                       const TimeGrid& grid) {
  const std::vector<double> w2 = squared_frequencies(c0.box(), omega);
  Trajectory traj;
  traj.grid = grid;
  traj.provenance = Provenance::linear;
  traj.fields.reserve(static_cast<std::size_t>(grid.node_count()));
  for (int i = 0; i <= grid.steps; ++i) {
    const double t = grid.node(i);
    CoefficientField f(c0.box());
    for (std::size_t k = 0; k < c0.size(); ++k)
      f[k] = phase_factor(w2[k], t) * c0[k];
    traj.fields.push_back(std::move(f));
  }
  return traj;
}

CoefficientField galerkin_rhs(const CoefficientField& c,
                              const FrequencyVector& omega, int p, double lambda) {
  const std::vector<double> w2 = squared_frequencies(c.box(), omega);
  CoefficientField conv = alt_convolution(c, p);
  CoefficientField rhs(c.box());
  const Complex i_unit(0.0, 1.0);
  for (std::size_t k = 0; k < c.size(); ++k)
    rhs[k] = -i_unit * w2[k] * c[k] + i_unit * lambda * conv[k];
  return rhs;
}

namespace {

// One classical RK4 step of cdot = -i w^2 c + i lambda conv(c).
CoefficientField rk4_step(const CoefficientField& y, const FrequencyVector& omega,
                          int p, double lambda, double h) {
  auto f = [&](const CoefficientField& state) {
    return galerkin_rhs(state, omega, p, lambda);
  };
  auto axpy = [](const CoefficientField& base, double a, const CoefficientField& d) {
    CoefficientField r = base;
    for (std::size_t k = 0; k < r.size(); ++k) r[k] += a * d[k];
    return r;
  };
  CoefficientField k1 = f(y);
  CoefficientField k2 = f(axpy(y, h / 2, k1));
  CoefficientField k3 = f(axpy(y, h / 2, k2));
  CoefficientField k4 = f(axpy(y, h, k3));
  CoefficientField out = y;
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] += h / 6 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
  return out;
}

}  // namespace

Trajectory rk4_solve(const CoefficientField& c0, const FrequencyVector& omega,
                     int p, double lambda, const TimeGrid& grid) {
  Trajectory traj;
  traj.grid = grid;
  traj.provenance = Provenance::rk4;
  traj.fields.reserve(static_cast<std::size_t>(grid.node_count()));
  traj.fields.push_back(c0);
  const double h = grid.dt();
  for (int i = 1; i <= grid.steps; ++i) {
    traj.fields.push_back(rk4_step(traj.fields.back(), omega, p, lambda, h));
    if (!all_finite(traj.fields.back()))
      throw divergence_error("rk4_solve: non-finite value at step " + fmt_int(i) +
                             " (t=" + fmt_double(grid.node(i)) + ")");
  }
  return traj;
}

Rk4Final rk4_final(const CoefficientField& c0, const FrequencyVector& omega,
                   int p, double lambda, const TimeGrid& grid) {
  CoefficientField y = c0;
  const double m0 = mass(c0);
  double drift = 0.0;
  const double h = grid.dt();
  for (int i = 1; i <= grid.steps; ++i) {
    y = rk4_step(y, omega, p, lambda, h);
    if (!all_finite(y))
      throw divergence_error("rk4_final: non-finite value at step " + fmt_int(i) +
                             " (t=" + fmt_double(grid.node(i)) + ")");
    if (m0 > 0.0) drift = std::max(drift, std::abs(mass(y) - m0) / m0);
  }
  return {std::move(y), drift};
}

Complex plane_wave_exact(Complex a, const MultiIndex& n0,
                         const FrequencyVector& omega, int p, double lambda,
                         double t) {
  const double w = inner_product(n0, omega);
  const double amp2p = std::pow(std::abs(a), 2.0 * p);
  return a * std::polar(1.0, (lambda * amp2p - w * w) * t);
}

Trajectory picard_step(const Trajectory& prev, const CoefficientField& c0,
                       const FrequencyVector& omega, int p, double lambda,
                       const TimeGrid& grid) {
  if (!(prev.grid == grid))
    throw argument_error("picard_step: prev trajectory grid mismatch");
  if (prev.fields.size() != static_cast<std::size_t>(grid.node_count()))
    throw argument_error("picard_step: prev node count mismatch");
  if (!(prev.fields[0].box() == c0.box()))
    throw argument_error("picard_step: prev box does not match initial data");

  const std::vector<double> w2 = squared_frequencies(c0.box(), omega);
  const std::size_t m = c0.size();
  const double h = grid.dt();
  const Complex i_lambda(0.0, lambda);

  // G_j(n) = e^{+i <n>^2 s_j} * conv(prev at s_j)(n); the outer propagator
  // e^{-i<n>^2 t} is applied once per node below.
  std::vector<std::vector<Complex>> G;
  G.reserve(prev.fields.size());
  for (int j = 0; j <= grid.steps; ++j) {
    CoefficientField conv = alt_convolution(prev.at(j), p);
    std::vector<Complex> row(m);
    const double s = grid.node(j);
    for (std::size_t k = 0; k < m; ++k)
      row[k] = std::polar(1.0, w2[k] * s) * conv[k];
    G.push_back(std::move(row));
  }

  // Prefix integrals: even nodes extend composite Simpson, odd nodes add a
  // trapezoid correction on the last interval.
  std::vector<std::vector<Complex>> I(G.size(), std::vector<Complex>(m, Complex(0, 0)));
  for (int i = 1; i <= grid.steps; ++i) {
    if (i % 2 == 0) {
      for (std::size_t k = 0; k < m; ++k)
        I[static_cast<std::size_t>(i)][k] =
            I[static_cast<std::size_t>(i - 2)][k] +
            h / 3.0 * (G[static_cast<std::size_t>(i - 2)][k] +
                       4.0 * G[static_cast<std::size_t>(i - 1)][k] +
                       G[static_cast<std::size_t>(i)][k]);
    } else {
      for (std::size_t k = 0; k < m; ++k)
        I[static_cast<std::size_t>(i)][k] =
            I[static_cast<std::size_t>(i - 1)][k] +
            h / 2.0 * (G[static_cast<std::size_t>(i - 1)][k] +
                       G[static_cast<std::size_t>(i)][k]);
    }
  }

  Trajectory out;
  out.grid = grid;
  out.provenance = Provenance::picard;
  out.fields.reserve(G.size());
  for (int i = 0; i <= grid.steps; ++i) {
    const double t = grid.node(i);
    CoefficientField f(c0.box());
    for (std::size_t k = 0; k < m; ++k)
      f[k] = phase_factor(w2[k], t) *
             (c0[k] + i_lambda * I[static_cast<std::size_t>(i)][k]);
    out.fields.push_back(std::move(f));
  }
  return out;
}

double sup_difference(const Trajectory& a, const Trajectory& b) {
  if (!(a.grid == b.grid) || a.fields.size() != b.fields.size())
    throw argument_error("sup_difference: trajectories on different grids");
  double best = 0.0;
  for (std::size_t i = 0; i < a.fields.size(); ++i) {
    const CoefficientField& fa = a.fields[i];
    const CoefficientField& fb = b.fields[i];
    if (!(fa.box() == fb.box()))
      throw argument_error("sup_difference: trajectories on different boxes");
    for (std::size_t k = 0; k < fa.size(); ++k)
      best = std::max(best, std::abs(fa[k] - fb[k]));
  }
  return best;
}

double max_abs(const CoefficientField& c) {
  double best = 0.0;
  for (const Complex& v : c.values()) best = std::max(best, std::abs(v));
  return best;
}

PicardResult picard_solve(const CoefficientField& c0, const FrequencyVector& omega,
                          int p, double lambda, const TimeGrid& grid,
                          const PicardOptions& opts) {
  if (opts.max_iterations < 1)
    throw argument_error("picard_solve: max_iterations must be >= 1");

  Trajectory prev;
  prev.grid = grid;
  prev.provenance = Provenance::picard;
  prev.fields.assign(static_cast<std::size_t>(grid.node_count()),
                     CoefficientField(c0.box()));

  PicardResult result;
  int rising_streak = 0;
  for (int k = 1; k <= opts.max_iterations; ++k) {
    Trajectory cur = picard_step(prev, c0, omega, p, lambda, grid);
    const double delta = sup_difference(cur, prev);
    result.deltas.push_back(delta);
    result.iterations = k;
    prev = std::move(cur);
    if (k > 2 && delta > result.deltas[static_cast<std::size_t>(k - 2)]) {
      ++rising_streak;
      if (rising_streak >= 3 && opts.t0 && grid.t_end > *opts.t0)
        result.divergence_reported = true;
    } else {
      rising_streak = 0;
    }
    if (delta < opts.stop_tol) {
      result.converged = true;
      break;
    }
  }
  prev.picard_depth = result.iterations;
  result.trajectory = std::move(prev);
  return result;
}

double mass(const CoefficientField& c) {
  double s = 0.0;
  for (const Complex& v : c.values()) s += std::norm(v);
  return s;
}

void write_trajectory(const std::string& dir, const Trajectory& traj, int p) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::ofstream manifest(fs::path(dir) / "manifest.ndjson", std::ios::binary);
  for (std::size_t i = 0; i < traj.fields.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "node_%04zu.csv", i);
    std::ofstream node(fs::path(dir) / name, std::ios::binary);
    write_field_csv(node, traj.fields[i]);
    const ConvolutionResult conv = alt_convolution_with_report(traj.fields[i], p);
    manifest << "{\"node_index\":" << fmt_int(static_cast<std::int64_t>(i))
             << ",\"t\":" << fmt_double(traj.grid.node(static_cast<int>(i)))
             << ",\"mass\":" << fmt_double(mass(traj.fields[i]))
             << ",\"linf_coeff\":" << fmt_double(max_abs(traj.fields[i]))
             << ",\"discarded_mass\":" << fmt_double(conv.discarded_l1) << "}\n";
  }
}

}  // namespace qpnls
