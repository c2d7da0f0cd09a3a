#include "qpnls/analysis.hpp"

#include <cmath>
#include <numbers>

#include "qpnls/errors.hpp"
#include "qpnls/io.hpp"
#include "qpnls/rng.hpp"

namespace qpnls {

BoundReport verify_decay(const Trajectory& traj, double rate, double bound) {
  double lhs = 0.0;
  for (const CoefficientField& f : traj.fields) {
    std::size_t flat = 0;
    f.box().for_each([&](std::span<const int> n) {
      const double weight =
          std::pow(1.0 + static_cast<double>(l1_norm(n)), rate);
      lhs = std::max(lhs, std::abs(f[flat]) * weight);
      ++flat;
    });
  }
  return BoundReport::make("decay_preservation", lhs, bound);
}

CauchyReport cauchy_report(const std::vector<double>& deltas, double envelope_rate) {
  CauchyReport rep;
  std::size_t nonzero = 0;
  for (double d : deltas)
    if (d > 0.0) ++nonzero;
  rep.sufficient = nonzero >= 4;
  if (!rep.sufficient) {
    rep.report = BoundReport::make("cauchy_envelope(insufficient data)", 0.0, 0.0);
    rep.report.holds = false;
    return rep;
  }

  for (std::size_t i = 0; i + 1 < deltas.size(); ++i) {
    if (deltas[i] <= 0.0 || deltas[i + 1] <= 0.0) break;
    rep.ratios.push_back(deltas[i + 1] / deltas[i]);
  }

  // deltas[i] holds sup|c_{i+1} - c_i|; the ratio at 1-based iterate k
  // compares deltas indexed k and k-1, i.e. ratios[k-1].
  double worst = 0.0;
  rep.strictly_decreasing_from_2 = true;
  for (std::size_t i = 1; i < rep.ratios.size(); ++i) {
    const int k = static_cast<int>(i) + 1;  // iterate index >= 2
    worst = std::max(worst, rep.ratios[i] * (k + 1));
    if (rep.ratios[i] >= 1.0) rep.strictly_decreasing_from_2 = false;
  }
  rep.report = BoundReport::make("cauchy_envelope", worst, envelope_rate * 1.5);

  // Fit deltas[k] ~ C rho^k / k! : log d_k + log k! = log C + k log rho.
  double sx = 0, sy = 0, sxx = 0, sxy = 0, cnt = 0;
  double log_fact = 0.0;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const double k = static_cast<double>(i + 1);
    log_fact += std::log(k);
    if (deltas[i] <= 0.0) continue;
    const double x = k;
    const double y = std::log(deltas[i]) + log_fact;
    sx += x; sy += y; sxx += x * x; sxy += x * y; cnt += 1;
  }
  const double denom = cnt * sxx - sx * sx;
  if (denom != 0.0) {
    const double slope = (cnt * sxy - sx * sy) / denom;
    rep.fitted_rho = std::exp(slope);
    rep.fitted_log_c = (sy - slope * sx) / cnt;
  }
  return rep;
}

namespace {

// Seeded perturbation inside the polynomial decay class: random phases,
// moduli scale * (1+|n|)^(-rate).
CoefficientField class_perturbation(const LatticeBox& box, double scale,
                                    double rate, std::uint64_t seed) {
  CoefficientField d(box);
  CounterRng rng(seed, "uniqueness-perturbation");
  std::size_t flat = 0;
  box.for_each([&](std::span<const int> n) {
    const double mod = scale * std::pow(1.0 + static_cast<double>(l1_norm(n)), -rate);
    d[flat] = std::polar(mod, 2.0 * std::numbers::pi * rng.uniform_at(flat));
    ++flat;
  });
  return d;
}

}  // namespace

UniquenessReport uniqueness_probe(const ProblemSpec& spec,
                                  const CoefficientField& c0,
                                  double perturbation_scale) {
  if (perturbation_scale < 0.0)
    throw argument_error("uniqueness_probe: perturbation_scale must be >= 0");
  const FrequencyVector omega = spec.omega();
  PicardOptions popts;
  popts.max_iterations = spec.picard_depth;
  popts.stop_tol = spec.tol.picard_stop;
  PicardResult pic = picard_solve(c0, omega, spec.p, spec.lambda_sign, spec.grid, popts);

  CoefficientField rk4_data = c0;
  if (perturbation_scale > 0.0) {
    const double rate = spec.decay_model == DecayModel::polynomial
                            ? spec.decay_rate / 2.0
                            : spec.decay_rate;
    CoefficientField d =
        class_perturbation(c0.box(), perturbation_scale, rate, spec.seed);
    for (std::size_t k = 0; k < rk4_data.size(); ++k) rk4_data[k] += d[k];
  }
  Trajectory rk = rk4_solve(rk4_data, omega, spec.p, spec.lambda_sign, spec.grid);

  UniquenessReport rep;
  rep.sup_diff = sup_difference(pic.trajectory, rk);
  rep.perturbation_scale = perturbation_scale;
  rep.picard_converged = pic.converged;
  return rep;
}

namespace {

double fit_slope_loglog(const std::vector<double>& xs, const std::vector<double>& ys) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = std::log(xs[i]);
    const double y = std::log(ys[i]);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw precondition_error("slope fit: degenerate abscissae");
  return (n * sxy - sx * sy) / denom;
}

}  // namespace

AsymptoticsReport asymptotics_experiment(const CoefficientField& c0,
                                         const FrequencyVector& omega, int p,
                                         const std::vector<double>& epsilons,
                                         double eta, int s,
                                         const AsymptoticsOptions& opts) {
  if (epsilons.empty()) throw argument_error("asymptotics: no epsilons");
  for (double eps : epsilons)
    if (!(eps > 0.0 && eps < 1.0))
      throw argument_error("asymptotics: epsilons must lie in (0,1)");
  if (!(eta > 0.0 && eta < 1.0))
    throw argument_error("asymptotics: eta must lie in (0,1)");
  if (s < 0) throw argument_error("asymptotics: s must be >= 0");

  AsymptoticsReport rep;
  rep.epsilons = epsilons;
  rep.eta = eta;
  rep.s = s;

  const std::vector<double> w2 = [&] {
    std::vector<double> v(c0.size());
    std::size_t flat = 0;
    c0.box().for_each([&](std::span<const int> n) {
      const double w = inner_product(n, omega);
      v[flat++] = w * w;
    });
    return v;
  }();

  for (double eps : epsilons) {
    const double t = std::pow(eps, -1.0 + eta);
    std::int64_t want = static_cast<std::int64_t>(std::ceil(t / opts.dt_max));
    if (want % 2 != 0) ++want;
    if (want < 2) want = 2;
    if (want > opts.max_steps)
      throw capacity_error("asymptotics: epsilon=" + fmt_double(eps) +
                           " needs " + fmt_int(want) + " steps (> max_steps " +
                           fmt_int(opts.max_steps) + ")");
    TimeGrid grid(t, static_cast<int>(want));
    Rk4Final run = rk4_final(c0, omega, p, eps, grid);

    CoefficientField diff(c0.box());
    for (std::size_t k = 0; k < c0.size(); ++k)
      diff[k] = run.field[k] - std::polar(1.0, -w2[k] * t) * c0[k];

    rep.t_values.push_back(t);
    rep.linf_diffs.push_back(coefficient_l1(diff));
    rep.hs_diffs.push_back(hs_norm(diff, omega, s));
  }

  // Zero diffs (e.g. zero initial data) carry no slope information.
  auto fit_positive = [&](const std::vector<double>& ys) {
    std::vector<double> xs_pos, ys_pos;
    for (std::size_t i = 0; i < ys.size(); ++i)
      if (ys[i] > 0.0) {
        xs_pos.push_back(rep.epsilons[i]);
        ys_pos.push_back(ys[i]);
      }
    if (xs_pos.size() < 2) return 0.0;
    return fit_slope_loglog(xs_pos, ys_pos);
  };
  rep.slope_linf = fit_positive(rep.linf_diffs);
  rep.slope_hs = fit_positive(rep.hs_diffs);
  return rep;
}

std::vector<BoundReport> gevrey_check(const InitialData& data,
                                      const FrequencyVector& omega, double rho,
                                      double A, int m_max) {
  if (data.model != DecayModel::exponential)
    throw precondition_error(
        "gevrey_check: requires exponentially decaying initial data");
  if (m_max < 0) throw argument_error("gevrey_check: m_max must be >= 0");
  const CoefficientField& c = data.field;
  const int nu = c.box().dim();

  std::vector<BoundReport> out;
  for (int m = 0; m <= m_max; ++m) {
    double lhs = 0.0;
    std::size_t flat = 0;
    c.box().for_each([&](std::span<const int> n) {
      const double w = std::abs(inner_product(n, omega));
      lhs += std::pow(w, m) * std::abs(c[flat]);
      ++flat;
    });
    const double rhs = gevrey_bound(A, rho, nu, omega.l1(), m);
    out.push_back(BoundReport::make("gevrey_m" + fmt_int(m), lhs, rhs));
  }
  return out;
}

}  // namespace qpnls
