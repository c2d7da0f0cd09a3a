#include "qpnls/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "qpnls/analysis.hpp"
#include "qpnls/bounds.hpp"
#include "qpnls/combinatorics.hpp"
#include "qpnls/errors.hpp"
#include "qpnls/io.hpp"
#include "qpnls/rng.hpp"

namespace qpnls {

namespace fs = std::filesystem;

namespace {

fs::path make_run_dir(const RunConfig& c, const std::string& subcommand) {
  fs::path dir = fs::path(c.out_dir) / subcommand / config_hash_name(c);
  fs::create_directories(dir);
  std::ofstream cfg(dir / "config.json", std::ios::binary);
  cfg << config_to_json(c);
  return dir;
}

void write_reports_csv(const fs::path& path, const std::vector<BoundReport>& rows) {
  std::ofstream os(path, std::ios::binary);
  os << bound_report_csv_header() << "\n";
  for (const BoundReport& r : rows) os << bound_report_csv_row(r) << "\n";
}

int exit_from_reports(const std::vector<BoundReport>& rows, RunResult& result) {
  for (const BoundReport& r : rows)
    if (!r.holds) {
      result.messages.push_back("FAILED: " + r.name + " (lhs=" + fmt_double(r.lhs) +
                                ", rhs=" + fmt_double(r.rhs) + ")");
      result.exit_code = 3;
    }
  return result.exit_code;
}

}  // namespace

RunResult run_simulate(const RunConfig& c) {
  const ProblemSpec& spec = c.spec;
  RunResult result;
  fs::path dir = make_run_dir(c, "simulate");
  result.run_dir = dir.string();
  for (const std::string& w : c.warnings) result.messages.push_back("warning: " + w);

  const FrequencyVector omega = spec.omega();
  const InitialData data = spec.initial_data();
  {
    std::ofstream os(dir / "initial.csv", std::ios::binary);
    write_field_csv(os, data.field);
  }

  // Non-resonance diagnostic (reported, never enforced).
  std::ofstream diag(dir / "diagnostics.ndjson", std::ios::binary);
  if (spec.box_radius >= 1) {
    MinDivisorReport md = min_divisor_report(omega, spec.box(), spec.tol.min_divisor_warn);
    diag << "{\"min_divisor\":" << fmt_double(md.value) << ",\"argmin\":[";
    for (int j = 0; j < md.argmin.dim(); ++j)
      diag << (j ? "," : "") << fmt_int(md.argmin.e[static_cast<std::size_t>(j)]);
    diag << "],\"below_threshold\":" << (md.below_threshold ? "true" : "false") << "}\n";
    if (md.below_threshold)
      result.messages.push_back("warning: min divisor " + fmt_double(md.value) +
                                " below threshold " + fmt_double(spec.tol.min_divisor_warn));
  }

  // t0 and the decay/Cauchy constants exist only in the polynomial regime
  // with r/2 > nu.
  const bool poly = spec.decay_model == DecayModel::polynomial;
  const bool have_t0 = poly && spec.decay_rate / 2.0 > spec.nu;
  PicardOptions popts;
  popts.max_iterations = spec.picard_depth;
  popts.stop_tol = spec.tol.picard_stop;
  if (have_t0)
    popts.t0 = t0_bound(spec.amplitude, spec.decay_rate, spec.nu, spec.p);

  PicardResult pic = picard_solve(data.field, omega, spec.p, spec.lambda_sign,
                                  spec.grid, popts);
  Trajectory rk = rk4_solve(data.field, omega, spec.p, spec.lambda_sign, spec.grid);

  write_trajectory((dir / "picard").string(), pic.trajectory, spec.p);
  write_trajectory((dir / "rk4").string(), rk, spec.p);

  {
    std::ofstream os(dir / "deltas.csv", std::ios::binary);
    os << "k,delta\n";
    for (std::size_t i = 0; i < pic.deltas.size(); ++i)
      os << fmt_int(static_cast<std::int64_t>(i + 1)) << "," << fmt_double(pic.deltas[i]) << "\n";
  }
  if (pic.divergence_reported)
    result.messages.push_back("divergence reported: deltas rising past t0 (t_end > t0)");
  if (have_t0)
    diag << "{\"t0\":" << fmt_double(*popts.t0) << "}\n";

  std::vector<BoundReport> reports;

  if (poly && have_t0) {
    const double bconst =
        b_constant(spec.amplitude, spec.decay_rate, spec.nu, spec.p);
    BoundReport decay = verify_decay(pic.trajectory, spec.decay_rate / 2.0, bconst);
    decay.name = "decay_picard_r_half";
    reports.push_back(decay);
  }
  if (spec.decay_model == DecayModel::exponential) {
    for (BoundReport& r : gevrey_check(data, omega, spec.decay_rate, spec.amplitude, 6))
      reports.push_back(std::move(r));
  }

  if (poly && spec.decay_rate / 4.0 > spec.nu) {
    const double bconst = b_constant(spec.amplitude, spec.decay_rate, spec.nu, spec.p);
    const double rate = spec.big_p() *
                        std::pow(bconst * b_bound(spec.decay_rate / 4.0, spec.nu),
                                 spec.big_p() - 1) *
                        spec.grid.t_end;
    CauchyReport cr = cauchy_report(pic.deltas, rate);
    if (cr.sufficient)
      reports.push_back(cr.report);
    else
      result.messages.push_back("cauchy report skipped: fewer than 4 nonzero deltas");
  }

  // Closed-box conservation, RK4 side.
  {
    const double m0 = mass(rk.fields[0]);
    double drift = 0.0;
    for (const CoefficientField& f : rk.fields)
      if (m0 > 0.0) drift = std::max(drift, std::abs(mass(f) - m0) / m0);
    reports.push_back(BoundReport::make("mass_drift_rk4", drift, spec.tol.mass_drift));
  }

  // Same data through both methods: the zero-perturbation uniqueness probe
  // coincides with the cross-solver comparison already in hand.
  const double cross = sup_difference(pic.trajectory, rk);
  reports.push_back(
      BoundReport::make("cross_solver_sup_diff", cross, spec.tol.cross_solver));
  std::ofstream uqf(dir / "uniqueness.ndjson", std::ios::binary);
  uqf << "{\"perturbation_scale\":0,\"sup_diff\":" << fmt_double(cross)
      << ",\"picard_converged\":" << (pic.converged ? "true" : "false") << "}\n";

  write_reports_csv(dir / "reports.csv", reports);
  exit_from_reports(reports, result);
  return result;
}

RunResult run_verify_bounds(const RunConfig& c) {
  RunResult result;
  fs::path dir = make_run_dir(c, "verify-bounds");
  result.run_dir = dir.string();

  std::vector<BoundReport> reports;

  // zeta upper bound, with one closed-form anchor.
  for (double s : {1.5, 2.0, 3.0, 6.0, 12.0}) {
    reports.push_back(BoundReport::make("zeta_le_br_s" + fmt_double(s),
                                        zeta(s, 1e-10), 1.0 + 1.0 / (s - 1.0)));
  }
  {
    const double pi = 3.14159265358979323846;
    reports.push_back(BoundReport::make("zeta2_matches_pi2_over_6",
                                        std::abs(zeta(2.0, 1e-11) - pi * pi / 6.0),
                                        1e-10));
  }

  // Lattice sum vs closed-form majorant over the configured grid.
  for (double s : c.bounds.s_grid)
    for (int nu : c.bounds.nu_grid) {
      if (!(s > nu)) continue;
      for (int N : c.bounds.n_grid)
        reports.push_back(BoundReport::make(
            "h_le_b_s" + fmt_double(s) + "_nu" + fmt_int(nu) + "_N" + fmt_int(N),
            h_sum(s, nu, N), b_bound(s, nu)));
    }

  // Branch sums at the critical coupling, exact rationals.
  for (int p : {1, 2}) {
    const int P = 2 * p + 1;
    BigRat x = 1;
    for (int i = 0; i < 2 * p; ++i) x *= 2 * p;
    BigRat den = 1;
    for (int i = 0; i < P; ++i) den *= P;
    x /= den;
    const int kmax = p == 1 ? 3 : 2;
    for (int k = 1; k <= kmax; ++k) {
      GalSumExact g = gal_sum_exact(k, p, x, c.combinatorics.budget);
      if (!g.exact) {
        result.messages.push_back("gal sum truncated at k=" + fmt_int(k) +
                                  ", p=" + fmt_int(p) + " (lower bound only)");
        continue;
      }
      reports.push_back(BoundReport::make(
          "gal_sum_k" + fmt_int(k) + "_p" + fmt_int(p),
          g.value.convert_to<double>(), static_cast<double>(P) / (2 * p)));
    }
  }

  // Seeded inequality predicates.
  {
    CounterRng rng(c.spec.seed, "verify-bounds");
    for (int i = 0; i < c.bounds.samples; ++i) {
      const int len = 2 + static_cast<int>(rng.next_u64() % 6);
      const bool negative = rng.next_u64() % 2 == 0;
      std::vector<double> xs, as;
      for (int j = 0; j < len; ++j) {
        const double u = rng.next_uniform();
        xs.push_back(negative ? -0.9 * u : 3.0 * u);
        as.push_back(0.1 + 10.0 * rng.next_uniform());
      }
      BoundReport b = bernoulli_check(xs);
      b.name = "bernoulli_" + fmt_int(i);
      reports.push_back(std::move(b));
      BoundReport g = am_gm_check(as);
      g.name = "am_gm_" + fmt_int(i);
      reports.push_back(std::move(g));
    }
  }

  // The mixed-sign counterexample must be rejected, not evaluated.
  {
    bool rejected = false;
    try {
      bernoulli_check({0.5, -0.5});
    } catch (const precondition_error&) {
      rejected = true;
    }
    reports.push_back(BoundReport::make("bernoulli_mixed_sign_rejected",
                                        rejected ? 0.0 : 1.0, 0.0));
  }

  // Gevrey chain for exponentially decaying data.
  {
    LatticeBox box(2, 8);
    FrequencyVector omega({1.0, std::sqrt(2.0)});
    InitialData data = make_exp_data(1.0, 1.0, box, c.spec.p, PhaseScheme::zero);
    for (BoundReport& r : gevrey_check(data, omega, 1.0, 1.0, 6))
      reports.push_back(std::move(r));
  }

  write_reports_csv(dir / "bound_reports.csv", reports);
  exit_from_reports(reports, result);
  return result;
}

RunResult run_tree_stats(const RunConfig& c) {
  RunResult result;
  fs::path dir = make_run_dir(c, "tree-stats");
  result.run_dir = dir.string();
  const int p = c.spec.p;
  const int P = 2 * p + 1;

  {
    std::ofstream os(dir / "term_counts.csv", std::ios::binary);
    os << "k,p,N_k\n";
    for (int k = 1; k <= c.combinatorics.k_max; ++k)
      os << fmt_int(k) << "," << fmt_int(p) << "," << term_count(k, p).str() << "\n";
  }

  bool invariants_ok = true;
  {
    std::ofstream os(dir / "branch_stats.csv", std::ios::binary);
    os << "k,branch,sigma2p,ell,dfactor,leaf_slots\n";
    for (int k = 1; k <= c.combinatorics.k_max; ++k) {
      bool truncated = false;
      std::vector<Branch> branches = enumerate_branches(k, p, c.combinatorics.budget, &truncated);
      std::uint64_t counted = 0;
      for (const Branch& b : branches) {
        const BigInt s2p = sigma2p(b, p);
        const BigInt l = ell(b, p);
        const BigInt d = dfactor(b, p);
        const auto slots = leaf_slots(b, p);
        os << fmt_int(k) << "," << b.to_string() << "," << s2p.str() << ","
           << l.str() << "," << d.str() << ","
           << fmt_int(static_cast<std::int64_t>(slots.size())) << "\n";
        if (s2p != 2 * p * l + 1 || s2p % 2 == 0 ||
            BigInt(slots.size()) != s2p)
          invariants_ok = false;
        ++counted;
      }
      if (!truncated && BigInt(counted) != term_count(k, p)) invariants_ok = false;
      if (truncated)
        result.messages.push_back("branch enumeration truncated at k=" + fmt_int(k));
    }
  }

  std::vector<BoundReport> reports;
  {
    std::ofstream os(dir / "gal_sums.csv", std::ios::binary);
    os << "k,p,x,value,exact,bound,holds\n";
    BigRat x = 1;
    for (int i = 0; i < 2 * p; ++i) x *= 2 * p;
    BigRat den = 1;
    for (int i = 0; i < P; ++i) den *= P;
    x /= den;
    for (int k = 1; k <= c.combinatorics.k_max; ++k) {
      GalSumExact g = gal_sum_exact(k, p, x, c.combinatorics.budget);
      const double bound = static_cast<double>(P) / (2 * p);
      const double val = g.value.convert_to<double>();
      const bool holds = !g.exact || val <= bound;
      os << fmt_int(k) << "," << fmt_int(p) << "," << x.str() << ","
         << fmt_double(val) << "," << (g.exact ? "true" : "false") << ","
         << fmt_double(bound) << "," << (holds ? "true" : "false") << "\n";
      if (g.exact)
        reports.push_back(BoundReport::make("gal_sum_k" + fmt_int(k), val, bound));
    }
  }

  if (!invariants_ok) {
    result.messages.push_back("FAILED: branch counting invariants");
    result.exit_code = 3;
  }
  write_reports_csv(dir / "reports.csv", reports);
  exit_from_reports(reports, result);
  return result;
}

RunResult run_asymptotics(const RunConfig& c) {
  RunResult result;
  fs::path dir = make_run_dir(c, "asymptotics");
  result.run_dir = dir.string();
  const ProblemSpec& spec = c.spec;
  const FrequencyVector omega = spec.omega();
  const InitialData data = spec.initial_data();

  // Hypothesis of the Sobolev estimate: s < r/4 - nu/2.
  if (spec.decay_model == DecayModel::polynomial &&
      !(c.asymptotics.sobolev_s < spec.decay_rate / 4.0 - spec.nu / 2.0))
    result.messages.push_back("warning: hypothesis violated: s < r/4 - nu/2");

  AsymptoticsOptions opts;
  opts.dt_max = c.asymptotics.dt_max;
  opts.max_steps = c.asymptotics.max_steps;
  AsymptoticsReport rep = asymptotics_experiment(
      data.field, omega, spec.p, c.asymptotics.epsilons, c.asymptotics.eta,
      c.asymptotics.sobolev_s, opts);

  {
    std::ofstream os(dir / "asymptotics.ndjson", std::ios::binary);
    for (std::size_t i = 0; i < rep.epsilons.size(); ++i)
      os << "{\"epsilon\":" << fmt_double(rep.epsilons[i])
         << ",\"t\":" << fmt_double(rep.t_values[i])
         << ",\"linf_diff\":" << fmt_double(rep.linf_diffs[i])
         << ",\"hs_diff\":" << fmt_double(rep.hs_diffs[i]) << "}\n";
  }
  {
    std::ofstream os(dir / "summary.csv", std::ios::binary);
    os << "eta,s,slope_linf,slope_hs\n";
    os << fmt_double(rep.eta) << "," << fmt_int(rep.s) << ","
       << fmt_double(rep.slope_linf) << "," << fmt_double(rep.slope_hs) << "\n";
  }

  // Asserted: slopes at least eta - 0.1 (steeper decay is reported, not
  // failed), and diffs monotone along epsilons sorted descending.
  std::vector<BoundReport> reports;
  reports.push_back(BoundReport::make("slope_linf_ge_eta_minus_0.1",
                                      rep.eta - 0.1, rep.slope_linf));
  reports.push_back(BoundReport::make("slope_hs_ge_eta_minus_0.1",
                                      rep.eta - 0.1, rep.slope_hs));
  {
    std::vector<std::size_t> order(rep.epsilons.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return rep.epsilons[a] > rep.epsilons[b];
    });
    double worst_linf = 0.0, worst_hs = 0.0;
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      worst_linf = std::max(worst_linf, rep.linf_diffs[order[i + 1]] / rep.linf_diffs[order[i]]);
      worst_hs = std::max(worst_hs, rep.hs_diffs[order[i + 1]] / rep.hs_diffs[order[i]]);
    }
    reports.push_back(BoundReport::make("linf_diff_monotone_in_eps", worst_linf, 1.0));
    reports.push_back(BoundReport::make("hs_diff_monotone_in_eps", worst_hs, 1.0));
  }
  // hs_diff <= C eps^eta with one C stable across the epsilon set: the
  // fitted prefactors may spread by at most a factor 3.
  {
    double cmin = 0, cmax = 0;
    bool any = false;
    for (std::size_t i = 0; i < rep.epsilons.size(); ++i) {
      if (rep.hs_diffs[i] <= 0.0) continue;
      const double cfit = rep.hs_diffs[i] / std::pow(rep.epsilons[i], rep.eta);
      if (!any) { cmin = cmax = cfit; any = true; }
      cmin = std::min(cmin, cfit);
      cmax = std::max(cmax, cfit);
    }
    if (any)
      reports.push_back(
          BoundReport::make("hs_envelope_constant_spread", cmax / cmin, 3.0));
  }

  write_reports_csv(dir / "reports.csv", reports);
  exit_from_reports(reports, result);
  return result;
}

RunResult run_render_tree(const RunConfig& c) {
  RunResult result;
  fs::path dir = make_run_dir(c, "render-tree");
  result.run_dir = dir.string();
  const int p = c.spec.p;
  std::uint64_t remaining = c.combinatorics.budget;
  for (int k = 1; k <= c.combinatorics.k_max && remaining > 0; ++k) {
    BranchStream stream(k, p, remaining);
    std::uint64_t i = 0;
    while (auto b = stream.next()) {
      char name[48];
      std::snprintf(name, sizeof(name), "tree_k%d_b%05llu.dot", k,
                    static_cast<unsigned long long>(i));
      std::ofstream os(dir / name, std::ios::binary);
      os << render_tree_dot(*b, p);
      ++i;
    }
    remaining -= std::min<std::uint64_t>(remaining, i);
    if (stream.truncated())
      result.messages.push_back("render truncated at k=" + fmt_int(k));
  }
  return result;
}

RunResult run_subcommand(const std::string& name, const RunConfig& c) {
  if (name == "simulate") return run_simulate(c);
  if (name == "verify-bounds") return run_verify_bounds(c);
  if (name == "tree-stats") return run_tree_stats(c);
  if (name == "asymptotics") return run_asymptotics(c);
  if (name == "render-tree") return run_render_tree(c);
  throw argument_error("unknown subcommand '" + name + "'");
}

}  // namespace qpnls
