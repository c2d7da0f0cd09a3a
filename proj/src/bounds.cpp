#include "qpnls/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "qpnls/errors.hpp"
#include "qpnls/io.hpp"
#include "qpnls/lattice.hpp"

namespace qpnls {

BoundReport BoundReport::make(std::string name, double lhs, double rhs,
                              double tolerance) {
  BoundReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.holds = lhs <= rhs + tolerance;
  r.margin = rhs - lhs;
  return r;
}

std::string bound_report_csv_header() { return "name,lhs,rhs,holds,margin"; }

std::string bound_report_csv_row(const BoundReport& r) {
  return r.name + "," + fmt_double(r.lhs) + "," + fmt_double(r.rhs) + "," +
         (r.holds ? "true" : "false") + "," + fmt_double(r.margin);
}

ZetaEnclosure zeta_enclosure(double s, double tol) {
  if (!(s > 1.0)) throw domain_error("zeta: requires s > 1");
  if (!(tol > 0.0)) throw argument_error("zeta: tol must be positive");
  // Bracket width is M^-s; pick M with 5% headroom so the enclosure stays
  // strictly tighter than tol through the pow roundings.
  double m_real = std::pow(1.0 / tol, 1.0 / s) * 1.05;
  long M = std::max(8L, static_cast<long>(std::ceil(m_real)) + 1);
  // Summing smallest terms first keeps the rounding error well below tol.
  double partial = 0.0;
  for (long n = M; n >= 1; --n) partial += std::pow(static_cast<double>(n), -s);
  const double tail_int = std::pow(static_cast<double>(M), 1.0 - s) / (s - 1.0);
  const double tail_extra = std::pow(static_cast<double>(M), -s);
  return {partial + tail_int, partial + tail_int + tail_extra, partial, M};
}

double zeta(double s, double tol) {
  // Small-s evaluations at tight tolerances take ~1/tol^(1/s) terms; the
  // result is a pure function of (s, tol), so memoize.
  static std::map<std::pair<double, double>, double> cache;
  static std::mutex mu;
  {
    std::scoped_lock lock(mu);
    auto it = cache.find({s, tol});
    if (it != cache.end()) return it->second;
  }
  ZetaEnclosure e = zeta_enclosure(s, tol);
  const double mid = 0.5 * (e.lower + e.upper);
  std::scoped_lock lock(mu);
  cache.emplace(std::make_pair(s, tol), mid);
  return mid;
}

double h_sum(double s, int nu, int radius) {
  if (nu < 1) throw argument_error("h_sum: nu must be >= 1");
  if (!(s > static_cast<double>(nu)))
    throw domain_error("h_sum: requires s > nu for convergence");
  if (radius < 0) throw argument_error("h_sum: radius must be >= 0");
  LatticeBox box(nu, radius);
  // Shell counts first, then one power evaluation per shell.
  std::vector<std::int64_t> shell(static_cast<std::size_t>(nu) * radius + 1, 0);
  box.for_each([&](std::span<const int> n) {
    ++shell[static_cast<std::size_t>(l1_norm(n))];
  });
  double sum = 0.0;
  for (std::size_t m = shell.size(); m-- > 0;) {
    if (shell[m] == 0) continue;
    sum += static_cast<double>(shell[m]) *
           std::pow(1.0 + static_cast<double>(m), -s);
  }
  return sum;
}

namespace {
double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}
}  // namespace

namespace {
double b_bound_impl(double s, int nu, bool conservative) {
  if (nu < 1) throw argument_error("b_bound: nu must be >= 1");
  if (!(s > static_cast<double>(nu)))
    throw domain_error("b_bound: requires s > nu (so s/j0 > 1 for every j0)");
  double sum = 1.0;
  for (int j0 = 1; j0 <= nu; ++j0) {
    const double sj = s / j0;
    const double z = conservative ? 1.0 + 1.0 / (sj - 1.0) : zeta(sj, 1e-12);
    sum += binomial(nu, j0) * std::pow(2.0, j0) * std::pow(j0, -s) *
           std::pow(z, j0);
  }
  return sum;
}
}  // namespace

double b_bound(double s, int nu) { return b_bound_impl(s, nu, false); }

double b_bound_conservative(double s, int nu) { return b_bound_impl(s, nu, true); }

double t0_bound(double A, double r, int nu, int p) {
  if (!(A > 0.0)) throw argument_error("t0_bound: A must be positive");
  if (p < 1) throw argument_error("t0_bound: p must be >= 1");
  if (!(r / 2.0 > static_cast<double>(nu)))
    throw domain_error("t0_bound: requires r/2 > nu");
  const int P = 2 * p + 1;
  const double b = b_bound(r / 2.0, nu);
  return std::pow(2.0 * p, 2.0 * p) /
         (A * std::pow(b, 2.0 * p) * std::pow(P, P));
}

double b_constant(double A, double r, int nu, int p) {
  if (!(A > 0.0)) throw argument_error("b_constant: A must be positive");
  if (p < 1) throw argument_error("b_constant: p must be >= 1");
  if (!(r / 2.0 > static_cast<double>(nu)))
    throw domain_error("b_constant: requires r/2 > nu");
  const int P = 2 * p + 1;
  const double amp = std::pow(A, 1.0 / (2.0 * p));
  const double second = amp * P / (2.0 * p) * b_bound(r / 2.0, nu);
  return std::max(amp, second);
}

BoundReport bernoulli_check(const std::vector<double>& xs) {
  bool has_pos = false, has_neg = false;
  for (double x : xs) {
    if (!(x > -1.0))
      throw precondition_error("bernoulli_check: entries must be > -1");
    if (x > 0.0) has_pos = true;
    if (x < 0.0) has_neg = true;
  }
  if (has_pos && has_neg)
    throw precondition_error(
        "bernoulli_check: mixed signs; the inequality can fail "
        "(e.g. (1+1/2)(1-1/2) = 3/4 < 1)");
  double prod = 1.0, sum = 0.0;
  for (double x : xs) {
    prod *= 1.0 + x;
    sum += x;
  }
  // lhs <= rhs orientation: 1 + sum <= prod.
  return BoundReport::make("bernoulli", 1.0 + sum, prod, 1e-12 * (1.0 + std::abs(sum)));
}

BoundReport am_gm_check(const std::vector<double>& as) {
  if (as.empty()) throw argument_error("am_gm_check: empty input");
  double log_sum = 0.0, sum = 0.0;
  for (double a : as) {
    if (!(a > 0.0)) throw domain_error("am_gm_check: entries must be positive");
    log_sum += std::log(a);
    sum += a;
  }
  const double n = static_cast<double>(as.size());
  const double geo = std::exp(log_sum / n);
  const double ari = sum / n;
  return BoundReport::make("am_gm", geo, ari, 1e-12 * ari);
}

double gevrey_bound(double A, double rho, int nu, double omega_l1, int m) {
  if (!(rho > 0.0 && rho <= 1.0))
    throw argument_error("gevrey_bound: rho must be in (0,1]");
  if (m < 0) throw argument_error("gevrey_bound: m must be >= 0");
  const double base =
      std::max(A * std::pow(6.0 / rho, nu), 2.0 * omega_l1 / rho);
  double factorial = 1.0;
  for (int i = 2; i <= m; ++i) factorial *= i;
  return std::pow(base, m + 1) * factorial;
}

}  // namespace qpnls
