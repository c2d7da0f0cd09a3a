#pragma once

#include <string>
#include <vector>

namespace qpnls {

// One verified inequality: holds <=> lhs <= rhs + tolerance.
struct BoundReport {
  std::string name;
  double lhs = 0;
  double rhs = 0;
  bool holds = false;
  double margin = 0;  // rhs - lhs

  static BoundReport make(std::string name, double lhs, double rhs,
                          double tolerance = 0.0);
};

std::string bound_report_csv_header();
std::string bound_report_csv_row(const BoundReport& r);

// Certified enclosure of zeta(s) = sum n^-s for real s > 1: partial sum to M
// plus the integral tail bracket
//   int_M^inf x^-s dx  <=  tail  <=  M^-s + int_M^inf x^-s dx.
struct ZetaEnclosure {
  double lower;
  double upper;
  double partial_sum;
  long terms;
};
ZetaEnclosure zeta_enclosure(double s, double tol);

// Midpoint of the enclosure; absolute error <= tol.
double zeta(double s, double tol = 1e-12);

// H(s;nu) = sum over the ell^inf box of radius N of (1+|n|)^-s, accumulated
// by ell^1 shells. Monotone nondecreasing in N.
double h_sum(double s, int nu, int radius);

// b(s;nu) = 1 + sum_{j0=1}^{nu} C(nu,j0) 2^j0 j0^-s zeta(s/j0)^j0,
// the closed-form majorant of H(s;nu). Requires s > nu. The conservative
// variant replaces zeta by its 1 + 1/(s-1) envelope, trading sharpness for
// a zeta-free evaluation; it always dominates the plain form.
double b_bound(double s, int nu);
double b_bound_conservative(double s, int nu);

// Guaranteed existence time t0 = (2p)^2p / (A b(r/2;nu)^2p P^P).
double t0_bound(double A, double r, int nu, int p);

// Uniform decay constant B = max{A^(1/2p), A^(1/2p) (P/2p) b(r/2;nu)}.
double b_constant(double A, double r, int nu, int p);

// prod(1+x_j) >= 1 + sum x_j for x_j > -1 of one sign. Mixed signs are a
// precondition violation (the inequality genuinely fails there), reported
// via precondition_error rather than a failed BoundReport.
BoundReport bernoulli_check(const std::vector<double>& xs);

// Geometric mean <= arithmetic mean for positive entries.
BoundReport am_gm_check(const std::vector<double>& as);

// (max{A (6/rho)^nu, 2 |omega| / rho})^(m+1) * m!, the m-th derivative
// envelope of an exponentially decaying coefficient family.
double gevrey_bound(double A, double rho, int nu, double omega_l1, int m);

}  // namespace qpnls
