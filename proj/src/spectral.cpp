#include "qpnls/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "qpnls/errors.hpp"
#include "qpnls/io.hpp"
#include "qpnls/rng.hpp"

namespace qpnls {

CoefficientField::CoefficientField(LatticeBox box)
    : box_(box), values_(box.count(), Complex(0.0, 0.0)) {}

CoefficientField::CoefficientField(LatticeBox box, std::vector<Complex> values)
    : box_(box), values_(std::move(values)) {
  if (values_.size() != box_.count())
    throw argument_error("CoefficientField: value count does not match box");
}

namespace {

double phase_for(PhaseScheme scheme, std::uint64_t seed, std::size_t flat) {
  switch (scheme) {
    case PhaseScheme::zero:
      return 0.0;
    case PhaseScheme::deterministic: {
      // Golden-ratio low-discrepancy phase, independent of the seed.
      const double g = 0.6180339887498949;
      double frac = std::fmod(g * static_cast<double>(flat + 1), 1.0);
      return 2.0 * std::numbers::pi * frac;
    }
    case PhaseScheme::seeded_random: {
      CounterRng rng(seed, "field-phase");
      return 2.0 * std::numbers::pi * rng.uniform_at(flat);
    }
  }
  return 0.0;
}

}  // namespace

InitialData make_poly_data(double A, double r, const LatticeBox& box, int p,
                           PhaseScheme scheme, std::uint64_t seed) {
  if (!(A > 0.0)) throw argument_error("make_poly_data: A must be positive");
  if (!(r > 0.0)) throw argument_error("make_poly_data: r must be positive");
  if (p < 1) throw argument_error("make_poly_data: p must be >= 1");
  CoefficientField c(box);
  const double amp = std::pow(A, 1.0 / (2.0 * p));
  std::size_t flat = 0;
  box.for_each([&](std::span<const int> n) {
    const double mod = amp * std::pow(1.0 + static_cast<double>(l1_norm(n)), -r);
    const double ph = phase_for(scheme, seed, flat);
    c[flat] = std::polar(mod, ph);
    ++flat;
  });
  return {std::move(c), DecayModel::polynomial, A, r, p};
}

InitialData make_exp_data(double A, double kappa, const LatticeBox& box, int p,
                          PhaseScheme scheme, std::uint64_t seed) {
  if (!(A > 0.0)) throw argument_error("make_exp_data: A must be positive");
  if (!(kappa > 0.0 && kappa <= 1.0))
    throw argument_error("make_exp_data: kappa must be in (0,1]");
  if (p < 1) throw argument_error("make_exp_data: p must be >= 1");
  CoefficientField c(box);
  const double amp = std::pow(A, 1.0 / (2.0 * p));
  std::size_t flat = 0;
  box.for_each([&](std::span<const int> n) {
    const double mod = amp * std::exp(-kappa * static_cast<double>(l1_norm(n)));
    const double ph = phase_for(scheme, seed, flat);
    c[flat] = std::polar(mod, ph);
    ++flat;
  });
  return {std::move(c), DecayModel::exponential, A, kappa, p};
}

CoefficientField conj_reflect(const CoefficientField& c) {
  const LatticeBox& box = c.box();
  CoefficientField g(box);
  const std::size_t count = box.count();
  // The box is symmetric, so -m <-> (count-1) - flat(m) under the
  // lexicographic order.
  for (std::size_t f = 0; f < count; ++f)
    g[f] = std::conj(c[count - 1 - f]);
  return g;
}

namespace {

// Sum of f(a) h(n-a) over a in box with n-a in box; per-dimension bounds
// make every visited pair admissible and the innermost loop contiguous
// (stride +1 in a, -1 in b).
Complex convolve_at(const CoefficientField& f, const CoefficientField& h,
                    std::span<const int> n) {
  const LatticeBox& box = f.box();
  const int nu = box.dim();
  const int N = box.radius();
  const int side = box.side();

  Complex acc(0.0, 0.0);
  // Odometer over dimensions 0..nu-2; innermost dimension is a tight loop.
  std::vector<int> a(static_cast<std::size_t>(nu));
  std::vector<int> lo(static_cast<std::size_t>(nu)), hi(static_cast<std::size_t>(nu));
  for (int d = 0; d < nu; ++d) {
    lo[static_cast<std::size_t>(d)] = std::max(-N, n[static_cast<std::size_t>(d)] - N);
    hi[static_cast<std::size_t>(d)] = std::min(N, n[static_cast<std::size_t>(d)] + N);
    if (lo[static_cast<std::size_t>(d)] > hi[static_cast<std::size_t>(d)]) return acc;
    a[static_cast<std::size_t>(d)] = lo[static_cast<std::size_t>(d)];
  }
  const Complex* fv = f.values().data();
  const Complex* hv = h.values().data();
  while (true) {
    // Flat offsets of the outer prefix (dims 0..nu-2).
    std::size_t fa = 0, fb = 0;
    for (int d = 0; d + 1 < nu; ++d) {
      fa = fa * static_cast<std::size_t>(side) +
           static_cast<std::size_t>(a[static_cast<std::size_t>(d)] + N);
      fb = fb * static_cast<std::size_t>(side) +
           static_cast<std::size_t>(n[static_cast<std::size_t>(d)] -
                                    a[static_cast<std::size_t>(d)] + N);
    }
    const int dl = nu - 1;
    std::size_t ia = fa * static_cast<std::size_t>(side) +
                     static_cast<std::size_t>(lo[static_cast<std::size_t>(dl)] + N);
    std::size_t ib = fb * static_cast<std::size_t>(side) +
                     static_cast<std::size_t>(n[static_cast<std::size_t>(dl)] -
                                              lo[static_cast<std::size_t>(dl)] + N);
    for (int al = lo[static_cast<std::size_t>(dl)]; al <= hi[static_cast<std::size_t>(dl)];
         ++al, ++ia, --ib)
      acc += fv[ia] * hv[ib];
    // Advance the outer odometer.
    int d = nu - 2;
    while (d >= 0 && a[static_cast<std::size_t>(d)] == hi[static_cast<std::size_t>(d)]) {
      a[static_cast<std::size_t>(d)] = lo[static_cast<std::size_t>(d)];
      --d;
    }
    if (d < 0) break;
    ++a[static_cast<std::size_t>(d)];
  }
  return acc;
}

// out(n) = sum_{a,b in box, a+b=n} f(a) h(b), output clipped to the box;
// the ell^1 mass of outputs falling outside the box is added to *discarded
// when requested.
CoefficientField convolve_clip(const CoefficientField& f,
                               const CoefficientField& h, double* discarded) {
  const LatticeBox& box = f.box();
  const int nu = box.dim();
  const int N = box.radius();
  CoefficientField out(box);

  std::size_t flat = 0;
  box.for_each([&](std::span<const int> n) {
    out[flat++] = convolve_at(f, h, n);
  });
  if (discarded) {
    // Outputs reachable outside the box live in the doubled box.
    LatticeBox outer(nu, 2 * N);
    outer.for_each([&](std::span<const int> n) {
      for (int d = 0; d < nu; ++d)
        if (n[static_cast<std::size_t>(d)] < -N || n[static_cast<std::size_t>(d)] > N) {
          *discarded += std::abs(convolve_at(f, h, n));
          return;
        }
    });
  }
  return out;
}

}  // namespace

ConvolutionResult alt_convolution_with_report(const CoefficientField& c, int p) {
  if (p < 1) throw argument_error("alt_convolution: p must be >= 1");
  const int P = 2 * p + 1;
  const CoefficientField g = conj_reflect(c);
  double discarded = 0.0;
  CoefficientField acc = c;
  for (int j = 2; j <= P; ++j)
    acc = convolve_clip(acc, (j % 2 == 0) ? g : c, &discarded);
  return {std::move(acc), discarded};
}

CoefficientField alt_convolution(const CoefficientField& c, int p) {
  if (p < 1) throw argument_error("alt_convolution: p must be >= 1");
  const int P = 2 * p + 1;
  const CoefficientField g = conj_reflect(c);
  CoefficientField acc = c;
  for (int j = 2; j <= P; ++j)
    acc = convolve_clip(acc, (j % 2 == 0) ? g : c, nullptr);
  return acc;
}

namespace {

// Depth-first tuple enumeration with the alternating partial sum kept in
// the box at every level: tuples pruned here are exactly the ones the
// pairwise clipping drops.
void brute_force_rec(const CoefficientField& c, int P, int level,
                     std::span<int> partial, Complex prod,
                     const std::vector<int>& coords, CoefficientField& out) {
  const LatticeBox& box = c.box();
  const int nu = box.dim();
  const int N = box.radius();
  const std::size_t count = box.count();
  const int sign = (level % 2 == 1) ? +1 : -1;  // slot `level` sign (-1)^(level-1)
  const bool conj_slot = (level % 2 == 0);
  std::vector<int> next(static_cast<std::size_t>(nu));
  for (std::size_t f = 0; f < count; ++f) {
    const int* a = &coords[f * static_cast<std::size_t>(nu)];
    bool inside = true;
    for (int d = 0; d < nu; ++d) {
      next[static_cast<std::size_t>(d)] = partial[static_cast<std::size_t>(d)] + sign * a[d];
      if (level >= 2 && (next[static_cast<std::size_t>(d)] < -N ||
                         next[static_cast<std::size_t>(d)] > N)) {
        inside = false;
        break;
      }
    }
    if (level >= 2 && !inside) continue;
    const Complex factor = conj_slot ? std::conj(c[f]) : c[f];
    const Complex val = prod * factor;
    if (level == P) {
      out[box.flat_index(next)] += val;
    } else {
      brute_force_rec(c, P, level + 1, std::span<int>(next), val, coords, out);
    }
  }
}

}  // namespace

CoefficientField brute_force_alt_convolution(const CoefficientField& c, int p,
                                             std::uint64_t budget) {
  if (p < 1) throw argument_error("brute_force_alt_convolution: p must be >= 1");
  const int P = 2 * p + 1;
  const std::size_t count = c.box().count();
  double tuples = 1.0;
  for (int j = 0; j < P; ++j) tuples *= static_cast<double>(count);
  if (tuples > static_cast<double>(budget))
    throw capacity_error("brute_force_alt_convolution: " + fmt_double(tuples) +
                         " tuples exceed budget " +
                         fmt_int(static_cast<std::int64_t>(budget)));
  CoefficientField out(c.box());
  std::vector<int> zero(static_cast<std::size_t>(c.box().dim()), 0);
  brute_force_rec(c, P, 1, std::span<int>(zero), Complex(1.0, 0.0),
                  c.box().coords_table(), out);
  return out;
}

Complex evaluate(const CoefficientField& c, const FrequencyVector& omega, double x) {
  if (omega.dim() != c.box().dim())
    throw argument_error("evaluate: frequency dimension mismatch");
  Complex sum(0.0, 0.0);
  std::size_t flat = 0;
  c.box().for_each([&](std::span<const int> n) {
    const double w = inner_product(n, omega);
    sum += c[flat] * std::polar(1.0, w * x);
    ++flat;
  });
  return sum;
}

double coefficient_l1(const CoefficientField& c) {
  double s = 0.0;
  for (const Complex& v : c.values()) s += std::abs(v);
  return s;
}

double sup_norm(const CoefficientField& c, int samples,
                const FrequencyVector& omega, double length_multiplier) {
  if (samples < 1) throw argument_error("sup_norm: samples must be >= 1");
  double scale = 1.0;
  if (c.box().radius() >= 1) {
    const double md = min_divisor(omega, c.box());
    if (md > 0.0) scale = md;
  }
  const double L = 2.0 * std::numbers::pi * length_multiplier / scale;
  double best = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double x = samples == 1 ? 0.0 : L * i / (samples - 1);
    best = std::max(best, std::abs(evaluate(c, omega, x)));
  }
  return best;
}

double hs_norm(const CoefficientField& c, const FrequencyVector& omega, int s) {
  if (s < 0) throw argument_error("hs_norm: s must be >= 0");
  double total = 0.0;
  std::size_t flat = 0;
  c.box().for_each([&](std::span<const int> n) {
    const double w = inner_product(n, omega);
    const double a2 = std::norm(c[flat]);
    double wpow = 1.0;
    for (int m = 0; m <= s; ++m) {
      total += wpow * a2;
      wpow *= w * w;
    }
    ++flat;
  });
  return std::sqrt(total);
}

DecayFit decay_fit(const CoefficientField& c, DecayModel model) {
  // Max modulus per ell^1 shell: the decay hypotheses are uniform bounds.
  std::map<std::int64_t, double> shell_max;
  std::size_t flat = 0;
  c.box().for_each([&](std::span<const int> n) {
    const double a = std::abs(c[flat]);
    auto [it, fresh] = shell_max.try_emplace(l1_norm(n), a);
    if (!fresh) it->second = std::max(it->second, a);
    ++flat;
  });
  std::vector<double> u, y;
  for (const auto& [m, a] : shell_max) {
    if (a <= 0.0) continue;
    const double radius = static_cast<double>(m);
    u.push_back(model == DecayModel::polynomial ? std::log1p(radius) : radius);
    y.push_back(std::log(a));
  }
  if (u.empty())
    throw precondition_error("decay_fit: all-zero field (degenerate input)");
  if (u.size() < 3)
    throw precondition_error("decay_fit: needs at least 3 nonzero shells, got " +
                             fmt_int(static_cast<std::int64_t>(u.size())));
  const double n = static_cast<double>(u.size());
  double su = 0, sy = 0, suu = 0, suy = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    su += u[i];
    sy += y[i];
    suu += u[i] * u[i];
    suy += u[i] * y[i];
  }
  const double denom = n * suu - su * su;
  if (denom == 0.0) throw precondition_error("decay_fit: degenerate abscissae");
  const double slope = (n * suy - su * sy) / denom;
  const double intercept = (sy - slope * su) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double resid = y[i] - (intercept + slope * u[i]);
    ss += resid * resid;
  }
  return {-slope, std::exp(intercept), model, std::sqrt(ss / n)};
}

void write_field_csv(std::ostream& os, const CoefficientField& c) {
  const int nu = c.box().dim();
  for (int j = 1; j <= nu; ++j) os << "n_" << j << ",";
  os << "re,im\n";
  std::size_t flat = 0;
  c.box().for_each([&](std::span<const int> n) {
    for (int v : n) os << fmt_int(v) << ",";
    os << fmt_double(c[flat].real()) << "," << fmt_double(c[flat].imag()) << "\n";
    ++flat;
  });
}

std::string field_to_csv(const CoefficientField& c) {
  std::ostringstream os;
  write_field_csv(os, c);
  return os.str();
}

CoefficientField read_field_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw parse_error("field csv: empty input");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 3 || header[header.size() - 2] != "re" || header.back() != "im")
    throw parse_error("field csv: bad header '" + line + "'");
  const int nu = static_cast<int>(header.size()) - 2;

  std::vector<std::vector<int>> rows;
  std::vector<Complex> vals;
  int radius = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<int> n;
    for (int j = 0; j < nu; ++j) {
      if (!std::getline(ss, cell, ',')) throw parse_error("field csv: short row");
      n.push_back(static_cast<int>(parse_int(cell)));
      radius = std::max(radius, std::abs(n.back()));
    }
    if (!std::getline(ss, cell, ',')) throw parse_error("field csv: missing re");
    const double re = parse_double(cell);
    if (!std::getline(ss, cell, ',')) throw parse_error("field csv: missing im");
    const double im = parse_double(cell);
    rows.push_back(std::move(n));
    vals.emplace_back(re, im);
  }
  LatticeBox box(nu, radius);
  if (rows.size() != box.count())
    throw parse_error("field csv: row count does not fill the inferred box");
  CoefficientField c(box);
  for (std::size_t i = 0; i < rows.size(); ++i)
    c[box.flat_index(std::span<const int>(rows[i]))] = vals[i];
  return c;
}

}  // namespace qpnls
