#include "qpnls/lattice.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

#include "qpnls/errors.hpp"
#include "qpnls/io.hpp"

namespace qpnls {

namespace {
void check_same_dim(int a, int b, const char* what) {
  if (a != b)
    throw argument_error(std::string(what) + ": dimension mismatch (" +
                         fmt_int(a) + " vs " + fmt_int(b) + ")");
}
}  // namespace

MultiIndex operator+(const MultiIndex& a, const MultiIndex& b) {
  check_same_dim(a.dim(), b.dim(), "MultiIndex+");
  MultiIndex r = a;
  for (int j = 0; j < a.dim(); ++j) r.e[static_cast<std::size_t>(j)] += b.e[static_cast<std::size_t>(j)];
  return r;
}

MultiIndex operator-(const MultiIndex& a, const MultiIndex& b) {
  check_same_dim(a.dim(), b.dim(), "MultiIndex-");
  MultiIndex r = a;
  for (int j = 0; j < a.dim(); ++j) r.e[static_cast<std::size_t>(j)] -= b.e[static_cast<std::size_t>(j)];
  return r;
}

MultiIndex operator-(const MultiIndex& a) {
  MultiIndex r = a;
  for (auto& v : r.e) v = -v;
  return r;
}

MultiIndex operator*(int s, const MultiIndex& a) {
  MultiIndex r = a;
  for (auto& v : r.e) v *= s;
  return r;
}

std::int64_t l1_norm(std::span<const int> n) {
  std::int64_t s = 0;
  for (int v : n) s += std::abs(static_cast<std::int64_t>(v));
  return s;
}

std::int64_t l1_norm(const MultiIndex& n) { return l1_norm(std::span<const int>(n.e)); }

FrequencyVector::FrequencyVector(std::vector<double> entries)
    : entries_(std::move(entries)) {
  if (entries_.empty())
    throw argument_error("FrequencyVector: empty");
  l1_ = 0.0;
  for (double w : entries_) {
    if (!std::isfinite(w) || w == 0.0)
      throw argument_error("FrequencyVector: entries must be finite and nonzero");
    l1_ += std::abs(w);
  }
}

double inner_product(std::span<const int> n, const FrequencyVector& omega) {
  check_same_dim(static_cast<int>(n.size()), omega.dim(), "inner_product");
  double s = 0.0;
  for (int j = 0; j < omega.dim(); ++j) s += n[static_cast<std::size_t>(j)] * omega[j];
  return s;
}

double inner_product(const MultiIndex& n, const FrequencyVector& omega) {
  return inner_product(std::span<const int>(n.e), omega);
}

LatticeBox::LatticeBox(int dimension, int radius) : nu_(dimension), radius_(radius) {
  if (dimension < 1) throw argument_error("LatticeBox: dimension must be >= 1");
  if (radius < 0) throw argument_error("LatticeBox: radius must be >= 0");
  // (2N+1)^nu with overflow guard
  std::size_t c = 1;
  const std::size_t s = static_cast<std::size_t>(side());
  for (int d = 0; d < dimension; ++d) {
    if (c > std::numeric_limits<std::size_t>::max() / s)
      throw capacity_error("LatticeBox: index count overflows size_t");
    c *= s;
  }
  count_ = c;
}

bool LatticeBox::contains(std::span<const int> n) const {
  if (static_cast<int>(n.size()) != nu_) return false;
  for (int v : n)
    if (v < -radius_ || v > radius_) return false;
  return true;
}

std::size_t LatticeBox::flat_index(std::span<const int> n) const {
  std::size_t f = 0;
  for (int j = 0; j < nu_; ++j)
    f = f * static_cast<std::size_t>(side()) +
        static_cast<std::size_t>(n[static_cast<std::size_t>(j)] + radius_);
  return f;
}

MultiIndex LatticeBox::index_at(std::size_t flat) const {
  MultiIndex n;
  n.e.resize(static_cast<std::size_t>(nu_));
  for (int j = nu_ - 1; j >= 0; --j) {
    n.e[static_cast<std::size_t>(j)] =
        static_cast<int>(flat % static_cast<std::size_t>(side())) - radius_;
    flat /= static_cast<std::size_t>(side());
  }
  return n;
}

std::vector<MultiIndex> LatticeBox::indices(std::size_t budget) const {
  if (count_ > budget)
    throw capacity_error("LatticeBox::indices: " + fmt_int(static_cast<std::int64_t>(count_)) +
                         " indices exceed budget " + fmt_int(static_cast<std::int64_t>(budget)));
  std::vector<MultiIndex> out;
  out.reserve(count_);
  for_each([&](std::span<const int> x) { out.emplace_back(std::vector<int>(x.begin(), x.end())); });
  return out;
}

std::vector<int> LatticeBox::coords_table() const {
  std::vector<int> t;
  t.reserve(count_ * static_cast<std::size_t>(nu_));
  for_each([&](std::span<const int> x) { t.insert(t.end(), x.begin(), x.end()); });
  return t;
}

double min_divisor(const FrequencyVector& omega, const LatticeBox& box) {
  return min_divisor_report(omega, box, 0.0).value;
}

MinDivisorReport min_divisor_report(const FrequencyVector& omega,
                                    const LatticeBox& box, double warn_threshold) {
  if (box.dim() != omega.dim())
    throw argument_error("min_divisor: box and frequency dimensions differ");
  if (box.radius() < 1) throw argument_error("min_divisor: radius must be >= 1");
  double best = std::numeric_limits<double>::infinity();
  MultiIndex arg;
  box.for_each([&](std::span<const int> n) {
    bool zero = true;
    for (int v : n)
      if (v != 0) { zero = false; break; }
    if (zero) return;
    const double d = std::abs(inner_product(n, omega));
    if (d < best) {
      best = d;
      arg = MultiIndex(std::vector<int>(n.begin(), n.end()));
    }
  });
  return {best, arg, best < warn_threshold};
}

}  // namespace qpnls
