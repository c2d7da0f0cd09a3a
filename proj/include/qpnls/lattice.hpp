#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace qpnls {

// A point n in Z^nu. Entries are small signed integers; nu >= 2 is enforced
// by FrequencyVector/box constructors rather than here, since intermediate
// arithmetic may pass through any dimension.
struct MultiIndex {
  std::vector<int> e;

  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> entries) : e(std::move(entries)) {}
  MultiIndex(std::initializer_list<int> entries) : e(entries) {}

  int dim() const { return static_cast<int>(e.size()); }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
};

MultiIndex operator+(const MultiIndex& a, const MultiIndex& b);
MultiIndex operator-(const MultiIndex& a, const MultiIndex& b);
MultiIndex operator-(const MultiIndex& a);
MultiIndex operator*(int s, const MultiIndex& a);

// |n| = sum |n_j|  (the ell^1 norm used throughout).
std::int64_t l1_norm(const MultiIndex& n);
std::int64_t l1_norm(std::span<const int> n);

// The base frequency vector omega; entries finite, nonzero, |omega| > 0.
class FrequencyVector {
public:
  explicit FrequencyVector(std::vector<double> entries);

  int dim() const { return static_cast<int>(entries_.size()); }
  const std::vector<double>& entries() const { return entries_; }
  double operator[](int j) const { return entries_[static_cast<std::size_t>(j)]; }
  double l1() const { return l1_; }

private:
  std::vector<double> entries_;
  double l1_;
};

// <n> = n . omega, the physical frequency of lattice mode n.
double inner_product(const MultiIndex& n, const FrequencyVector& omega);
double inner_product(std::span<const int> n, const FrequencyVector& omega);

// Truncation of the lattice to max_j |n_j| <= N. Enumeration is fixed
// lexicographic (from (-N,..,-N) to (N,..,N)) so all outputs are
// byte-reproducible.
class LatticeBox {
public:
  LatticeBox(int dimension, int radius);

  int dim() const { return nu_; }
  int radius() const { return radius_; }
  int side() const { return 2 * radius_ + 1; }
  std::size_t count() const { return count_; }

  bool contains(std::span<const int> n) const;
  bool contains(const MultiIndex& n) const { return contains(std::span<const int>(n.e)); }

  // Flat lexicographic offset; n must lie inside the box.
  std::size_t flat_index(std::span<const int> n) const;
  std::size_t flat_index(const MultiIndex& n) const { return flat_index(std::span<const int>(n.e)); }
  MultiIndex index_at(std::size_t flat) const;

  // Materialized enumeration; rejects boxes larger than `budget` entries.
  std::vector<MultiIndex> indices(std::size_t budget = kDefaultBudget) const;

  // Coordinates of every box point, row-major, count()*dim() ints.
  std::vector<int> coords_table() const;

  // Visit every index without allocating; f receives span<const int>.
  template <typename F>
  void for_each(F&& f) const {
    std::vector<int> x(static_cast<std::size_t>(nu_), -radius_);
    while (true) {
      f(std::span<const int>(x));
      int d = nu_ - 1;
      while (d >= 0 && x[static_cast<std::size_t>(d)] == radius_) {
        x[static_cast<std::size_t>(d)] = -radius_;
        --d;
      }
      if (d < 0) break;
      ++x[static_cast<std::size_t>(d)];
    }
  }

  friend bool operator==(const LatticeBox&, const LatticeBox&) = default;

  static constexpr std::size_t kDefaultBudget = 50'000'000;

private:
  int nu_;
  int radius_;
  std::size_t count_;
};

// Non-resonance diagnostic: min over nonzero n in the box of |<n>|.
// Rational independence of omega makes this positive on any finite box;
// numerically it is reported, never enforced.
struct MinDivisorReport {
  double value;
  MultiIndex argmin;
  bool below_threshold;
};

double min_divisor(const FrequencyVector& omega, const LatticeBox& box);
MinDivisorReport min_divisor_report(const FrequencyVector& omega,
                                    const LatticeBox& box, double warn_threshold);

}  // namespace qpnls
