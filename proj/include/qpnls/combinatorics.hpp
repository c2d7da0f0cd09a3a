#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qpnls/lattice.hpp"

namespace qpnls {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

// A branch gamma^(k): either the linear branch 0 (valid at every depth),
// the depth-1 branch 1, or a node carrying exactly P = 2p+1 sub-branches
// of depth k-1.
class Branch {
public:
  enum class Kind { leaf0, leaf1, node };

  static Branch leaf0() { return Branch(Kind::leaf0); }
  static Branch leaf1() { return Branch(Kind::leaf1); }
  static Branch node(std::vector<Branch> children);

  Kind kind() const { return kind_; }
  const std::vector<Branch>& children() const { return children_; }

  friend bool operator==(const Branch& a, const Branch& b);

  // Compact textual form: "0", "1", "(b1 b2 ... bP)". Deterministic; used
  // in artifacts and test diagnostics.
  std::string to_string() const;

private:
  explicit Branch(Kind k) : kind_(k) {}
  Kind kind_;
  std::vector<Branch> children_;
};

// Throws structure_error unless the branch lies in Gamma^(k) for some k >= 1
// with node arity P = 2p+1. (The linear branch belongs to every depth; the
// depth-1 branch only to depth 1, which constrains how it may nest.)
void validate_branch(const Branch& branch, int p);

// First counting function, scaled by 2p to stay in exact integers:
// 2p*sigma counts initial-data leaves. Always odd.
BigInt sigma2p(const Branch& branch, int p);

// Second counting function: ell counts nested integrations.
// Satisfies sigma2p = 2p*ell + 1 exactly.
BigInt ell(const Branch& branch, int p);

// Product of nested integration depths; the denominator in the
// t^ell / D bound on the iterated integrals.
BigInt dfactor(const Branch& branch, int p);

// N_1 = 2, N_k = 1 + N_{k-1}^P.
BigInt term_count(int k, int p);

// Lazily yields Gamma^(k) in deterministic order: the linear branch first,
// then node child-tuples lexicographically in the child enumeration order.
// Stops after `budget` branches and flags truncation.
class BranchStream {
public:
  BranchStream(int k, int p, std::uint64_t budget);
  ~BranchStream();
  BranchStream(BranchStream&&) noexcept;
  BranchStream& operator=(BranchStream&&) noexcept;

  std::optional<Branch> next();
  bool truncated() const;       // budget hit with branches remaining
  std::uint64_t produced() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Convenience: materialize the stream.
std::vector<Branch> enumerate_branches(int k, int p, std::uint64_t budget,
                                       bool* truncated = nullptr);

// One leaf of the flattened branch: slot j carries sign (-1)^(j-1) and the
// conjugation label [j-1]. Computed by recursive propagation (child block
// signs multiply, conjugation labels add mod 2); the flat parity rule is an
// exact consequence and is checked by the test suite.
struct LeafSlot {
  int position;     // 1-based
  int sign;         // +1 or -1
  bool conjugated;  // true on even positions

  friend bool operator==(const LeafSlot&, const LeafSlot&) = default;
};

std::vector<LeafSlot> leaf_slots(const Branch& branch, int p);

// Combinatorial alternating sum: sum_j sign_j * m_j.
MultiIndex cas(const std::vector<MultiIndex>& values,
               const std::vector<LeafSlot>& slots);

// sum over Gamma^(k) of x^ell(gamma) / D(gamma), in exact rationals.
// When the budget truncates the stream the value is a lower bound
// (all terms are nonnegative for x >= 0) and exact=false.
struct GalSumExact {
  BigRat value;
  bool exact;
};
GalSumExact gal_sum_exact(int k, int p, const BigRat& x, std::uint64_t budget);

struct GalSum {
  double value;
  bool exact;
};
GalSum gal_sum(int k, int p, double x, std::uint64_t budget);

// DOT rendering of a branch, following the diagram conventions: root point
// n at level 0; leaves colored red (plain factor) / green (conjugated
// factor); the whole-tree linear branch renders as a single black leaf.
std::string render_tree_dot(const Branch& branch, int p);

}  // namespace qpnls
