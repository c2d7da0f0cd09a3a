#include "qpnls/combinatorics.hpp"

#include <sstream>

#include "qpnls/errors.hpp"
#include "qpnls/io.hpp"

namespace qpnls {

namespace {
int arity(int p) {
  if (p < 1) throw argument_error("p must be >= 1");
  return 2 * p + 1;
}
}  // namespace

Branch Branch::node(std::vector<Branch> children) {
  if (children.empty()) throw structure_error("Branch::node: no children");
  Branch b(Kind::node);
  b.children_ = std::move(children);
  return b;
}

bool operator==(const Branch& a, const Branch& b) {
  if (a.kind_ != b.kind_) return false;
  return a.children_ == b.children_;
}

std::string Branch::to_string() const {
  switch (kind_) {
    case Kind::leaf0: return "0";
    case Kind::leaf1: return "1";
    case Kind::node: {
      std::string s = "(";
      for (std::size_t j = 0; j < children_.size(); ++j) {
        if (j) s += ' ';
        s += children_[j].to_string();
      }
      s += ')';
      return s;
    }
  }
  return "?";
}

namespace {

// Depth constraint of a sub-branch: the linear branch fits any depth >= 1,
// the depth-1 branch exactly depth 1, a node exactly/at-least one more than
// its children admit. Empty range means the tree is not in any Gamma^(k).
struct DepthRange {
  int min = 1;
  bool exact = false;  // valid only at depth == min
  bool valid = true;
};

DepthRange depth_range(const Branch& b, int p) {
  switch (b.kind()) {
    case Branch::Kind::leaf0: return {1, false, true};
    case Branch::Kind::leaf1: return {1, true, true};
    case Branch::Kind::node: {
      if (static_cast<int>(b.children().size()) != arity(p)) return {0, false, false};
      int lo = 1;
      int exact_depth = 0;
      for (const Branch& c : b.children()) {
        DepthRange r = depth_range(c, p);
        if (!r.valid) return {0, false, false};
        if (r.exact) {
          if (exact_depth != 0 && exact_depth != r.min) return {0, false, false};
          exact_depth = r.min;
        }
        if (r.min > lo) lo = r.min;
      }
      if (exact_depth != 0) {
        if (exact_depth < lo) return {0, false, false};
        return {exact_depth + 1, true, true};
      }
      return {lo + 1, false, true};
    }
  }
  return {0, false, false};
}

}  // namespace

void validate_branch(const Branch& branch, int p) {
  DepthRange r = depth_range(branch, p);
  if (!r.valid)
    throw structure_error("malformed branch " + branch.to_string() +
                          " for p=" + fmt_int(p));
}

BigInt sigma2p(const Branch& branch, int p) {
  const int P = arity(p);
  switch (branch.kind()) {
    case Branch::Kind::leaf0: return 1;
    case Branch::Kind::leaf1: return P;
    case Branch::Kind::node: {
      if (static_cast<int>(branch.children().size()) != P)
        throw structure_error("sigma2p: node arity != 2p+1");
      BigInt s = 0;
      for (const Branch& c : branch.children()) s += sigma2p(c, p);
      return s;
    }
  }
  throw structure_error("sigma2p: unknown branch kind");
}

BigInt ell(const Branch& branch, int p) {
  const int P = arity(p);
  switch (branch.kind()) {
    case Branch::Kind::leaf0: return 0;
    case Branch::Kind::leaf1: return 1;
    case Branch::Kind::node: {
      if (static_cast<int>(branch.children().size()) != P)
        throw structure_error("ell: node arity != 2p+1");
      BigInt s = 1;
      for (const Branch& c : branch.children()) s += ell(c, p);
      return s;
    }
  }
  throw structure_error("ell: unknown branch kind");
}

BigInt dfactor(const Branch& branch, int p) {
  const int P = arity(p);
  switch (branch.kind()) {
    case Branch::Kind::leaf0:
    case Branch::Kind::leaf1: return 1;
    case Branch::Kind::node: {
      if (static_cast<int>(branch.children().size()) != P)
        throw structure_error("dfactor: node arity != 2p+1");
      BigInt d = ell(branch, p);
      for (const Branch& c : branch.children()) d *= dfactor(c, p);
      return d;
    }
  }
  throw structure_error("dfactor: unknown branch kind");
}

BigInt term_count(int k, int p) {
  if (k < 1) throw argument_error("term_count: k must be >= 1");
  const int P = arity(p);
  BigInt n = 2;
  for (int i = 2; i <= k; ++i) {
    BigInt prev = n;
    n = 1;
    BigInt pw = 1;
    for (int j = 0; j < P; ++j) pw *= prev;
    n += pw;
  }
  return n;
}

struct BranchStream::Impl {
  int k;
  int p;
  int P;
  std::uint64_t budget;
  std::uint64_t emitted = 0;
  bool truncated = false;
  BigInt total;                    // |Gamma^(k)|
  std::vector<Branch> child_universe;  // Gamma^(k-1) prefix, k >= 2 only

  Impl(int k_, int p_, std::uint64_t budget_) : k(k_), p(p_), P(arity(p_)), budget(budget_) {
    if (k < 1) throw argument_error("BranchStream: k must be >= 1");
    total = term_count(k, p);
    if (k >= 2) {
      // Tuple #t references child indices that are digits of t in base
      // N_{k-1}; every digit of t is <= t, so a prefix of length
      // min(N_{k-1}, budget) of the child enumeration suffices.
      BranchStream children(k - 1, p, budget);
      while (auto c = children.next()) child_universe.push_back(std::move(*c));
    }
  }

  std::optional<Branch> make(std::uint64_t i) const {
    if (i == 0) return Branch::leaf0();
    if (k == 1) return i == 1 ? std::optional<Branch>(Branch::leaf1()) : std::nullopt;
    // Mixed-radix digits of (i-1), base |Gamma^(k-1)|, most significant
    // digit first = first child slot: lexicographic tuple order.
    BigInt t = i - 1;
    const BigInt base = term_count(k - 1, p);
    std::vector<BigInt> digits(static_cast<std::size_t>(P));
    for (int j = P - 1; j >= 0; --j) {
      digits[static_cast<std::size_t>(j)] = t % base;
      t /= base;
    }
    std::vector<Branch> children;
    children.reserve(static_cast<std::size_t>(P));
    for (const BigInt& d : digits) {
      const auto di = d.convert_to<std::uint64_t>();
      if (di >= child_universe.size())
        throw capacity_error("BranchStream: child index beyond materialized prefix");
      children.push_back(child_universe[di]);
    }
    return Branch::node(std::move(children));
  }
};

BranchStream::BranchStream(int k, int p, std::uint64_t budget)
    : impl_(std::make_unique<Impl>(k, p, budget)) {}
BranchStream::~BranchStream() = default;
BranchStream::BranchStream(BranchStream&&) noexcept = default;
BranchStream& BranchStream::operator=(BranchStream&&) noexcept = default;

std::optional<Branch> BranchStream::next() {
  if (impl_->emitted >= impl_->budget) {
    impl_->truncated = BigInt(impl_->emitted) < impl_->total;
    return std::nullopt;
  }
  if (BigInt(impl_->emitted) >= impl_->total) return std::nullopt;
  auto b = impl_->make(impl_->emitted);
  if (b) ++impl_->emitted;
  return b;
}

bool BranchStream::truncated() const { return impl_->truncated; }
std::uint64_t BranchStream::produced() const { return impl_->emitted; }

std::vector<Branch> enumerate_branches(int k, int p, std::uint64_t budget, bool* truncated) {
  BranchStream s(k, p, budget);
  std::vector<Branch> out;
  while (auto b = s.next()) out.push_back(std::move(*b));
  if (truncated) *truncated = s.truncated();
  return out;
}

namespace {

void collect_slots(const Branch& b, int p, int sign, bool conj,
                   std::vector<LeafSlot>& out) {
  const int P = arity(p);
  switch (b.kind()) {
    case Branch::Kind::leaf0:
      out.push_back({0, sign, conj});
      return;
    case Branch::Kind::leaf1:
      for (int j = 1; j <= P; ++j) {
        const bool odd_slot = ((j - 1) % 2 == 0);
        out.push_back({0, odd_slot ? sign : -sign,
                       ((j - 1) % 2 == 1) != conj});
      }
      return;
    case Branch::Kind::node:
      if (static_cast<int>(b.children().size()) != P)
        throw structure_error("leaf_slots: node arity != 2p+1");
      for (int j = 1; j <= P; ++j) {
        const int child_sign = ((j - 1) % 2 == 0) ? sign : -sign;
        const bool child_conj = ((j - 1) % 2 == 1) != conj;
        collect_slots(b.children()[static_cast<std::size_t>(j - 1)], p,
                      child_sign, child_conj, out);
      }
      return;
  }
  throw structure_error("leaf_slots: unknown branch kind");
}

}  // namespace

std::vector<LeafSlot> leaf_slots(const Branch& branch, int p) {
  std::vector<LeafSlot> out;
  collect_slots(branch, p, +1, false, out);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].position = static_cast<int>(i + 1);
  return out;
}

MultiIndex cas(const std::vector<MultiIndex>& values,
               const std::vector<LeafSlot>& slots) {
  if (values.size() != slots.size())
    throw argument_error("cas: values/slots length mismatch (" +
                         fmt_int(static_cast<std::int64_t>(values.size())) + " vs " +
                         fmt_int(static_cast<std::int64_t>(slots.size())) + ")");
  if (values.empty()) throw argument_error("cas: empty input");
  MultiIndex acc = slots[0].sign > 0 ? values[0] : -values[0];
  for (std::size_t i = 1; i < values.size(); ++i)
    acc = acc + (slots[i].sign > 0 ? values[i] : -values[i]);
  return acc;
}

GalSumExact gal_sum_exact(int k, int p, const BigRat& x, std::uint64_t budget) {
  if (x < 0) throw argument_error("gal_sum: x must be >= 0");
  BranchStream s(k, p, budget);
  BigRat sum = 0;
  while (auto b = s.next()) {
    const BigInt l = ell(*b, p);
    BigRat pw = 1;
    for (BigInt i = 0; i < l; ++i) pw *= x;
    sum += pw / BigRat(dfactor(*b, p));
  }
  return {sum, !s.truncated()};
}

GalSum gal_sum(int k, int p, double x, std::uint64_t budget) {
  GalSumExact e = gal_sum_exact(k, p, BigRat(x), budget);
  return {e.value.convert_to<double>(), e.exact};
}

namespace {

struct DotBuilder {
  std::ostringstream body;
  std::vector<std::vector<std::string>> levels;
  int next_id = 0;
  int leaf_no = 0;
  bool leaf0_inside_node = false;

  std::string fresh(int level) {
    std::string id = "v" + fmt_int(next_id++);
    if (static_cast<int>(levels.size()) <= level) levels.resize(static_cast<std::size_t>(level) + 1);
    levels[static_cast<std::size_t>(level)].push_back(id);
    return id;
  }

  std::string leaf(int level, bool conjugated, bool black) {
    ++leaf_no;
    std::string id = fresh(level);
    const char* color = black ? "black" : (conjugated ? "green" : "red");
    const char* font = black ? "white" : "black";
    body << "  " << id << " [label=\"m" << leaf_no << "\", fillcolor=" << color
         << ", fontcolor=" << font << "];\n";
    return id;
  }

  std::string inner(int level, bool conjugated) {
    std::string id = fresh(level);
    body << "  " << id << " [label=\"\", fillcolor=" << (conjugated ? "green" : "red")
         << ", width=0.18];\n";
    return id;
  }

  void edge(const std::string& a, const std::string& b) {
    body << "  " << a << " -> " << b << ";\n";
  }
};

// Renders the sub-branch as one point at `level` plus its descendants.
void render_sub(DotBuilder& d, const Branch& b, int p, int level,
                const std::string& parent, int sign, bool conj) {
  const int P = arity(p);
  switch (b.kind()) {
    case Branch::Kind::leaf0: {
      // A linear sub-branch inside a node: one point with a single leaf
      // child, carrying the parity color of its slot (Figure-2 convention).
      d.leaf0_inside_node = true;
      std::string point = d.inner(level, conj);
      d.edge(parent, point);
      std::string lf = d.leaf(level + 1, conj, false);
      d.edge(point, lf);
      (void)sign;
      return;
    }
    case Branch::Kind::leaf1: {
      std::string point = d.inner(level, conj);
      d.edge(parent, point);
      for (int j = 1; j <= P; ++j) {
        const bool c = ((j - 1) % 2 == 1) != conj;
        std::string lf = d.leaf(level + 1, c, false);
        d.edge(point, lf);
      }
      return;
    }
    case Branch::Kind::node: {
      if (static_cast<int>(b.children().size()) != P)
        throw structure_error("render_tree_dot: node arity != 2p+1");
      std::string point = d.inner(level, conj);
      d.edge(parent, point);
      for (int j = 1; j <= P; ++j) {
        const int cs = ((j - 1) % 2 == 0) ? sign : -sign;
        const bool cc = ((j - 1) % 2 == 1) != conj;
        render_sub(d, b.children()[static_cast<std::size_t>(j - 1)], p, level + 1,
                   point, cs, cc);
      }
      return;
    }
  }
}

}  // namespace

std::string render_tree_dot(const Branch& branch, int p) {
  validate_branch(branch, p);
  const int P = arity(p);
  DotBuilder d;
  std::string root = d.fresh(0);
  d.body << "  " << root << " [label=\"n\", fillcolor=black, fontcolor=white];\n";

  switch (branch.kind()) {
    case Branch::Kind::leaf0: {
      // Linear branch of the whole tree: root plus one black leaf, no
      // intermediate points.
      std::string lf = d.leaf(1, false, true);
      d.edge(root, lf);
      break;
    }
    case Branch::Kind::leaf1: {
      for (int j = 1; j <= P; ++j) {
        std::string lf = d.leaf(1, (j - 1) % 2 == 1, false);
        d.edge(root, lf);
      }
      break;
    }
    case Branch::Kind::node: {
      for (int j = 1; j <= P; ++j) {
        const int cs = ((j - 1) % 2 == 0) ? +1 : -1;
        const bool cc = ((j - 1) % 2 == 1);
        render_sub(d, branch.children()[static_cast<std::size_t>(j - 1)], p, 1, root,
                   cs, cc);
      }
      break;
    }
  }

  std::ostringstream out;
  out << "digraph branch {\n";
  out << "  // branch " << branch.to_string() << ", P=" << P << "\n";
  if (d.leaf0_inside_node)
    out << "  // note: linear sub-branches below the root are drawn with the\n"
           "  // parity color of their slot; only the whole-tree linear branch\n"
           "  // has a black leaf (the figures leave mixed depths unspecified)\n";
  out << "  rankdir=TB;\n";
  out << "  node [shape=circle, style=filled, fontsize=10];\n";
  out << d.body.str();
  for (std::size_t lvl = 0; lvl < d.levels.size(); ++lvl) {
    out << "  { rank=same;";
    for (const auto& id : d.levels[lvl]) out << " " << id << ";";
    out << " }\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace qpnls
