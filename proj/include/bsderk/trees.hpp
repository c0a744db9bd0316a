#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <cctype>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace bsderk {

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct ParseError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Labelled node tree with ordered children. Two LNTrees that differ only in
/// the order of siblings describe the same unordered tree.
struct LNTree {
  unsigned label = 0;
  std::vector<LNTree> children;

  friend bool operator==(const LNTree&, const LNTree&) = default;
};

/// Unordered labelled node tree stored in canonical form: children are kept
/// sorted by the canonical key (order, label, child count, children).
class ULNTree {
 public:
  ULNTree() = default;

  explicit ULNTree(const LNTree& t) : label_(t.label) {
    children_.reserve(t.children.size());
    for (const auto& c : t.children) children_.emplace_back(c);
    finish();
  }

  static ULNTree leaf(unsigned k) {
    ULNTree t;
    t.label_ = k;
    t.order_ = k + 1;
    return t;
  }

  static ULNTree graft(std::vector<ULNTree> children, unsigned k) {
    ULNTree t;
    t.label_ = k;
    t.children_ = std::move(children);
    t.finish();
    return t;
  }

  unsigned label() const { return label_; }
  const std::vector<ULNTree>& children() const { return children_; }
  bool is_leaf() const { return children_.empty(); }

  /// |Υ| = node count plus label sum.
  unsigned order() const { return order_; }

  LNTree representative() const {
    LNTree t{label_, {}};
    for (const auto& c : children_) t.children.push_back(c.representative());
    return t;
  }

  friend bool operator==(const ULNTree& x, const ULNTree& y) {
    return (x <=> y) == 0;
  }

  friend std::strong_ordering operator<=>(const ULNTree& x, const ULNTree& y) {
    if (auto o = x.order_ <=> y.order_; o != 0) return o;
    if (auto o = x.label_ <=> y.label_; o != 0) return o;
    if (auto o = x.children_.size() <=> y.children_.size(); o != 0) return o;
    for (std::size_t p = 0; p < x.children_.size(); ++p)
      if (auto o = x.children_[p] <=> y.children_[p]; o != 0) return o;
    return std::strong_ordering::equal;
  }

 private:
  void finish() {
    std::sort(children_.begin(), children_.end());
    order_ = 1 + label_;
    for (const auto& c : children_) order_ += c.order_;
  }

  unsigned label_ = 0;
  unsigned order_ = 1;
  std::vector<ULNTree> children_;
};

inline ULNTree leaf(unsigned k) { return ULNTree::leaf(k); }
inline ULNTree graft(std::vector<ULNTree> children, unsigned k) {
  return ULNTree::graft(std::move(children), k);
}
inline ULNTree canonicalize(const LNTree& t) { return ULNTree(t); }

inline unsigned order(const ULNTree& t) { return t.order(); }

namespace detail {

inline std::uint64_t factorial(unsigned n) {
  std::uint64_t r = 1;
  for (unsigned q = 2; q <= n; ++q) r *= q;
  return r;
}

/// Product of multiplicity! over runs of identical children (children are sorted).
inline std::uint64_t multiplicity_factor(const std::vector<ULNTree>& ch) {
  std::uint64_t r = 1;
  std::size_t p = 0;
  while (p < ch.size()) {
    std::size_t q = p;
    while (q < ch.size() && ch[q] == ch[p]) ++q;
    r *= factorial(static_cast<unsigned>(q - p));
    p = q;
  }
  return r;
}

}  // namespace detail

/// Nesting depth; a single node has depth 1.
inline unsigned nesting_depth(const ULNTree& t) {
  unsigned d = 0;
  for (const auto& c : t.children()) d = std::max(d, nesting_depth(c));
  return d + 1;
}

inline std::uint64_t symmetry(const ULNTree& t) {
  std::uint64_t s = detail::multiplicity_factor(t.children());
  for (const auto& c : t.children()) s *= symmetry(c);
  return s;
}

inline std::uint64_t tree_factorial(const ULNTree& t) {
  std::uint64_t g = detail::factorial(t.label()) *
                    detail::factorial(static_cast<unsigned>(t.children().size()));
  for (const auto& c : t.children()) g *= tree_factorial(c);
  return g;
}

/// Number of distinct ordered LN-trees that canonicalize to t.
inline std::uint64_t alpha(const ULNTree& t) {
  std::uint64_t a = detail::factorial(static_cast<unsigned>(t.children().size())) /
                    detail::multiplicity_factor(t.children());
  for (const auto& c : t.children()) a *= alpha(c);
  return a;
}

/// True when b occurs as a child of t or, recursively, of one of its children.
inline bool has_branch(const ULNTree& t, const ULNTree& b) {
  for (const auto& c : t.children())
    if (c == b || has_branch(c, b)) return true;
  return false;
}

// ---------------------------------------------------------------- notation

inline std::string to_notation(const ULNTree& t) {
  std::string s = "[";
  if (t.is_leaf()) {
    s += ' ';
  } else {
    for (std::size_t p = 0; p < t.children().size(); ++p) {
      if (p) s += ' ';
      s += to_notation(t.children()[p]);
    }
  }
  s += "]_" + std::to_string(t.label());
  return s;
}

namespace detail {

struct NotationParser {
  std::string_view src;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("tree notation: " + what + " at offset " + std::to_string(pos) +
                     " in \"" + std::string(src) + "\"");
  }
  void skip_ws() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
  }
  LNTree node(int depth) {
    if (depth > 256) fail("nesting too deep");
    skip_ws();
    if (pos >= src.size() || src[pos] != '[') fail("expected '['");
    ++pos;
    LNTree t;
    for (;;) {
      skip_ws();
      if (pos >= src.size()) fail("unterminated '['");
      if (src[pos] == ']') break;
      t.children.push_back(node(depth + 1));
    }
    ++pos;
    if (pos >= src.size() || src[pos] != '_') fail("expected '_<label>' after ']'");
    ++pos;
    std::size_t start = pos;
    unsigned long v = 0;
    while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) {
      v = v * 10 + static_cast<unsigned>(src[pos] - '0');
      if (v > 1000000) fail("label too large");
      ++pos;
    }
    if (pos == start) fail("expected label digits");
    t.label = static_cast<unsigned>(v);
    return t;
  }
};

}  // namespace detail

inline LNTree parse_ln_notation(std::string_view s) {
  detail::NotationParser p{s};
  LNTree t = p.node(0);
  p.skip_ws();
  if (p.pos != s.size()) p.fail("trailing characters");
  return t;
}

inline ULNTree parse_notation(std::string_view s) { return canonicalize(parse_ln_notation(s)); }

// ---------------------------------------------------------------- enumeration

struct TreeSet {
  unsigned max_order = 0;
  std::vector<ULNTree> trees;

  std::size_t size() const { return trees.size(); }
};

inline constexpr unsigned kMaxEnumerationOrder = 8;

namespace detail {

// Append every non-decreasing multiset drawn from pool[first..] whose orders sum to budget.
inline void multisets(const std::vector<ULNTree>& pool, std::size_t first, unsigned budget,
                      std::vector<ULNTree>& current, unsigned label,
                      std::vector<ULNTree>& out) {
  if (budget == 0) {
    out.push_back(graft(current, label));
    return;
  }
  for (std::size_t p = first; p < pool.size(); ++p) {
    if (pool[p].order() > budget) continue;
    current.push_back(pool[p]);
    multisets(pool, p, budget - pool[p].order(), current, label, out);
    current.pop_back();
  }
}

}  // namespace detail

/// All ULN-trees with 1 <= |Υ| <= r, canonically ordered.
inline TreeSet enumerate_trees(unsigned r) {
  if (r > kMaxEnumerationOrder)
    throw ResourceError("tree enumeration is limited to order " +
                        std::to_string(kMaxEnumerationOrder) + ", got " + std::to_string(r));
  TreeSet set{r, {}};
  std::vector<std::vector<ULNTree>> by_order(r + 1);
  for (unsigned o = 1; o <= r; ++o) {
    std::vector<ULNTree> pool;
    for (unsigned q = 1; q < o; ++q)
      pool.insert(pool.end(), by_order[q].begin(), by_order[q].end());
    std::sort(pool.begin(), pool.end());
    std::vector<ULNTree> cur;
    for (unsigned k = 0; k + 1 <= o; ++k)
      detail::multisets(pool, 0, o - 1 - k, cur, k, by_order[o]);
    std::sort(by_order[o].begin(), by_order[o].end());
    set.trees.insert(set.trees.end(), by_order[o].begin(), by_order[o].end());
  }
  return set;
}

/// Trees of T_r other than [ ]_0 that do not carry [ ]_0 as a branch.
inline TreeSet enumerate_trees_minus(unsigned r) {
  TreeSet all = enumerate_trees(r);
  const ULNTree l0 = leaf(0);
  TreeSet out{r, {}};
  for (auto& t : all.trees)
    if (t != l0 && !has_branch(t, l0)) out.trees.push_back(std::move(t));
  return out;
}

inline nlohmann::json to_json(const ULNTree& t) {
  return nlohmann::json{{"notation", to_notation(t)},
                        {"order", t.order()},
                        {"depth", nesting_depth(t)},
                        {"symmetry", symmetry(t)},
                        {"factorial", tree_factorial(t)},
                        {"alpha", alpha(t)}};
}

inline nlohmann::json to_json(const TreeSet& s) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& t : s.trees) rows.push_back(to_json(t));
  return nlohmann::json{{"max_order", s.max_order}, {"count", s.size()}, {"trees", rows}};
}

}  // namespace bsderk
