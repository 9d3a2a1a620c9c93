#pragma once

#include "swfam/lattice.hpp"

#include <numeric>
#include <string>
#include <vector>

namespace swfam {

enum class AtomKind { cp2, cp2bar, s2xs2, k3, e1, e1log };

// Standard closed simply-connected building blocks.
struct Atom {
  AtomKind kind = AtomKind::cp2;
  i64 m = 0, n = 0;  // log transform multiplicities (e1log only), stored with m <= n

  static Atom cp2() { return Atom{AtomKind::cp2, 0, 0}; }
  static Atom cp2bar() { return Atom{AtomKind::cp2bar, 0, 0}; }
  static Atom s2xs2() { return Atom{AtomKind::s2xs2, 0, 0}; }
  static Atom k3() { return Atom{AtomKind::k3, 0, 0}; }
  static Atom e1() { return Atom{AtomKind::e1, 0, 0}; }
  static Atom e1log(i64 m, i64 n) {
    if (m > n) std::swap(m, n);
    if (m < 2 || n < 2) fail(Errc::domain, "log transform multiplicities must be at least 2");
    if (std::gcd(m, n) != 1) fail(Errc::domain, "log transform multiplicities must be coprime");
    return Atom{AtomKind::e1log, m, n};
  }

  bool operator==(const Atom&) const = default;
};

namespace detail {

inline IMat neg_e8_gram() {
  // Negated E8 Cartan matrix; nodes 1-3-4-5-6-7-8 in a chain, 2 attached to 4.
  IMat g(8, 8);
  for (int i = 0; i < 8; ++i) g.at(i, i) = -2;
  auto link = [&](int a, int b) {
    g.at(a - 1, b - 1) = 1;
    g.at(b - 1, a - 1) = 1;
  };
  link(1, 3);
  link(3, 4);
  link(4, 5);
  link(5, 6);
  link(6, 7);
  link(7, 8);
  link(2, 4);
  return g;
}

inline IMat hyperbolic_gram() {
  IMat g(2, 2);
  g.at(0, 1) = 1;
  g.at(1, 0) = 1;
  return g;
}

inline IMat z19_gram() {
  IMat g(10, 10);
  g.at(0, 0) = 1;
  for (int i = 1; i < 10; ++i) g.at(i, i) = -1;
  return g;
}

}  // namespace detail

inline int atom_rank(const Atom& a) {
  switch (a.kind) {
    case AtomKind::cp2:
    case AtomKind::cp2bar:
      return 1;
    case AtomKind::s2xs2:
      return 2;
    case AtomKind::k3:
      return 22;
    case AtomKind::e1:
    case AtomKind::e1log:
      return 10;
  }
  fail(Errc::internal, "unreachable atom kind");
}

inline IMat atom_gram(const Atom& a) {
  switch (a.kind) {
    case AtomKind::cp2: {
      IMat g(1, 1);
      g.at(0, 0) = 1;
      return g;
    }
    case AtomKind::cp2bar: {
      IMat g(1, 1);
      g.at(0, 0) = -1;
      return g;
    }
    case AtomKind::s2xs2:
      return detail::hyperbolic_gram();
    case AtomKind::e1:
    case AtomKind::e1log:
      return detail::z19_gram();
    case AtomKind::k3: {
      IMat g(22, 22);
      IMat e8 = detail::neg_e8_gram();
      for (int blk = 0; blk < 2; ++blk)
        for (int r = 0; r < 8; ++r)
          for (int c = 0; c < 8; ++c) g.at(blk * 8 + r, blk * 8 + c) = e8.at(r, c);
      IMat h = detail::hyperbolic_gram();
      for (int blk = 0; blk < 3; ++blk)
        for (int r = 0; r < 2; ++r)
          for (int c = 0; c < 2; ++c) g.at(16 + blk * 2 + r, 16 + blk * 2 + c) = h.at(r, c);
      return g;
    }
  }
  fail(Errc::internal, "unreachable atom kind");
}

inline std::vector<std::string> atom_labels(const Atom& a) {
  switch (a.kind) {
    case AtomKind::cp2:
      return {"h"};
    case AtomKind::cp2bar:
      return {"e"};
    case AtomKind::s2xs2:
      return {"a", "b"};
    case AtomKind::e1:
    case AtomKind::e1log: {
      std::vector<std::string> l{"h"};
      for (int i = 1; i <= 9; ++i) l.push_back("e" + std::to_string(i));
      return l;
    }
    case AtomKind::k3: {
      std::vector<std::string> l;
      for (int i = 1; i <= 8; ++i) l.push_back("a" + std::to_string(i));
      for (int i = 1; i <= 8; ++i) l.push_back("b" + std::to_string(i));
      for (int i = 1; i <= 3; ++i) {
        l.push_back("u" + std::to_string(i));
        l.push_back("v" + std::to_string(i));
      }
      return l;
    }
  }
  fail(Errc::internal, "unreachable atom kind");
}

inline std::string to_string(const Atom& a) {
  switch (a.kind) {
    case AtomKind::cp2:
      return "CP2";
    case AtomKind::cp2bar:
      return "CP2bar";
    case AtomKind::s2xs2:
      return "S2xS2";
    case AtomKind::k3:
      return "K3";
    case AtomKind::e1:
      return "E1";
    case AtomKind::e1log:
      return "E1(" + std::to_string(a.m) + "," + std::to_string(a.n) + ")";
  }
  fail(Errc::internal, "unreachable atom kind");
}

// Connected-sum expression over the atom set, with its derived lattice.
class ManifoldExpr {
 public:
  explicit ManifoldExpr(std::vector<Atom> summands) : summands_(std::move(summands)) {
    if (summands_.empty()) fail(Errc::domain, "a manifold expression needs at least one summand");
    int total = 0;
    for (const Atom& a : summands_) {
      offsets_.push_back(total);
      total += atom_rank(a);
    }
    IMat g(total, total);
    std::vector<std::string> labels;
    labels.reserve(total);
    for (std::size_t i = 0; i < summands_.size(); ++i) {
      IMat ag = atom_gram(summands_[i]);
      int off = offsets_[i];
      for (int r = 0; r < ag.rows; ++r)
        for (int c = 0; c < ag.cols; ++c) g.at(off + r, off + c) = ag.at(r, c);
      for (const std::string& l : atom_labels(summands_[i]))
        labels.push_back(std::to_string(i + 1) + ":" + l);
    }
    lattice_ = IntersectionLattice::create(std::move(g), std::move(labels));
    // Rochlin guard: a closed spin 4-manifold has signature divisible by 16.
    if (lattice_->is_even() && lattice_->sigma() % 16 != 0)
      fail(Errc::domain, "spin expression with signature not divisible by 16");
  }

  const std::vector<Atom>& summands() const { return summands_; }
  const LatticePtr& lattice() const { return lattice_; }
  int block_offset(std::size_t i) const { return offsets_[i]; }
  int block_rank(std::size_t i) const { return atom_rank(summands_[i]); }

  bool operator==(const ManifoldExpr& o) const { return summands_ == o.summands_; }

 private:
  std::vector<Atom> summands_;
  std::vector<int> offsets_;
  LatticePtr lattice_;
};

inline ManifoldExpr connected_sum(const ManifoldExpr& a, const ManifoldExpr& b) {
  std::vector<Atom> s = a.summands();
  s.insert(s.end(), b.summands().begin(), b.summands().end());
  return ManifoldExpr(std::move(s));
}

inline std::string to_string(const ManifoldExpr& x) {
  std::string out;
  const auto& s = x.summands();
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t j = i;
    while (j < s.size() && s[j] == s[i]) ++j;
    if (!out.empty()) out += " # ";
    std::size_t count = j - i;
    if (count > 1) out += std::to_string(count);
    out += to_string(s[i]);
    i = j;
  }
  return out;
}

struct ManifoldInvariants {
  int b_plus = 0;
  int b_minus = 0;
  i64 sigma = 0;
  i64 euler = 0;
  bool is_spin = false;
  bool is_psc = false;
};

inline ManifoldInvariants invariants(const ManifoldExpr& x) {
  ManifoldInvariants inv;
  inv.b_plus = x.lattice()->b_plus();
  inv.b_minus = x.lattice()->b_minus();
  inv.sigma = x.lattice()->sigma();
  inv.euler = 2 + inv.b_plus + inv.b_minus;
  inv.is_spin = x.lattice()->is_even();
  inv.is_psc = std::all_of(x.summands().begin(), x.summands().end(), [](const Atom& a) {
    return a.kind == AtomKind::cp2 || a.kind == AtomKind::cp2bar || a.kind == AtomKind::s2xs2;
  });
  return inv;
}

// A spin^c structure, identified with its characteristic vector.
struct SpinCClass {
  LatticeVector c;

  explicit SpinCClass(LatticeVector v) : c(std::move(v)) {
    if (!is_characteristic(c)) fail(Errc::domain, "vector is not characteristic");
    if (!c.parent->is_even() && c.is_zero())
      fail(Errc::domain, "zero characteristic is impossible on an odd lattice");
  }
};

inline i64 expected_dimension(const ManifoldExpr& x, const SpinCClass& s) {
  if (!same_form(*x.lattice(), *s.c.parent)) fail(Errc::parent_mismatch, "spin^c class on wrong lattice");
  i64 c2 = square(s.c);
  i64 num = c2 - x.lattice()->sigma();
  if (num % 4 != 0) fail(Errc::internal, "expected dimension is not integral");
  return num / 4 - x.lattice()->b_plus() - 1;
}

// All s with d(s) = -1 within a coordinate bound; requires b_plus = 2.
inline std::vector<SpinCClass> spinc_family(const ManifoldExpr& x, i64 bound) {
  if (x.lattice()->b_plus() != 2) fail(Errc::precondition, "spinc_family requires b_plus = 2");
  i64 sq = 10 - x.lattice()->b_minus();
  std::vector<SpinCClass> out;
  for (LatticeVector& v : enumerate_characteristics(x.lattice(), sq, bound)) {
    if (!x.lattice()->is_even() && v.is_zero()) continue;
    out.emplace_back(std::move(v));
  }
  return out;
}

inline SpinCClass connected_sum_spinc(const SpinCClass& s1, const SpinCClass& s2,
                                      const ManifoldExpr& sum) {
  IVec coords = s1.c.coords;
  coords.insert(coords.end(), s2.c.coords.begin(), s2.c.coords.end());
  if (static_cast<int>(coords.size()) != sum.lattice()->rank())
    fail(Errc::parent_mismatch, "summand ranks do not add up");
  return SpinCClass(LatticeVector(sum.lattice(), std::move(coords)));
}

// t' = 3h - e1 - ... - e9 in the Z^{1,9} chart; primitive, characteristic, square zero.
inline IVec fiber_line_coords() {
  IVec t(10, -1);
  t[0] = 3;
  return t;
}

// Concrete chart model of E(1)_{m,n}: canonical class and fiber classes as
// multiples of the primitive class t'.
struct E1LogModel {
  i64 m = 0, n = 0, k = 0;
  LatticeVector t_prime;
  LatticeVector K;
  LatticeVector F;
  LatticeVector F_m;
  LatticeVector F_n;

  static E1LogModel create(const Atom& a) {
    if (a.kind != AtomKind::e1log) fail(Errc::domain, "E1LogModel requires an E1(m,n) atom");
    ManifoldExpr x({a});
    LatticePtr lat = x.lattice();
    auto mult = [&](i64 q) {
      IVec t = fiber_line_coords();
      for (i64& v : t) v = checked_mul(v, q);
      return LatticeVector(lat, std::move(t));
    };
    E1LogModel mdl{a.m,
                   a.n,
                   a.m * a.n - a.m - a.n,
                   mult(1),
                   mult(a.m * a.n - a.m - a.n),
                   mult(a.m * a.n),
                   mult(a.n),
                   mult(a.m)};
    if (square(mdl.K) != 0) fail(Errc::internal, "canonical class must have square zero");
    if (divisibility(mdl.K) != mdl.k) fail(Errc::internal, "canonical class divisibility defect");
    if (!is_characteristic(mdl.K)) fail(Errc::internal, "canonical class must be characteristic");
    for (int i = 0; i < 10; ++i) {
      if (mdl.F.coords[i] != a.n * mdl.F_n.coords[i] || mdl.F.coords[i] != a.m * mdl.F_m.coords[i])
        fail(Errc::internal, "fiber multiplicity defect");
      i64 rhs = -mdl.F.coords[i] + (a.n - 1) * mdl.F_n.coords[i] + (a.m - 1) * mdl.F_m.coords[i];
      if (mdl.K.coords[i] != rhs) fail(Errc::internal, "canonical bundle formula defect");
    }
    return mdl;
  }
};

}  // namespace swfam
