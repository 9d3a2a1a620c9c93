#pragma once

#include "swfam/manifold.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace swfam {

// <m,n> = { xm + yn : x,y >= 0 }; membership encodes effectivity of fiber
// multiples, its Frobenius number matches the divisibility of K.
struct NumericalSemigroup {
  i64 m = 0, n = 0;

  static NumericalSemigroup create(i64 m, i64 n) {
    if (m > n) std::swap(m, n);
    if (m < 2 || n < 2) fail(Errc::domain, "semigroup generators must be at least 2");
    if (std::gcd(m, n) != 1) fail(Errc::domain, "semigroup generators must be coprime");
    return NumericalSemigroup{m, n};
  }

  bool contains(i64 a) const {
    if (a < 0) return false;
    for (i64 x = 0; x * m <= a; ++x)
      if ((a - x * m) % n == 0) return true;
    return false;
  }

  // Largest integer outside the semigroup, by scan up to m*n.
  i64 frobenius() const {
    i64 last = -1;
    for (i64 a = 0; a <= m * n; ++a)
      if (!contains(a)) last = a;
    return last;
  }
};

// Line bundles are identified with their first Chern classes.
using LineBundleClass = LatticeVector;

enum class WallSide { plus, minus, on_wall };
enum class KChamber { plus, minus };

inline std::string to_string(WallSide w) {
  switch (w) {
    case WallSide::plus:
      return "PLUS";
    case WallSide::minus:
      return "MINUS";
    case WallSide::on_wall:
      return "ON_WALL";
  }
  fail(Errc::internal, "unreachable wall side");
}

// Evaluable chamber model for a Kahler surface with b_1 = 0, b_+ = 1.
// Degree functional normalized so that deg(t') = 1.
struct KahlerModel {
  Atom surface;
  LatticePtr lattice;
  LatticeVector K;
  RVec omega;  // deg(L) = omega^T G L
  bool psc = false;
  i64 k = 0;  // deg(K) restricted to the fiber line

  static KahlerModel for_atom(const Atom& a) {
    if (a.kind != AtomKind::e1 && a.kind != AtomKind::e1log)
      fail(Errc::domain, "Kahler model requires E1 or E1(m,n)");
    ManifoldExpr x({a});
    LatticePtr lat = x.lattice();
    if (lat->b_plus() != 1) fail(Errc::internal, "Kahler model needs b_plus = 1");
    i64 k = (a.kind == AtomKind::e1log) ? a.m * a.n - a.m - a.n : -1;
    IVec kc = fiber_line_coords();
    for (i64& v : kc) v *= k;
    RVec omega(10, Rat(0));
    omega[0] = Rat(1, 3);  // omega = h/3 has positive square and deg(t') = 1
    KahlerModel mdl{a, lat, LatticeVector(lat, std::move(kc)), std::move(omega),
                    a.kind == AtomKind::e1, k};
    if (a.kind == AtomKind::e1log) {
      if (mdl.k <= 0) fail(Errc::internal, "deg(K) must be positive for E1(m,n)");
      if (square(mdl.K) != 0) fail(Errc::internal, "K^2 must vanish for E1(m,n)");
    }
    return mdl;
  }

  // Test hook for models outside the atom set (e.g. exercising ON_WALL).
  static KahlerModel synthetic(LatticePtr lat, LatticeVector K, RVec omega, bool psc, i64 k) {
    if (lat->b_plus() != 1) fail(Errc::domain, "Kahler model needs b_plus = 1");
    return KahlerModel{Atom::e1(), std::move(lat), std::move(K), std::move(omega), psc, k};
  }
};

inline Rat degree(const KahlerModel& mdl, const LatticeVector& l) {
  if (!same_form(*mdl.lattice, *l.parent)) fail(Errc::parent_mismatch, "degree of foreign vector");
  const IMat& g = mdl.lattice->gram();
  Rat acc(0);
  for (int r = 0; r < g.rows; ++r) {
    if (mdl.omega[r] == 0) continue;
    BigInt row = 0;
    for (int c = 0; c < g.cols; ++c)
      if (g.at(r, c) != 0 && l.coords[c] != 0) row += BigInt(g.at(r, c)) * l.coords[c];
    acc += mdl.omega[r] * Rat(row);
  }
  return acc;
}

// L = a t' decomposition on the fiber line; nullopt off the line.
inline std::optional<i64> fiber_line_coefficient(const KahlerModel& mdl, const LatticeVector& l) {
  if (!same_form(*mdl.lattice, *l.parent)) fail(Errc::parent_mismatch, "vector on foreign lattice");
  IVec t = fiber_line_coords();
  if (static_cast<int>(l.coords.size()) != 10) return std::nullopt;
  if (l.is_zero()) return 0;
  if (l.coords[0] % 3 != 0) return std::nullopt;
  i64 a = l.coords[0] / 3;
  for (int i = 0; i < 10; ++i)
    if (l.coords[i] != checked_mul(a, t[i])) return std::nullopt;
  return a;
}

inline i64 riemann_roch_chi(const KahlerModel& mdl, const LatticeVector& l) {
  i64 num = square(l) - pair(mdl.K, l);
  if (num % 2 != 0) fail(Errc::domain, "Riemann-Roch parity violation");
  return 1 + num / 2;
}

// h^0(L) > 0, decided on the fiber line; unknown elsewhere.
inline std::optional<bool> h0_positive(const KahlerModel& mdl, const LatticeVector& l) {
  std::optional<i64> a = fiber_line_coefficient(mdl, l);
  if (!a) return std::nullopt;
  if (mdl.surface.kind == AtomKind::e1log)
    return NumericalSemigroup::create(mdl.surface.m, mdl.surface.n).contains(*a);
  return *a >= 0;  // multiples of the E(1) fiber are effective exactly for a >= 0
}

inline WallSide wall_side(const KahlerModel& mdl, const LatticeVector& l) {
  Rat tau = degree(mdl, mdl.K) - 2 * degree(mdl, l);
  if (tau > 0) return WallSide::plus;
  if (tau < 0) return WallSide::minus;
  return WallSide::on_wall;
}

// Chamber-wise invariant: zero when d(s_L) < 0, otherwise the exactly-one-of
// h^0/h^2 case split.
inline std::optional<i64> sw_chambered(const KahlerModel& mdl, const LatticeVector& l,
                                       KChamber chamber) {
  i64 d = square(l) - pair(mdl.K, l);
  if (d < 0) return 0;
  std::optional<bool> h0 = h0_positive(mdl, l);
  if (!h0) return std::nullopt;
  if (*h0) return chamber == KChamber::plus ? 1 : 0;
  return chamber == KChamber::plus ? 0 : -1;
}

// Invariant of the zero perturbation; requires the zero chamber to exist.
inline std::optional<i64> sw_zero_chamber(const KahlerModel& mdl, const LatticeVector& l) {
  IVec cc(l.coords.size());
  for (std::size_t i = 0; i < cc.size(); ++i)
    cc[i] = checked_add(checked_mul(2, l.coords[i]), -mdl.K.coords[i]);
  LatticeVector c(l.parent, std::move(cc));
  if (c.is_zero()) fail(Errc::chamber_undefined, "c(s_L) is torsion; zero chamber undefined");
  if (square(c) < 0) fail(Errc::chamber_undefined, "c(s_L)^2 < 0; zero chamber undefined");
  if (wall_side(mdl, l) == WallSide::on_wall)
    fail(Errc::chamber_undefined, "zero perturbation lies on the wall");
  if (mdl.psc) return 0;

  std::optional<i64> a = fiber_line_coefficient(mdl, l);
  if (!a) {
    // off the fiber line with d(s_L) >= 0: every nonvanishing class is a
    // rational multiple of K, so the invariant vanishes
    return 0;
  }
  NumericalSemigroup s = NumericalSemigroup::create(mdl.surface.m, mdl.surface.n);
  bool h0 = s.contains(*a);
  i64 k = mdl.k;
  if (h0 && 0 <= *a && 2 * *a < k) return 1;
  if (!h0 && 2 * *a > k && *a <= k) return -1;
  return 0;
}

// Fiber-line classes with nonzero zero-chamber invariant, scanning a in
// [0, max(k, bound)].
inline std::vector<std::pair<LineBundleClass, i64>> basic_classes_zero(const KahlerModel& mdl,
                                                                       i64 bound) {
  if (mdl.surface.kind != AtomKind::e1log)
    fail(Errc::precondition, "basic class scan requires an E1(m,n) model");
  std::vector<std::pair<LineBundleClass, i64>> out;
  i64 hi = std::max(mdl.k, bound);
  IVec t = fiber_line_coords();
  for (i64 a = 0; a <= hi; ++a) {
    IVec lc(10);
    for (int i = 0; i < 10; ++i) lc[i] = checked_mul(a, t[i]);
    LatticeVector l(mdl.lattice, std::move(lc));
    std::optional<i64> v = sw_zero_chamber(mdl, l);
    if (v && *v != 0) out.emplace_back(std::move(l), *v);
  }
  return out;
}

}  // namespace swfam
