#pragma once

#include "swfam/families.hpp"

#include <string>
#include <utility>
#include <vector>

namespace swfam {

// Chart presentation of 2CP2 # 10CP2bar used by every t_d construction:
// CP2 # 9 CP2bar # S2xS2, whose lattice is Z^{1,9} + H.
inline ManifoldExpr td_chart() {
  std::vector<Atom> atoms{Atom::cp2()};
  for (int i = 0; i < 9; ++i) atoms.push_back(Atom::cp2bar());
  atoms.push_back(Atom::s2xs2());
  return ManifoldExpr(std::move(atoms));
}

// The Torelli family of the main construction: f_0 collapses through the PSC
// presentation, f_d through the E1(2,d+2) presentation, t_d = f_d o f_0.
struct TdFamily {
  i64 d = 0;
  ManifoldExpr X;
  LatticeAutomorphism psi_d;
  DiffeoExpr f0;
  DiffeoExpr fd;
  DiffeoExpr td;
  SpinCClass sd;
};

inline TdFamily build_td(i64 d) {
  if (d < 1 || d % 2 == 0) fail(Errc::domain, "t_d requires odd d >= 1");
  ManifoldExpr x = td_chart();

  std::vector<Atom> psc_atoms{Atom::cp2()};
  for (int i = 0; i < 9; ++i) psc_atoms.push_back(Atom::cp2bar());
  ManifoldExpr x0(std::move(psc_atoms));
  ManifoldExpr s2(std::vector<Atom>{Atom::s2xs2()});
  ManifoldExpr xd_surface(std::vector<Atom>{Atom::e1log(2, d + 2)});

  DiffeoExpr f0 = DiffeoExpr::connected_sum(DiffeoExpr::identity(x0), DiffeoExpr::rho(s2, 1));
  DiffeoExpr fd_inner =
      DiffeoExpr::connected_sum(DiffeoExpr::identity(xd_surface), DiffeoExpr::rho(s2, 1));
  LatticeAutomorphism psi =
      make_automorphism(x.lattice(), IMat::identity(x.lattice()->rank()));
  DiffeoExpr fd = DiffeoExpr::relabel(x, psi, fd_inner, "psi" + std::to_string(d));
  DiffeoExpr td = DiffeoExpr::compose(fd, f0);

  // c(s_d) = -d t' in the fixed chart: the canonical class convention
  // c(s_can) = -K transported through the identity chart map.
  IVec c(12, 0);
  IVec t = fiber_line_coords();
  for (int i = 0; i < 10; ++i) c[i] = checked_mul(-d, t[i]);
  SpinCClass sd{LatticeVector(x.lattice(), std::move(c))};

  TdFamily fam{d, x, psi, f0, fd, td, sd};
  if (!is_torelli(fam.td)) fail(Errc::internal, "t_d must be Torelli");
  if (divisibility(fam.sd.c) != d) fail(Errc::internal, "c(s_d) divisibility defect");
  if (square(fam.sd.c) != 0) fail(Errc::internal, "c(s_d) must have square zero");
  if (!preserves(fam.f0, fam.sd) || !preserves(fam.fd, fam.sd))
    fail(Errc::internal, "t_d factors must preserve s_d");
  return fam;
}

// Matrix of certified mod-2 invariants: row d' carries the diffeomorphism
// t_{d'}, column d the spin^c class s_d.
struct SupportMatrix {
  i64 D = 0;
  std::vector<i64> indices;  // odd, 1..2D-1
  std::vector<std::vector<CertifiedValue>> entries;
};

inline SupportMatrix evaluate_matrix(i64 D, const EvalOrder& order = EvalOrder::standard()) {
  if (D < 1) fail(Errc::domain, "matrix size must be at least 1");
  std::vector<TdFamily> fams;
  fams.reserve(static_cast<std::size_t>(D));
  for (i64 r = 0; r < D; ++r) fams.push_back(build_td(2 * r + 1));
  SupportMatrix m;
  m.D = D;
  for (i64 r = 0; r < D; ++r) m.indices.push_back(2 * r + 1);
  const ManifoldExpr& x = fams[0].X;
  for (i64 r = 0; r < D; ++r) {
    std::vector<CertifiedValue> row;
    row.reserve(static_cast<std::size_t>(D));
    for (i64 c = 0; c < D; ++c)
      row.push_back(sw_family(x, fams[c].sd, fams[r].td, Chamber::zero, order));
    m.entries.push_back(std::move(row));
  }
  return m;
}

// Refuses (hard error) unless the matrix is certified lower-triangular with
// unit diagonal over F2.
inline void verify_support_matrix(const SupportMatrix& m) {
  for (std::size_t r = 0; r < m.entries.size(); ++r) {
    for (std::size_t c = 0; c < m.entries[r].size(); ++c) {
      const CertifiedValue& e = m.entries[r][c];
      if (r == c) {
        if (e.is_unknown()) fail(Errc::precondition, "diagonal entry is Unknown");
        if (((e.value % 2) + 2) % 2 != 1) fail(Errc::precondition, "diagonal entry is not 1 mod 2");
      } else if (c > r) {
        if (e.is_unknown()) fail(Errc::precondition, "upper entry is Unknown");
        if (((e.value % 2) + 2) % 2 != 0) fail(Errc::precondition, "upper entry is not 0 mod 2");
      }
    }
  }
}

struct RankCertificate {
  i64 rank_lower_bound = 0;
  bool triangular = false;
  SupportMatrix witness;
};

inline RankCertificate rank_certificate(i64 D) {
  SupportMatrix m = evaluate_matrix(D);
  verify_support_matrix(m);
  return RankCertificate{D, true, std::move(m)};
}

// Tower obtained by blowing up: X gains CP2bar summands, s gains classes
// kappa with c(kappa) = -e, the diffeomorphism is extended by the identity.
struct LiftedFamily {
  i64 d = 0;
  i64 times = 0;
  ManifoldExpr X;
  SpinCClass sd;
  DiffeoExpr td;
};

inline LiftedFamily blowup_lift(const TdFamily& base, i64 times) {
  if (times < 1) fail(Errc::domain, "lift at least once");
  ManifoldExpr x = base.X;
  SpinCClass s = base.sd;
  DiffeoExpr f = base.td;
  ManifoldExpr bar(std::vector<Atom>{Atom::cp2bar()});
  for (i64 i = 0; i < times; ++i) {
    ManifoldExpr x2 = connected_sum(x, bar);
    SpinCClass kappa{LatticeVector(bar.lattice(), IVec{-1})};
    s = connected_sum_spinc(s, kappa, x2);
    f = DiffeoExpr::connected_sum(f, DiffeoExpr::identity(bar));
    x = std::move(x2);
    if (expected_dimension(x, s) != -1) fail(Errc::internal, "lift broke d(s) = -1");
  }
  return LiftedFamily{base.d, times, std::move(x), std::move(s), std::move(f)};
}

// Divisibility class O_q: square-zero characteristics of divisibility q.
struct OqClass {
  i64 q = 0;

  bool contains(const SpinCClass& s) const {
    return square(s.c) == 0 && divisibility(s.c) == q;
  }
};

struct OqSummand {
  IVec c;
  CertifiedValue value;
};

struct OqResult {
  CertifiedValue total;
  std::vector<OqSummand> summands;
  bool bound_captures_support = false;
};

namespace detail {

inline void collect_e1log_k(const DiffeoNode& n, i64& kmax) {
  for (const Atom& a : n.source.summands())
    if (a.kind == AtomKind::e1log) kmax = std::max(kmax, a.m * a.n - a.m - a.n);
  if (n.a) collect_e1log_k(*n.a, kmax);
  if (n.b) collect_e1log_k(*n.b, kmax);
}

}  // namespace detail

// Sum of zero-chamber invariants over O_q within the enumeration bound.
// Any summand outside the engine's certified range makes the total Unknown.
inline OqResult sw_oq(const DiffeoExpr& f, i64 q, i64 bound,
                      const EvalOrder& order = EvalOrder::standard()) {
  if (q < 1 || q % 2 == 0) fail(Errc::domain, "divisibility class requires odd q >= 1");
  if (sgn_plus_of(f) != 1) fail(Errc::precondition, "the orbit sum requires sgn_+(f) = 1");
  const ManifoldExpr& x = f.source();
  if (x.lattice()->b_plus() != 2 || x.lattice()->b_minus() != 10)
    fail(Errc::precondition, "orbit sums are defined for b_+ = 2, b_- = 10");

  OqClass oq{q};
  OqResult out;
  auto total = std::make_pair(CVKind::integer, i64{0});
  TraceNode sum_trace;
  sum_trace.rule = "SUM";
  sum_trace.note = "orbit sum over O_" + std::to_string(q) + ", bound " + std::to_string(bound);

  for (LatticeVector& v : enumerate_characteristics(x.lattice(), 0, bound)) {
    if (!x.lattice()->is_even() && v.is_zero()) continue;
    SpinCClass s{std::move(v)};
    if (!oq.contains(s)) continue;
    CertifiedValue val = [&] {
      if (!preserves(f, s)) {
        TraceNode t;
        t.rule = "UNKNOWN";
        t.note = "s not preserved by f; outside the certified rules";
        return CertifiedValue::unknown(std::move(t));
      }
      return sw_family(x, s, f, Chamber::zero, order);
    }();
    total = cv_add(total, {val.kind, val.value});
    sum_trace.children.push_back(val.trace);
    out.summands.push_back(OqSummand{s.c.coords, std::move(val)});
  }

  i64 kmax = 0;
  detail::collect_e1log_k(f.node(), kmax);
  out.bound_captures_support = bound >= 3 * kmax;

  out.total = cv_from(total, std::move(sum_trace));
  return out;
}

}  // namespace swfam
