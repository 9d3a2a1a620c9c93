#pragma once

#include "swfam/kahler.hpp"

#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace swfam {

enum class Chamber { zero, constant };

inline std::string to_string(Chamber c) { return c == Chamber::zero ? "zero" : "constant"; }

enum class CVKind { integer, mod2, unknown };

inline std::string to_string(CVKind k) {
  switch (k) {
    case CVKind::integer:
      return "int";
    case CVKind::mod2:
      return "mod2";
    case CVKind::unknown:
      return "unknown";
  }
  fail(Errc::internal, "unreachable value kind");
}

// One node of the audit log. Every certified value carries the full
// derivation tree; replay_trace re-derives each node independently.
struct TraceNode {
  std::string rule;  // R0..R5, CC, KAHLER, PSC, UNKNOWN
  std::string note;
  CVKind kind = CVKind::unknown;
  i64 value = 0;
  int sign = 1;               // R4 multiplier
  bool degraded_mod2 = false; // sgn_+ = -1 forces mod-2 output
  std::optional<Atom> kahler_surface;
  IVec kahler_cprime;
  std::optional<ManifoldExpr> psc_source;
  std::vector<TraceNode> children;
};

// Three-valued certified result; Unknown is absorbing under arithmetic.
struct CertifiedValue {
  CVKind kind = CVKind::unknown;
  i64 value = 0;
  TraceNode trace;

  static CertifiedValue integer(i64 v, TraceNode t) {
    t.kind = CVKind::integer;
    t.value = v;
    return CertifiedValue{CVKind::integer, v, std::move(t)};
  }
  static CertifiedValue mod2(i64 v, TraceNode t) {
    i64 b = ((v % 2) + 2) % 2;
    t.kind = CVKind::mod2;
    t.value = b;
    return CertifiedValue{CVKind::mod2, b, std::move(t)};
  }
  static CertifiedValue unknown(TraceNode t) {
    t.kind = CVKind::unknown;
    t.value = 0;
    return CertifiedValue{CVKind::unknown, 0, std::move(t)};
  }

  bool is_unknown() const { return kind == CVKind::unknown; }
};

inline std::pair<CVKind, i64> cv_add(std::pair<CVKind, i64> a, std::pair<CVKind, i64> b) {
  if (a.first == CVKind::unknown || b.first == CVKind::unknown) return {CVKind::unknown, 0};
  if (a.first == CVKind::integer && b.first == CVKind::integer)
    return {CVKind::integer, checked_add(a.second, b.second)};
  return {CVKind::mod2, (((a.second + b.second) % 2) + 2) % 2};
}

inline std::pair<CVKind, i64> cv_negate(std::pair<CVKind, i64> a) {
  if (a.first == CVKind::integer) return {CVKind::integer, -a.second};
  return a;
}

inline std::pair<CVKind, i64> cv_scale_sign(std::pair<CVKind, i64> a, int s) {
  if (a.first == CVKind::integer && s == -1) return {CVKind::integer, -a.second};
  return a;
}

inline std::pair<CVKind, i64> cv_to_mod2(std::pair<CVKind, i64> a) {
  if (a.first == CVKind::unknown) return a;
  return {CVKind::mod2, ((a.second % 2) + 2) % 2};
}

inline CertifiedValue cv_from(std::pair<CVKind, i64> v, TraceNode t) {
  if (v.first == CVKind::unknown) return CertifiedValue::unknown(std::move(t));
  if (v.first == CVKind::integer) return CertifiedValue::integer(v.second, std::move(t));
  return CertifiedValue::mod2(v.second, std::move(t));
}

// Values agree whenever both are certified, comparing at the weaker kind.
inline bool cv_agree(const CertifiedValue& a, const CertifiedValue& b) {
  if (a.is_unknown() || b.is_unknown()) return true;
  if (a.kind == CVKind::integer && b.kind == CVKind::integer) return a.value == b.value;
  return ((a.value % 2) + 2) % 2 == ((b.value % 2) + 2) % 2;
}

// ---------------------------------------------------------------------------
// Symbolic diffeomorphisms

struct DiffeoNode;
using DiffeoPtr = std::shared_ptr<const DiffeoNode>;

struct DiffeoNode {
  enum class Kind { identity, rho, conn_sum, compose, inverse, relabel };
  Kind kind = Kind::identity;
  ManifoldExpr source;
  LatticeAutomorphism induced;
  int sgn_plus = 1;
  int rho_ordinal = 0;  // 1-based index among S2xS2 summands
  DiffeoPtr a, b;
  std::optional<LatticeAutomorphism> psi;
  std::string psi_name;

  DiffeoNode(Kind k, ManifoldExpr src, LatticeAutomorphism ind)
      : kind(k), source(std::move(src)), induced(std::move(ind)) {}
};

class DiffeoExpr {
 public:
  static DiffeoExpr identity(ManifoldExpr x) {
    LatticeAutomorphism ind{x.lattice(), IMat::identity(x.lattice()->rank())};
    auto n = std::make_shared<DiffeoNode>(DiffeoNode::Kind::identity, std::move(x), std::move(ind));
    n->sgn_plus = 1;
    return DiffeoExpr(std::move(n));
  }

  // Acts as -1 on the H block of the ordinal-th S2xS2 summand.
  static DiffeoExpr rho(ManifoldExpr x, int ordinal) {
    int seen = 0, idx = -1;
    for (std::size_t i = 0; i < x.summands().size(); ++i) {
      if (x.summands()[i].kind == AtomKind::s2xs2 && ++seen == ordinal) {
        idx = static_cast<int>(i);
        break;
      }
    }
    if (idx < 0) fail(Errc::domain, "no such S2xS2 summand");
    IMat m = IMat::identity(x.lattice()->rank());
    int off = x.block_offset(static_cast<std::size_t>(idx));
    m.at(off, off) = -1;
    m.at(off + 1, off + 1) = -1;
    auto ind = make_automorphism(x.lattice(), std::move(m));
    auto n = std::make_shared<DiffeoNode>(DiffeoNode::Kind::rho, std::move(x), std::move(ind));
    n->rho_ordinal = ordinal;
    n->sgn_plus = sgn_plus(n->induced);
    return DiffeoExpr(std::move(n));
  }

  static DiffeoExpr connected_sum(const DiffeoExpr& f, const DiffeoExpr& g) {
    ManifoldExpr src = swfam::connected_sum(f.source(), g.source());
    int n1 = f.source().lattice()->rank();
    int n2 = g.source().lattice()->rank();
    IMat m = IMat::identity(n1 + n2);
    for (int r = 0; r < n1; ++r)
      for (int c = 0; c < n1; ++c) m.at(r, c) = f.induced().matrix.at(r, c);
    for (int r = 0; r < n2; ++r)
      for (int c = 0; c < n2; ++c) m.at(n1 + r, n1 + c) = g.induced().matrix.at(r, c);
    auto ind = make_automorphism(src.lattice(), std::move(m));
    auto node = std::make_shared<DiffeoNode>(DiffeoNode::Kind::conn_sum, std::move(src), std::move(ind));
    node->a = f.p_;
    node->b = g.p_;
    node->sgn_plus = swfam::sgn_plus(node->induced);
    return DiffeoExpr(std::move(node));
  }

  // f after g; both must act on the same expression.
  static DiffeoExpr compose(const DiffeoExpr& f, const DiffeoExpr& g) {
    if (!(f.source() == g.source())) fail(Errc::precondition, "composition requires equal sources");
    auto ind = swfam::compose(f.induced(), g.induced());
    auto node =
        std::make_shared<DiffeoNode>(DiffeoNode::Kind::compose, f.source(), std::move(ind));
    node->a = f.p_;
    node->b = g.p_;
    node->sgn_plus = f.p_->sgn_plus * g.p_->sgn_plus;
    return DiffeoExpr(std::move(node));
  }

  static DiffeoExpr inverse(const DiffeoExpr& f) {
    auto ind = swfam::inverse(f.induced());
    auto node =
        std::make_shared<DiffeoNode>(DiffeoNode::Kind::inverse, f.source(), std::move(ind));
    node->a = f.p_;
    node->sgn_plus = f.p_->sgn_plus;
    return DiffeoExpr(std::move(node));
  }

  // Conjugation by a (named) isometry identifying the inner presentation's
  // chart with the outer one; both charts must carry the same gram matrix.
  static DiffeoExpr relabel(ManifoldExpr outer, LatticeAutomorphism psi, const DiffeoExpr& inner,
                            std::string name = "psi") {
    if (!same_form(*outer.lattice(), *inner.source().lattice()))
      fail(Errc::precondition, "relabel requires chart-identical presentations");
    if (!same_form(*psi.parent, *outer.lattice()))
      fail(Errc::parent_mismatch, "relabel automorphism on wrong lattice");
    auto ind = swfam::compose(swfam::compose(psi, inner.induced()), swfam::inverse(psi));
    // re-anchor on the outer lattice
    auto ind2 = LatticeAutomorphism{outer.lattice(), std::move(ind.matrix)};
    auto node =
        std::make_shared<DiffeoNode>(DiffeoNode::Kind::relabel, std::move(outer), std::move(ind2));
    node->a = inner.p_;
    node->psi = std::move(psi);
    node->psi_name = std::move(name);
    node->sgn_plus = inner.p_->sgn_plus;  // conjugation preserves sgn_+
    return DiffeoExpr(std::move(node));
  }

  const ManifoldExpr& source() const { return p_->source; }
  const LatticeAutomorphism& induced() const { return p_->induced; }
  const DiffeoNode& node() const { return *p_; }
  DiffeoPtr ptr() const { return p_; }

  static DiffeoExpr wrap(DiffeoPtr p) {
    if (!p) fail(Errc::internal, "null diffeomorphism node");
    return DiffeoExpr(std::move(p));
  }

 private:
  explicit DiffeoExpr(DiffeoPtr p) : p_(std::move(p)) {}
  DiffeoPtr p_;
};

inline std::string diffeo_to_string(const DiffeoNode& n) {
  auto wrap = [](const DiffeoNode& c, std::string s, bool need) {
    (void)c;
    return need ? "(" + s + ")" : s;
  };
  switch (n.kind) {
    case DiffeoNode::Kind::identity:
      return "id";
    case DiffeoNode::Kind::rho:
      return "rho@" + std::to_string(n.rho_ordinal);
    case DiffeoNode::Kind::conn_sum: {
      std::string l = diffeo_to_string(*n.a);
      std::string r = diffeo_to_string(*n.b);
      bool lp = n.a->kind == DiffeoNode::Kind::compose;
      bool rp = n.b->kind == DiffeoNode::Kind::compose || n.b->kind == DiffeoNode::Kind::conn_sum;
      return wrap(*n.a, l, lp) + " # " + wrap(*n.b, r, rp);
    }
    case DiffeoNode::Kind::compose: {
      std::string l = diffeo_to_string(*n.a);
      std::string r = diffeo_to_string(*n.b);
      bool rp = n.b->kind == DiffeoNode::Kind::compose;
      return l + " * " + wrap(*n.b, r, rp);
    }
    case DiffeoNode::Kind::inverse:
      return "inv(" + diffeo_to_string(*n.a) + ")";
    case DiffeoNode::Kind::relabel:
      return "conj(" + n.psi_name + ", " + diffeo_to_string(*n.a) + ")";
  }
  fail(Errc::internal, "unreachable diffeo kind");
}

inline std::string to_string(const DiffeoExpr& f) { return diffeo_to_string(f.node()); }

inline bool preserves(const DiffeoExpr& f, const SpinCClass& s) {
  if (!same_form(*f.source().lattice(), *s.c.parent))
    fail(Errc::parent_mismatch, "spin^c class on wrong lattice");
  LatticeVector img = apply(f.induced(), LatticeVector(f.source().lattice(), s.c.coords));
  return img.coords == s.c.coords;
}

inline bool is_torelli(const DiffeoExpr& f) { return is_identity(f.induced()); }

inline int sgn_plus_of(const DiffeoExpr& f) { return f.node().sgn_plus; }

// ---------------------------------------------------------------------------
// Chamber validity and the rule engine

inline bool chamber_defined(const ManifoldExpr& x, const SpinCClass& s, const DiffeoExpr& f,
                            Chamber chamber) {
  (void)x;
  if (chamber == Chamber::zero) return square(s.c) >= 0 && !s.c.is_zero();
  return is_torelli(f);
}

enum class Rule { r0, r1, r2, r3, r4, r5 };

inline std::string to_string(Rule r) {
  switch (r) {
    case Rule::r0:
      return "R0";
    case Rule::r1:
      return "R1";
    case Rule::r2:
      return "R2";
    case Rule::r3:
      return "R3";
    case Rule::r4:
      return "R4";
    case Rule::r5:
      return "R5";
  }
  fail(Errc::internal, "unreachable rule");
}

struct EvalOrder {
  std::vector<Rule> rules;

  // Fixed priority used by default.
  static EvalOrder standard() {
    return EvalOrder{{Rule::r0, Rule::r3, Rule::r4, Rule::r1, Rule::r2, Rule::r5}};
  }
  // Alternative priority used by the confluence tests.
  static EvalOrder numeric() {
    return EvalOrder{{Rule::r0, Rule::r1, Rule::r2, Rule::r3, Rule::r4, Rule::r5}};
  }
};

CertifiedValue sw_family(const ManifoldExpr& x, const SpinCClass& s, const DiffeoExpr& f,
                         Chamber chamber, const EvalOrder& order = EvalOrder::standard());

namespace detail {

inline bool structurally_identity(const DiffeoNode& n) {
  switch (n.kind) {
    case DiffeoNode::Kind::identity:
      return true;
    case DiffeoNode::Kind::rho:
      return false;
    case DiffeoNode::Kind::conn_sum:
    case DiffeoNode::Kind::compose:
      return structurally_identity(*n.a) && structurally_identity(*n.b);
    case DiffeoNode::Kind::inverse:
    case DiffeoNode::Kind::relabel:
      return structurally_identity(*n.a);
  }
  fail(Errc::internal, "unreachable diffeo kind");
}

inline std::string coords_str(const IVec& v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out + ")";
}

inline std::string query_str(const ManifoldExpr& x, const SpinCClass& s, const DiffeoExpr& f,
                             Chamber chamber) {
  return "X=" + to_string(x) + "; c=" + coords_str(s.c.coords) + "; f=" + to_string(f) +
         "; chamber=" + to_string(chamber);
}

// Ordinary zero-chamber invariant of a closed surface presentation;
// certifiable for PSC sums and for the E1 / E1(m,n) Kahler models.
inline std::optional<std::pair<i64, TraceNode>> sw0_unparametrized(const ManifoldExpr& xp,
                                                                   const IVec& cprime) {
  if (invariants(xp).is_psc) {
    TraceNode leaf;
    leaf.rule = "PSC";
    leaf.note = "SW0(" + to_string(xp) + ") = 0 by positive scalar curvature";
    leaf.kind = CVKind::integer;
    leaf.value = 0;
    leaf.psc_source = xp;
    return std::make_pair<i64, TraceNode>(0, std::move(leaf));
  }
  if (xp.summands().size() == 1 && (xp.summands()[0].kind == AtomKind::e1 ||
                                    xp.summands()[0].kind == AtomKind::e1log)) {
    const Atom& atom = xp.summands()[0];
    KahlerModel mdl = KahlerModel::for_atom(atom);
    IVec lc(cprime.size());
    for (std::size_t i = 0; i < cprime.size(); ++i) {
      i64 num = checked_add(cprime[i], mdl.K.coords[i]);
      if (num % 2 != 0) fail(Errc::internal, "spin^c to line bundle conversion parity defect");
      lc[i] = num / 2;
    }
    LatticeVector l(mdl.lattice, std::move(lc));
    std::optional<i64> v = sw_zero_chamber(mdl, l);
    if (!v) return std::nullopt;
    TraceNode leaf;
    leaf.rule = "KAHLER";
    leaf.note = "SW0(" + to_string(atom) + ", c'=" + coords_str(cprime) + ") = " +
                std::to_string(*v);
    leaf.kind = CVKind::integer;
    leaf.value = *v;
    leaf.kahler_surface = atom;
    leaf.kahler_cprime = cprime;
    return std::make_pair(*v, std::move(leaf));
  }
  return std::nullopt;
}

struct Query {
  const ManifoldExpr& x;
  const SpinCClass& s;
  const DiffeoExpr& f;
  Chamber chamber;
  const EvalOrder& order;
};

inline std::optional<CertifiedValue> try_r0(const Query& q) {
  if (!structurally_identity(q.f.node())) return std::nullopt;
  TraceNode t;
  t.rule = "R0";
  t.note = "constant family: " + query_str(q.x, q.s, q.f, q.chamber);
  return CertifiedValue::integer(0, std::move(t));
}

inline std::optional<CertifiedValue> try_r1(const Query& q) {
  if (q.chamber != Chamber::zero) return std::nullopt;
  const DiffeoNode& n = q.f.node();
  if (n.kind != DiffeoNode::Kind::conn_sum) return std::nullopt;
  const ManifoldExpr& right_src = n.b->source;
  if (right_src.summands().size() != 1 || right_src.summands()[0].kind != AtomKind::s2xs2)
    return std::nullopt;
  if (n.b->sgn_plus != -1) return std::nullopt;
  int rank = q.x.lattice()->rank();
  if (q.s.c.coords[rank - 2] != 0 || q.s.c.coords[rank - 1] != 0) return std::nullopt;
  if (square(q.s.c) < 0) return std::nullopt;

  const ManifoldExpr& xp = n.a->source;
  IVec cprime(q.s.c.coords.begin(), q.s.c.coords.end() - 2);
  SpinCClass sp{LatticeVector(xp.lattice(), cprime)};
  // f' must preserve s'
  LatticeVector img = apply(n.a->induced, LatticeVector(xp.lattice(), cprime));
  if (img.coords != cprime) return std::nullopt;
  if (expected_dimension(xp, sp) != 0) fail(Errc::internal, "gluing requires d(s') = 0");

  auto delegate = sw0_unparametrized(xp, cprime);
  TraceNode t;
  t.rule = "R1";
  t.note = "collapse S2xS2 factor with sgn+ = -1: X' = " + to_string(xp);
  if (!delegate) {
    TraceNode leaf;
    leaf.rule = "UNKNOWN";
    leaf.note = "no certified value for SW0(" + to_string(xp) + ")";
    t.children.push_back(std::move(leaf));
    return CertifiedValue::unknown(std::move(t));
  }
  t.children.push_back(std::move(delegate->second));
  return CertifiedValue::mod2(delegate->first, std::move(t));
}

inline std::optional<CertifiedValue> try_r2(const Query& q) {
  if (q.chamber != Chamber::constant) return std::nullopt;
  const DiffeoNode& n = q.f.node();
  if (n.kind != DiffeoNode::Kind::conn_sum) return std::nullopt;
  const ManifoldExpr& right_src = n.b->source;
  if (right_src.summands().size() != 1 || right_src.summands()[0].kind != AtomKind::cp2bar)
    return std::nullopt;
  if (!is_identity(n.a->induced) || !is_identity(n.b->induced)) return std::nullopt;
  int rank = q.x.lattice()->rank();
  i64 kappa = q.s.c.coords[rank - 1];
  if (kappa != 1 && kappa != -1) return std::nullopt;  // need c(kappa)^2 = -1

  const ManifoldExpr& xp = n.a->source;
  IVec cprime(q.s.c.coords.begin(), q.s.c.coords.end() - 1);
  SpinCClass sp{LatticeVector(xp.lattice(), std::move(cprime))};
  DiffeoExpr fp = DiffeoExpr::wrap(n.a);
  CertifiedValue sub = sw_family(xp, sp, fp, Chamber::constant, q.order);
  TraceNode t;
  t.rule = "R2";
  t.note = "strip CP2bar blowup (kappa = " + std::to_string(kappa) + "): X' = " + to_string(xp);
  t.children.push_back(sub.trace);
  return cv_from({sub.kind, sub.value}, std::move(t));
}

inline std::optional<CertifiedValue> try_r3(const Query& q) {
  const DiffeoNode& n = q.f.node();
  if (n.kind != DiffeoNode::Kind::compose) return std::nullopt;
  DiffeoExpr f1 = DiffeoExpr::wrap(n.a);
  DiffeoExpr f2 = DiffeoExpr::wrap(n.b);
  if (!preserves(f1, q.s) || !preserves(f2, q.s)) return std::nullopt;
  if (q.chamber == Chamber::constant && (!is_torelli(f1) || !is_torelli(f2))) return std::nullopt;
  CertifiedValue v1 = sw_family(q.x, q.s, f1, q.chamber, q.order);
  CertifiedValue v2 = sw_family(q.x, q.s, f2, q.chamber, q.order);
  TraceNode t;
  t.rule = "R3";
  t.note = "additivity over composition";
  t.children.push_back(v1.trace);
  t.children.push_back(v2.trace);
  return cv_from(cv_add({v1.kind, v1.value}, {v2.kind, v2.value}), std::move(t));
}

inline std::optional<CertifiedValue> try_r4(const Query& q) {
  const DiffeoNode& n = q.f.node();
  if (n.kind != DiffeoNode::Kind::relabel) return std::nullopt;
  const ManifoldExpr& inner_x = n.a->source;
  LatticeAutomorphism psi_inv = inverse(*n.psi);
  IVec moved = imat_apply(psi_inv.matrix, q.s.c.coords);
  SpinCClass sp{LatticeVector(inner_x.lattice(), std::move(moved))};
  DiffeoExpr inner = DiffeoExpr::wrap(n.a);
  CertifiedValue sub = sw_family(inner_x, sp, inner, q.chamber, q.order);
  int sg = sgn_plus(*n.psi);
  TraceNode t;
  t.rule = "R4";
  t.note = "conjugation equivariance via " + n.psi_name + " (sgn+ = " + std::to_string(sg) + ")";
  t.sign = sg;
  t.children.push_back(sub.trace);
  return cv_from(cv_scale_sign({sub.kind, sub.value}, sg), std::move(t));
}

inline std::optional<CertifiedValue> try_r5(const Query& q) {
  const DiffeoNode& n = q.f.node();
  if (n.kind != DiffeoNode::Kind::inverse) return std::nullopt;
  DiffeoExpr inner = DiffeoExpr::wrap(n.a);
  if (!preserves(inner, q.s)) return std::nullopt;
  CertifiedValue sub = sw_family(q.x, q.s, inner, q.chamber, q.order);
  TraceNode t;
  t.rule = "R5";
  t.note = "inverse negates";
  t.children.push_back(sub.trace);
  return cv_from(cv_negate({sub.kind, sub.value}), std::move(t));
}

}  // namespace detail

// 1-parameter families invariant of the mapping cylinder of f, evaluated by
// the first applicable rule. Never invents a value: anything outside the
// rules' hypotheses is Unknown.
inline CertifiedValue sw_family(const ManifoldExpr& x, const SpinCClass& s, const DiffeoExpr& f,
                                Chamber chamber, const EvalOrder& order) {
  if (!(f.source() == x)) fail(Errc::precondition, "diffeomorphism source differs from X");
  if (!same_form(*x.lattice(), *s.c.parent)) fail(Errc::parent_mismatch, "spin^c class on wrong lattice");
  if (x.lattice()->b_plus() != 2) fail(Errc::precondition, "families invariant requires b_plus = 2");
  if (expected_dimension(x, s) != -1) fail(Errc::precondition, "families invariant requires d(s) = -1");
  if (!preserves(f, s)) fail(Errc::precondition, "diffeomorphism does not preserve the spin^c class");
  if (!chamber_defined(x, s, f, chamber))
    fail(Errc::chamber_undefined, "requested chamber is not defined for this query");

  detail::Query q{x, s, f, chamber, order};
  std::optional<CertifiedValue> res;
  for (Rule r : order.rules) {
    switch (r) {
      case Rule::r0:
        res = detail::try_r0(q);
        break;
      case Rule::r1:
        res = detail::try_r1(q);
        break;
      case Rule::r2:
        res = detail::try_r2(q);
        break;
      case Rule::r3:
        res = detail::try_r3(q);
        break;
      case Rule::r4:
        res = detail::try_r4(q);
        break;
      case Rule::r5:
        res = detail::try_r5(q);
        break;
    }
    if (res) break;
  }

  if (!res && chamber == Chamber::constant && chamber_defined(x, s, f, Chamber::zero)) {
    // constant and zero chambers agree when both are defined
    CertifiedValue sub = sw_family(x, s, f, Chamber::zero, order);
    TraceNode t;
    t.rule = "CC";
    t.note = "constant chamber = zero chamber (both defined)";
    t.children.push_back(sub.trace);
    res = cv_from({sub.kind, sub.value}, std::move(t));
  }

  if (!res) {
    TraceNode t;
    t.rule = "UNKNOWN";
    t.note = "no rule applies: " + detail::query_str(x, s, f, chamber);
    res = CertifiedValue::unknown(std::move(t));
  }

  // orientability: integer certificates require sgn_+(f) = 1
  if (sgn_plus_of(f) == -1 && res->kind == CVKind::integer) {
    res->trace.degraded_mod2 = true;
    i64 b = ((res->value % 2) + 2) % 2;
    res->kind = CVKind::mod2;
    res->value = b;
    res->trace.kind = CVKind::mod2;
    res->trace.value = b;
  }
  return *res;
}

// Evaluates both chambers; true unless two certified values disagree.
inline bool chamber_coincidence_check(const ManifoldExpr& x, const SpinCClass& s,
                                      const DiffeoExpr& f) {
  if (!chamber_defined(x, s, f, Chamber::zero) || !chamber_defined(x, s, f, Chamber::constant))
    fail(Errc::precondition, "coincidence check requires both chambers defined");
  CertifiedValue a = sw_family(x, s, f, Chamber::constant);
  CertifiedValue b = sw_family(x, s, f, Chamber::zero);
  return cv_agree(a, b);
}

// ---------------------------------------------------------------------------
// Trace replay

// Recomputes the value of every node from its children and leaf payloads;
// throws on any mismatch with the recorded values.
inline std::pair<CVKind, i64> replay_trace(const TraceNode& t) {
  std::pair<CVKind, i64> v{CVKind::unknown, 0};
  auto child = [&](std::size_t i) -> std::pair<CVKind, i64> { return replay_trace(t.children.at(i)); };
  if (t.rule == "R0") {
    v = {CVKind::integer, 0};
  } else if (t.rule == "R1") {
    v = cv_to_mod2(child(0));
  } else if (t.rule == "R2" || t.rule == "CC") {
    v = child(0);
  } else if (t.rule == "R3") {
    v = cv_add(child(0), child(1));
  } else if (t.rule == "SUM") {
    v = {CVKind::integer, 0};
    for (std::size_t i = 0; i < t.children.size(); ++i) v = cv_add(v, child(i));
  } else if (t.rule == "R4") {
    v = cv_scale_sign(child(0), t.sign);
  } else if (t.rule == "R5") {
    v = cv_negate(child(0));
  } else if (t.rule == "KAHLER") {
    if (!t.kahler_surface) fail(Errc::internal, "trace: kahler leaf without surface");
    KahlerModel mdl = KahlerModel::for_atom(*t.kahler_surface);
    IVec lc(t.kahler_cprime.size());
    for (std::size_t i = 0; i < lc.size(); ++i) {
      i64 num = checked_add(t.kahler_cprime[i], mdl.K.coords[i]);
      if (num % 2 != 0) fail(Errc::internal, "trace: parity defect");
      lc[i] = num / 2;
    }
    std::optional<i64> sw = sw_zero_chamber(mdl, LatticeVector(mdl.lattice, std::move(lc)));
    if (!sw) fail(Errc::internal, "trace: kahler leaf no longer certifiable");
    v = {CVKind::integer, *sw};
  } else if (t.rule == "PSC") {
    if (!t.psc_source || !invariants(*t.psc_source).is_psc)
      fail(Errc::internal, "trace: PSC leaf without PSC source");
    v = {CVKind::integer, 0};
  } else if (t.rule == "UNKNOWN") {
    v = {CVKind::unknown, 0};
  } else {
    fail(Errc::internal, "trace: unrecognized rule " + t.rule);
  }
  if (t.degraded_mod2) v = cv_to_mod2(v);
  if (v.first != t.kind || v.second != t.value)
    fail(Errc::internal, "trace replay mismatch at rule " + t.rule + " (" + t.note + ")");
  return v;
}

inline bool audit_trace(const CertifiedValue& cv) {
  auto v = replay_trace(cv.trace);
  return v.first == cv.kind && v.second == cv.value;
}

}  // namespace swfam
