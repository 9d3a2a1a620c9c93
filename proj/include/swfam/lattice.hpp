#pragma once

#include "swfam/numeric.hpp"

#include <algorithm>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace swfam {

using IVec = std::vector<i64>;
using RVec = std::vector<Rat>;

struct Signature {
  int b_plus = 0;
  int b_minus = 0;
};

class IntersectionLattice;
using LatticePtr = std::shared_ptr<const IntersectionLattice>;

namespace detail {

// Symmetric congruence diagonalization over Q: returns basis vectors b_i with
// b_i^T G b_j = 0 for i != j and the diagonal values b_i^T G b_i.
struct Diagonalization {
  std::vector<RVec> basis;
  std::vector<Rat> diag;
};

inline Diagonalization congruence_diagonalize(const IMat& gram) {
  int n = gram.rows;
  std::vector<std::vector<Rat>> a(n, std::vector<Rat>(n));
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) a[r][c] = gram.at(r, c);
  std::vector<RVec> basis(n, RVec(n, Rat(0)));
  for (int i = 0; i < n; ++i) basis[i][i] = 1;

  auto add_to = [&](int i, int j, const Rat& t) {
    // b_i += t * b_j, with the induced symmetric row/column update on a.
    for (int c = 0; c < n; ++c) a[i][c] += t * a[j][c];
    for (int r = 0; r < n; ++r) a[r][i] += t * a[r][j];
    for (int c = 0; c < n; ++c) basis[i][c] += t * basis[j][c];
  };
  auto swap_idx = [&](int i, int j) {
    std::swap(a[i], a[j]);
    for (int r = 0; r < n; ++r) std::swap(a[r][i], a[r][j]);
    std::swap(basis[i], basis[j]);
  };

  for (int i = 0; i < n; ++i) {
    if (a[i][i] == 0) {
      int pivot = -1;
      for (int j = i + 1; j < n; ++j)
        if (a[j][j] != 0) {
          pivot = j;
          break;
        }
      if (pivot >= 0) {
        swap_idx(i, pivot);
      } else {
        int off = -1;
        for (int j = i + 1; j < n; ++j)
          if (a[i][j] != 0) {
            off = j;
            break;
          }
        if (off < 0) fail(Errc::domain, "degenerate bilinear form");
        add_to(i, off, Rat(1));
      }
    }
    for (int j = i + 1; j < n; ++j) {
      if (a[i][j] != 0) add_to(j, i, -a[i][j] / a[i][i]);
    }
  }

  Diagonalization out;
  out.basis = std::move(basis);
  out.diag.resize(n);
  for (int i = 0; i < n; ++i) out.diag[i] = a[i][i];
  return out;
}

// Solves G y = diag(G) over F2; the characteristic vectors are exactly the
// coset y + 2Z^n (G is invertible mod 2 since |det G| = 1).
inline std::vector<int> characteristic_residue(const IMat& gram) {
  int n = gram.rows;
  std::vector<std::vector<int>> m(n, std::vector<int>(n + 1, 0));
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) m[r][c] = static_cast<int>(((gram.at(r, c) % 2) + 2) % 2);
    m[r][n] = static_cast<int>(((gram.at(r, r) % 2) + 2) % 2);
  }
  int row = 0;
  std::vector<int> where(n, -1);
  for (int col = 0; col < n && row < n; ++col) {
    int sel = -1;
    for (int r = row; r < n; ++r)
      if (m[r][col]) {
        sel = r;
        break;
      }
    if (sel < 0) continue;
    std::swap(m[sel], m[row]);
    for (int r = 0; r < n; ++r)
      if (r != row && m[r][col])
        for (int c = col; c <= n; ++c) m[r][c] ^= m[row][c];
    where[col] = row;
    ++row;
  }
  std::vector<int> y(n, 0);
  for (int col = 0; col < n; ++col) {
    if (where[col] < 0) fail(Errc::internal, "gram matrix singular mod 2");
    y[col] = m[where[col]][n];
  }
  return y;
}

}  // namespace detail

// Integral symmetric unimodular bilinear form with a labelled basis.
class IntersectionLattice {
 public:
  static LatticePtr create(IMat gram, std::vector<std::string> labels) {
    if (gram.rows != gram.cols) fail(Errc::domain, "gram matrix must be square");
    int n = gram.rows;
    if (static_cast<int>(labels.size()) != n) fail(Errc::domain, "label count must equal rank");
    for (int r = 0; r < n; ++r)
      for (int c = r + 1; c < n; ++c)
        if (gram.at(r, c) != gram.at(c, r)) fail(Errc::domain, "gram matrix must be symmetric");

    auto lat = LatticePtr(new IntersectionLattice(std::move(gram), std::move(labels)));
    return lat;
  }

  int rank() const { return rank_; }
  const IMat& gram() const { return gram_; }
  const std::vector<std::string>& basis_labels() const { return labels_; }
  Signature signature() const { return sig_; }
  int b_plus() const { return sig_.b_plus; }
  int b_minus() const { return sig_.b_minus; }
  i64 sigma() const { return static_cast<i64>(sig_.b_plus) - sig_.b_minus; }
  bool is_even() const { return even_; }
  const IMat& gram_inverse() const { return gram_inv_; }
  const std::vector<RVec>& positive_basis_vectors() const { return pos_basis_; }
  const std::vector<int>& characteristic_residue() const { return char_res_; }

 private:
  IntersectionLattice(IMat gram, std::vector<std::string> labels)
      : rank_(gram.rows), gram_(std::move(gram)), labels_(std::move(labels)) {
    auto d = detail::congruence_diagonalize(gram_);
    Rat det(1);
    for (int i = 0; i < rank_; ++i) {
      det *= d.diag[i];
      if (d.diag[i] > 0)
        ++sig_.b_plus;
      else if (d.diag[i] < 0)
        ++sig_.b_minus;
    }
    if (det != 1 && det != -1) fail(Errc::domain, "form is not unimodular");
    if (sig_.b_plus + sig_.b_minus != rank_) fail(Errc::internal, "signature defect");
    for (int i = 0; i < rank_; ++i)
      if (d.diag[i] > 0) pos_basis_.push_back(d.basis[i]);

    even_ = true;
    for (int i = 0; i < rank_; ++i)
      if (gram_.at(i, i) % 2 != 0) even_ = false;

    // G^{-1} = S D^{-1} S^T is integral because |det G| = 1.
    gram_inv_ = IMat(rank_, rank_);
    for (int r = 0; r < rank_; ++r)
      for (int c = 0; c < rank_; ++c) {
        Rat acc(0);
        for (int i = 0; i < rank_; ++i) acc += d.basis[i][r] * d.basis[i][c] / d.diag[i];
        if (denominator(acc) != 1) fail(Errc::internal, "gram inverse is not integral");
        gram_inv_.at(r, c) = checked_i64(numerator(acc), "gram inverse entry");
      }

    if (rank_ > 0) char_res_ = detail::characteristic_residue(gram_);
  }

  int rank_;
  IMat gram_;
  std::vector<std::string> labels_;
  Signature sig_;
  bool even_ = true;
  IMat gram_inv_;
  std::vector<RVec> pos_basis_;
  std::vector<int> char_res_;
};

inline bool same_form(const IntersectionLattice& a, const IntersectionLattice& b) {
  return a.rank() == b.rank() && a.gram() == b.gram();
}

struct LatticeVector {
  LatticePtr parent;
  IVec coords;

  LatticeVector(LatticePtr p, IVec c) : parent(std::move(p)), coords(std::move(c)) {
    if (!parent) fail(Errc::domain, "lattice vector needs a parent lattice");
    if (static_cast<int>(coords.size()) != parent->rank())
      fail(Errc::domain, "coordinate count must equal lattice rank");
  }

  bool is_zero() const {
    return std::all_of(coords.begin(), coords.end(), [](i64 v) { return v == 0; });
  }
};

inline bool same_vector(const LatticeVector& x, const LatticeVector& y) {
  return same_form(*x.parent, *y.parent) && x.coords == y.coords;
}

inline void require_compatible(const LatticeVector& x, const LatticeVector& y) {
  if (!same_form(*x.parent, *y.parent)) fail(Errc::parent_mismatch, "vectors live in different lattices");
}

// x^T G y, exact.
inline i64 pair(const LatticeVector& x, const LatticeVector& y) {
  require_compatible(x, y);
  const IMat& g = x.parent->gram();
  BigInt acc = 0;
  for (int r = 0; r < g.rows; ++r) {
    if (x.coords[r] == 0) continue;
    BigInt row = 0;
    for (int c = 0; c < g.cols; ++c)
      if (g.at(r, c) != 0 && y.coords[c] != 0) row += BigInt(g.at(r, c)) * y.coords[c];
    acc += BigInt(x.coords[r]) * row;
  }
  return checked_i64(acc, "pairing");
}

inline i64 square(const LatticeVector& x) { return pair(x, x); }

inline bool is_characteristic(const LatticeVector& c) {
  const IMat& g = c.parent->gram();
  for (int i = 0; i < g.rows; ++i) {
    int lhs = 0;
    for (int j = 0; j < g.cols; ++j) lhs ^= static_cast<int>((g.at(i, j) & 1) & (c.coords[j] & 1));
    int rhs = static_cast<int>(g.at(i, i) & 1);
    if (lhs != rhs) return false;
  }
  return true;
}

// gcd of coordinates; 0 for the zero vector.
inline i64 divisibility(const LatticeVector& c) {
  i64 g = 0;
  for (i64 v : c.coords) g = std::gcd(g, v < 0 ? -v : v);
  return g;
}

inline LatticePtr direct_sum(const LatticePtr& l1, const LatticePtr& l2) {
  int n1 = l1->rank(), n2 = l2->rank();
  IMat g(n1 + n2, n1 + n2);
  for (int r = 0; r < n1; ++r)
    for (int c = 0; c < n1; ++c) g.at(r, c) = l1->gram().at(r, c);
  for (int r = 0; r < n2; ++r)
    for (int c = 0; c < n2; ++c) g.at(n1 + r, n1 + c) = l2->gram().at(r, c);
  std::vector<std::string> labels = l1->basis_labels();
  labels.insert(labels.end(), l2->basis_labels().begin(), l2->basis_labels().end());
  return IntersectionLattice::create(std::move(g), std::move(labels));
}

// Reflection in v, defined for v^2 in {+-1, +-2}; integral and form-preserving.
inline LatticeVector reflect(const LatticeVector& v, const LatticeVector& x) {
  require_compatible(v, x);
  i64 v2 = square(v);
  if (v2 != 1 && v2 != -1 && v2 != 2 && v2 != -2)
    fail(Errc::domain, "reflection vector must have square +-1 or +-2");
  i64 t = pair(x, v);
  i64 num = checked_mul(2, t);
  i64 coef = num / v2;  // exact: v2 | 2t for v2 in {+-1, +-2}
  IVec out = x.coords;
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = checked_add(out[i], -checked_mul(coef, v.coords[i]));
  return LatticeVector(x.parent, std::move(out));
}

struct LatticeAutomorphism {
  LatticePtr parent;
  IMat matrix;
};

inline LatticeAutomorphism make_automorphism(LatticePtr parent, IMat m) {
  if (m.rows != parent->rank() || m.cols != parent->rank())
    fail(Errc::domain, "automorphism matrix has wrong shape");
  int n = m.rows;
  const IMat& g = parent->gram();
  // M^T G M = G, checked in unbounded integers.
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      BigInt acc = 0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (m.at(i, r) != 0 && g.at(i, j) != 0 && m.at(j, c) != 0)
            acc += BigInt(m.at(i, r)) * g.at(i, j) * m.at(j, c);
      if (acc != g.at(r, c)) fail(Errc::domain, "matrix does not preserve the form");
    }
  BigInt det = bareiss_det(m);
  if (det != 1 && det != -1) fail(Errc::domain, "automorphism must have determinant +-1");
  return LatticeAutomorphism{std::move(parent), std::move(m)};
}

inline LatticeVector apply(const LatticeAutomorphism& phi, const LatticeVector& v) {
  if (!same_form(*phi.parent, *v.parent)) fail(Errc::parent_mismatch, "automorphism/vector lattice mismatch");
  return LatticeVector(v.parent, imat_apply(phi.matrix, v.coords));
}

inline LatticeAutomorphism compose(const LatticeAutomorphism& f, const LatticeAutomorphism& g) {
  if (!same_form(*f.parent, *g.parent)) fail(Errc::parent_mismatch, "automorphism lattice mismatch");
  return LatticeAutomorphism{f.parent, imat_mul(f.matrix, g.matrix)};
}

inline LatticeAutomorphism inverse(const LatticeAutomorphism& phi) {
  // M^{-1} = G^{-1} M^T G for form-preserving M.
  IMat mt = imat_transpose(phi.matrix);
  IMat inv = imat_mul(imat_mul(phi.parent->gram_inverse(), mt), phi.parent->gram());
  return LatticeAutomorphism{phi.parent, std::move(inv)};
}

inline bool is_identity(const LatticeAutomorphism& phi) {
  return phi.matrix == IMat::identity(phi.parent->rank());
}

struct PositiveSubspaceBasis {
  LatticePtr parent;
  std::vector<RVec> vectors;
};

namespace detail {

inline Rat rvec_pair(const IMat& g, const RVec& x, const RVec& y) {
  Rat acc(0);
  for (int r = 0; r < g.rows; ++r) {
    if (x[r] == 0) continue;
    Rat row(0);
    for (int c = 0; c < g.cols; ++c)
      if (g.at(r, c) != 0 && y[c] != 0) row += Rat(g.at(r, c)) * y[c];
    acc += x[r] * row;
  }
  return acc;
}

// Positive definiteness via leading principal minors.
inline bool positive_definite(const std::vector<std::vector<Rat>>& m) {
  int n = static_cast<int>(m.size());
  std::vector<std::vector<Rat>> a = m;
  for (int k = 0; k < n; ++k) {
    if (a[k][k] <= 0) return false;
    for (int r = k + 1; r < n; ++r) {
      Rat t = a[r][k] / a[k][k];
      for (int c = k; c < n; ++c) a[r][c] -= t * a[k][c];
    }
  }
  return true;
}

// Solve A x = b for square rational A by Gaussian elimination.
inline RVec rsolve(std::vector<std::vector<Rat>> a, RVec b) {
  int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int sel = -1;
    for (int r = col; r < n; ++r)
      if (a[r][col] != 0) {
        sel = r;
        break;
      }
    if (sel < 0) fail(Errc::internal, "singular system");
    std::swap(a[sel], a[col]);
    std::swap(b[sel], b[col]);
    for (int r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0) continue;
      Rat t = a[r][col] / a[col][col];
      for (int c = col; c < n; ++c) a[r][c] -= t * a[col][c];
      b[r] -= t * b[col];
    }
  }
  RVec x(n);
  for (int i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

}  // namespace detail

inline PositiveSubspaceBasis make_positive_basis(LatticePtr parent, std::vector<RVec> vectors) {
  if (static_cast<int>(vectors.size()) != parent->b_plus())
    fail(Errc::domain, "positive basis must have b_plus vectors");
  int k = static_cast<int>(vectors.size());
  std::vector<std::vector<Rat>> gram(k, std::vector<Rat>(k));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) gram[i][j] = detail::rvec_pair(parent->gram(), vectors[i], vectors[j]);
  if (k > 0 && !detail::positive_definite(gram))
    fail(Errc::domain, "vectors do not span a positive definite subspace");
  return PositiveSubspaceBasis{std::move(parent), std::move(vectors)};
}

inline PositiveSubspaceBasis default_positive_basis(const LatticePtr& lat) {
  return make_positive_basis(lat, lat->positive_basis_vectors());
}

// Sign of det(projection onto span(P) of phi restricted to span(P)).
// Nonzero because positive and negative definite subspaces meet trivially.
inline int sgn_plus(const LatticeAutomorphism& phi, const PositiveSubspaceBasis& p) {
  if (!same_form(*phi.parent, *p.parent)) fail(Errc::parent_mismatch, "sgn_plus lattice mismatch");
  int k = static_cast<int>(p.vectors.size());
  if (k == 0) return 1;
  const IMat& g = phi.parent->gram();
  std::vector<std::vector<Rat>> gram_p(k, std::vector<Rat>(k));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) gram_p[i][j] = detail::rvec_pair(g, p.vectors[i], p.vectors[j]);

  int n = phi.parent->rank();
  std::vector<std::vector<Rat>> t(k, std::vector<Rat>(k));
  for (int i = 0; i < k; ++i) {
    RVec img(n, Rat(0));
    for (int r = 0; r < n; ++r) {
      Rat acc(0);
      for (int c = 0; c < n; ++c)
        if (phi.matrix.at(r, c) != 0) acc += Rat(phi.matrix.at(r, c)) * p.vectors[i][c];
      img[r] = acc;
    }
    RVec rhs(k);
    for (int j = 0; j < k; ++j) rhs[j] = detail::rvec_pair(g, p.vectors[j], img);
    RVec alpha = detail::rsolve(gram_p, rhs);
    for (int j = 0; j < k; ++j) t[j][i] = alpha[j];
  }

  // det(t) by fraction-free-ish Gaussian elimination.
  Rat det(1);
  for (int col = 0; col < k; ++col) {
    int sel = -1;
    for (int r = col; r < k; ++r)
      if (t[r][col] != 0) {
        sel = r;
        break;
      }
    if (sel < 0) fail(Errc::internal, "sgn_plus determinant vanished");
    if (sel != col) {
      std::swap(t[sel], t[col]);
      det = -det;
    }
    det *= t[col][col];
    for (int r = col + 1; r < k; ++r) {
      Rat f = t[r][col] / t[col][col];
      for (int c = col; c < k; ++c) t[r][c] -= f * t[col][c];
    }
  }
  if (det == 0) fail(Errc::internal, "sgn_plus determinant vanished");
  return det > 0 ? 1 : -1;
}

inline int sgn_plus(const LatticeAutomorphism& phi) {
  return sgn_plus(phi, default_positive_basis(phi.parent));
}

// Deterministic word of reflections in pseudo-random vectors of square +-1, +-2.
inline LatticeAutomorphism random_automorphism(const LatticePtr& lat, std::uint64_t seed, int word_length) {
  if (word_length < 0) fail(Errc::domain, "word length must be non-negative");
  int n = lat->rank();
  SplitMix64 rng(seed);
  IMat m = IMat::identity(n);
  const IMat& g = lat->gram();
  for (int w = 0; w < word_length; ++w) {
    IVec v(n, 0);
    i64 v2 = 0;
    bool found = false;
    for (int attempt = 0; attempt < 10000 && !found; ++attempt) {
      for (int i = 0; i < n; ++i) v[i] = rng.next_in(-2, 2);
      BigInt acc = 0;
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
          if (v[r] != 0 && g.at(r, c) != 0 && v[c] != 0) acc += BigInt(v[r]) * g.at(r, c) * v[c];
      if (acc == 1 || acc == -1 || acc == 2 || acc == -2) {
        v2 = static_cast<i64>(acc);
        found = true;
      }
    }
    if (!found) continue;  // no usable vector; skip this factor
    // R = I - (2/v2) v (Gv)^T
    IVec gv = imat_apply(g, v);
    IMat r = IMat::identity(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        i64 num = checked_mul(2, checked_mul(v[i], gv[j]));
        r.at(i, j) = checked_add(r.at(i, j), -(num / v2));
      }
    m = imat_mul(r, m);
  }
  return make_automorphism(lat, std::move(m));
}

// All characteristic c with c^2 = square and every |coordinate| <= bound,
// in lexicographic coordinate order.
inline std::vector<LatticeVector> enumerate_characteristics(const LatticePtr& lat, i64 target_square,
                                                            i64 bound) {
  if (bound < 0) fail(Errc::domain, "bound must be non-negative");
  int n = lat->rank();
  std::vector<LatticeVector> out;
  if (n == 0) return out;
  if (bound > 100000) fail(Errc::domain, "enumeration bound too large");
  const IMat& g = lat->gram();
  i64 gmax = 0;
  for (i64 e : g.a) gmax = std::max(gmax, e < 0 ? -e : e);
  // all partial quantities below stay far from i64 range for these limits
  if (gmax > 0 && bound > 0 && n > 0) {
    long double worst = static_cast<long double>(n) * n * gmax * bound * bound;
    if (worst > 1e17L) fail(Errc::domain, "enumeration bound too large for exact i64 arithmetic");
  }

  const std::vector<int>& res = lat->characteristic_residue();
  // suffix_abs[d] = sum over p,q >= d of |G_pq|
  std::vector<i64> suffix_abs(n + 1, 0);
  for (int d = n - 1; d >= 0; --d) {
    i64 s = suffix_abs[d + 1];
    for (int q = d; q < n; ++q) {
      i64 e = g.at(d, q);
      s += (e < 0 ? -e : e);
      if (q != d) {
        i64 e2 = g.at(q, d);
        s += (e2 < 0 ? -e2 : e2);
      }
    }
    suffix_abs[d] = s;
  }

  IVec coords(n, 0);
  IVec w(n, 0);  // w[q] = sum_{p<depth} coords[p] * G_pq

  auto dfs = [&](auto&& self, int depth, i64 quad) -> void {
    if (depth == n) {
      if (quad == target_square) out.emplace_back(lat, coords);
      return;
    }
    i64 lin_abs = 0;
    for (int q = depth; q < n; ++q) {
      i64 a = w[q] < 0 ? -w[q] : w[q];
      lin_abs += a;
    }
    i64 slack = 2 * bound * lin_abs + bound * bound * suffix_abs[depth];
    if (target_square < quad - slack || target_square > quad + slack) return;

    i64 start = -bound;
    if (((start % 2) + 2) % 2 != res[depth]) ++start;
    for (i64 v = start; v <= bound; v += 2) {
      coords[depth] = v;
      i64 quad2 = quad + v * v * g.at(depth, depth) + 2 * v * w[depth];
      for (int q = depth + 1; q < n; ++q) w[q] += v * g.at(depth, q);
      self(self, depth + 1, quad2);
      for (int q = depth + 1; q < n; ++q) w[q] -= v * g.at(depth, q);
    }
    coords[depth] = 0;
  };
  dfs(dfs, 0, 0);
  return out;
}

}  // namespace swfam
