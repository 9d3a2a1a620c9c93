#include "swfam/lattice.hpp"

#include "oracle.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

using namespace swfam;

namespace {

LatticePtr diag_lattice(const IVec& entries) {
  int n = static_cast<int>(entries.size());
  IMat g(n, n);
  std::vector<std::string> labels;
  for (int i = 0; i < n; ++i) {
    g.at(i, i) = entries[i];
    labels.push_back("d" + std::to_string(i));
  }
  return IntersectionLattice::create(std::move(g), std::move(labels));
}

LatticePtr hyperbolic() {
  IMat g(2, 2);
  g.at(0, 1) = 1;
  g.at(1, 0) = 1;
  return IntersectionLattice::create(std::move(g), {"a", "b"});
}

LatticePtr z19() {
  IVec d{1, -1, -1, -1, -1, -1, -1, -1, -1, -1};
  return diag_lattice(d);
}

LatticePtr z2_10() {
  IVec d{1, 1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1};
  return diag_lattice(d);
}

LatticeVector vec(const LatticePtr& l, IVec c) { return LatticeVector(l, std::move(c)); }

IVec fiber_class() { return IVec{3, -1, -1, -1, -1, -1, -1, -1, -1, -1}; }

}  // namespace

TEST(Lattice, SignatureAndUnimodularity) {
  auto l = z19();
  EXPECT_EQ(l->b_plus(), 1);
  EXPECT_EQ(l->b_minus(), 9);
  EXPECT_EQ(l->sigma(), -8);
  EXPECT_FALSE(l->is_even());

  auto h = hyperbolic();
  EXPECT_EQ(h->b_plus(), 1);
  EXPECT_EQ(h->b_minus(), 1);
  EXPECT_TRUE(h->is_even());

  IMat bad(2, 2);
  bad.at(0, 0) = 2;
  bad.at(1, 1) = 2;
  EXPECT_THROW(IntersectionLattice::create(std::move(bad), {"x", "y"}), Error);

  IMat asym(2, 2);
  asym.at(0, 1) = 1;
  asym.at(1, 0) = -1;
  EXPECT_THROW(IntersectionLattice::create(std::move(asym), {"x", "y"}), Error);
}

TEST(Lattice, Pairing) {
  auto l11 = diag_lattice({1, -1});
  EXPECT_EQ(pair(vec(l11, {1, 0}), vec(l11, {1, 0})), 1);

  auto h = hyperbolic();
  EXPECT_EQ(pair(vec(h, {1, 1}), vec(h, {1, 1})), 2);

  auto l = z19();
  auto f = vec(l, fiber_class());
  EXPECT_EQ(pair(f, f), 0);

  // symmetry against the naive oracle on random-ish vectors
  auto g = oracle::gram_rows(*l);
  SplitMix64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    IVec a(10), b(10);
    for (int i = 0; i < 10; ++i) {
      a[i] = rng.next_in(-9, 9);
      b[i] = rng.next_in(-9, 9);
    }
    EXPECT_EQ(pair(vec(l, a), vec(l, b)), oracle::naive_pair(g, a, b));
    EXPECT_EQ(pair(vec(l, a), vec(l, b)), pair(vec(l, b), vec(l, a)));
  }

  EXPECT_THROW(pair(vec(l11, {1, 0}), vec(h, {1, 0})), Error);
}

TEST(Lattice, Characteristic) {
  auto l = z19();
  EXPECT_TRUE(is_characteristic(vec(l, fiber_class())));

  auto l11 = diag_lattice({1, -1});
  EXPECT_FALSE(is_characteristic(vec(l11, {0, 0})));

  auto h = hyperbolic();
  EXPECT_TRUE(is_characteristic(vec(h, {0, 0})));

  // residue rows agree with the definitional check
  auto g = oracle::gram_rows(*l);
  const auto& res = l->characteristic_residue();
  IVec r(res.begin(), res.end());
  EXPECT_TRUE(oracle::naive_characteristic(g, r));
}

TEST(Lattice, Divisibility) {
  auto l = z19();
  EXPECT_EQ(divisibility(vec(l, fiber_class())), 1);
  IVec k = fiber_class();
  for (i64& v : k) v *= 3;
  EXPECT_EQ(divisibility(vec(l, k)), 3);  // K of E(1)_{2,5}
  EXPECT_EQ(divisibility(vec(l, IVec(10, 0))), 0);
}

TEST(Lattice, DirectSum) {
  auto sum = direct_sum(z19(), hyperbolic());
  EXPECT_EQ(sum->rank(), 12);
  EXPECT_EQ(sum->b_plus(), 2);
  EXPECT_EQ(sum->b_minus(), 10);

  auto empty = IntersectionLattice::create(IMat(0, 0), {});
  auto same = direct_sum(z19(), empty);
  EXPECT_EQ(same->gram(), z19()->gram());

  auto z11 = direct_sum(diag_lattice({1}), diag_lattice({-1}));
  EXPECT_EQ(z11->gram(), diag_lattice({1, -1})->gram());
}

TEST(Lattice, Reflect) {
  auto l11 = diag_lattice({1, -1});
  auto h_vec = vec(l11, {1, 0});
  EXPECT_EQ(reflect(h_vec, h_vec).coords, (IVec{-1, 0}));
  EXPECT_EQ(reflect(h_vec, vec(l11, {0, 1})).coords, (IVec{0, 1}));

  auto h = hyperbolic();
  EXPECT_EQ(reflect(vec(h, {1, 1}), vec(h, {1, 0})).coords, (IVec{0, -1}));

  // square 0 is not allowed
  EXPECT_THROW(reflect(vec(h, {1, 0}), vec(h, {0, 1})), Error);

  // involution and form preservation
  auto l = z2_10();
  SplitMix64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    IVec vc(12), xc(12);
    i64 v2 = 0;
    do {
      for (int i = 0; i < 12; ++i) vc[i] = rng.next_in(-2, 2);
      v2 = pair(vec(l, vc), vec(l, vc));
    } while (v2 != 1 && v2 != -1 && v2 != 2 && v2 != -2);
    for (int i = 0; i < 12; ++i) xc[i] = rng.next_in(-5, 5);
    auto v = vec(l, vc);
    auto x = vec(l, xc);
    auto rx = reflect(v, x);
    EXPECT_EQ(reflect(v, rx).coords, x.coords);
    EXPECT_EQ(pair(rx, rx), pair(x, x));
  }
}

TEST(Lattice, RandomAutomorphism) {
  auto l = z2_10();
  auto id = random_automorphism(l, 1, 0);
  EXPECT_TRUE(is_identity(id));

  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto phi = random_automorphism(l, seed, 8);
    // construction already validates phi^T G phi = G; cross-check one entry
    IMat check = imat_mul(imat_mul(imat_transpose(phi.matrix), l->gram()), phi.matrix);
    EXPECT_EQ(check, l->gram());
  }

  // determinism
  auto a = random_automorphism(l, 42, 6);
  auto b = random_automorphism(l, 42, 6);
  EXPECT_EQ(a.matrix, b.matrix);
}

TEST(Lattice, DivisibilityAndSquareInvariance) {
  auto l = z2_10();
  const auto& res = l->characteristic_residue();
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    IVec c(12);
    for (int i = 0; i < 12; ++i) c[i] = res[i] + 2 * rng.next_in(-2, 2);
    auto v = vec(l, c);
    ASSERT_TRUE(is_characteristic(v));
    auto phi = random_automorphism(l, 5000 + trial, 8);
    auto w = apply(phi, v);
    EXPECT_EQ(divisibility(w), divisibility(v));
    EXPECT_EQ(pair(w, w), pair(v, v));
    EXPECT_TRUE(is_characteristic(w));
  }
}

TEST(Lattice, SgnPlus) {
  auto l = z2_10();
  auto id = make_automorphism(l, IMat::identity(12));
  EXPECT_EQ(sgn_plus(id), 1);

  // -id on H^2(S2xS2)
  auto h = hyperbolic();
  IMat neg = IMat::identity(2);
  neg.at(0, 0) = -1;
  neg.at(1, 1) = -1;
  EXPECT_EQ(sgn_plus(make_automorphism(h, std::move(neg))), -1);
}

TEST(Lattice, SgnPlusMultiplicativeAndBasisIndependent) {
  auto l = z2_10();
  SplitMix64 rng(99);
  int checked_second_basis = 0;
  for (int trial = 0; trial < 150; ++trial) {
    auto phi = random_automorphism(l, 100 + trial, 7);
    auto psi = random_automorphism(l, 900 + trial, 7);
    int sp = sgn_plus(phi);
    int ss = sgn_plus(psi);
    EXPECT_EQ(sgn_plus(compose(phi, psi)), sp * ss);

    // value is independent of the positive subspace supplied
    auto mover = random_automorphism(l, 7777 + trial, 6);
    std::vector<RVec> moved;
    for (const RVec& p : l->positive_basis_vectors()) {
      RVec q(12, Rat(0));
      for (int r = 0; r < 12; ++r)
        for (int c = 0; c < 12; ++c)
          if (mover.matrix.at(r, c) != 0) q[r] += Rat(mover.matrix.at(r, c)) * p[c];
      moved.push_back(std::move(q));
    }
    auto second = make_positive_basis(l, std::move(moved));
    EXPECT_EQ(sgn_plus(phi, second), sp);
    ++checked_second_basis;
    (void)rng;
  }
  EXPECT_GE(checked_second_basis, 100);
}

TEST(Lattice, EnumerateCharacteristicsGolden) {
  auto l11 = diag_lattice({1, -1});
  auto got = enumerate_characteristics(l11, 0, 3);
  std::vector<IVec> expect{{-3, -3}, {-3, 3}, {-1, -1}, {-1, 1}, {1, -1}, {1, 1}, {3, -3}, {3, 3}};
  ASSERT_EQ(got.size(), expect.size());
  for (std::size_t i = 0; i < expect.size(); ++i) EXPECT_EQ(got[i].coords, expect[i]);

  // even lattice, odd square: empty
  EXPECT_TRUE(enumerate_characteristics(hyperbolic(), 1, 4).empty());
  EXPECT_TRUE(enumerate_characteristics(hyperbolic(), 3, 4).empty());

  // bound 0 on an odd lattice: empty
  EXPECT_TRUE(enumerate_characteristics(l11, 0, 0).empty());
}

TEST(Lattice, EnumerateMatchesBruteForce) {
  std::vector<LatticePtr> lats{diag_lattice({1, -1}), diag_lattice({1, 1, -1}), hyperbolic(),
                               direct_sum(hyperbolic(), diag_lattice({1, -1})),
                               diag_lattice({1, -1, -1, -1})};
  for (const auto& l : lats) {
    for (i64 sq : {-8, -4, -2, -1, 0, 1, 2, 4, 8}) {
      auto fast = enumerate_characteristics(l, sq, 4);
      auto slow = oracle::brute_force_characteristics(*l, sq, 4);
      ASSERT_EQ(fast.size(), slow.size()) << "square " << sq;
      std::set<IVec> fast_set, slow_set;
      for (const auto& v : fast) fast_set.insert(v.coords);
      for (const auto& v : slow) slow_set.insert(v);
      EXPECT_EQ(fast_set, slow_set);
      // output is lexicographically sorted
      for (std::size_t i = 1; i < fast.size(); ++i)
        EXPECT_LT(fast[i - 1].coords, fast[i].coords);
    }
  }
}

TEST(Lattice, VanDerBlij) {
  // c^2 = sigma mod 8, exhaustive on small ranks at bound 5
  std::vector<LatticePtr> lats{diag_lattice({1}),           diag_lattice({-1}),
                               diag_lattice({1, -1}),       hyperbolic(),
                               diag_lattice({1, 1, -1, -1}), diag_lattice({1, -1, -1, -1}),
                               direct_sum(hyperbolic(), hyperbolic())};
  for (const auto& l : lats) {
    auto all = oracle::brute_force_characteristics(*l, 0, 5);
    // re-enumerate over every characteristic in the box regardless of square
    int n = l->rank();
    auto g = oracle::gram_rows(*l);
    IVec v(n, -5);
    int count = 0;
    while (true) {
      if (oracle::naive_characteristic(g, v)) {
        i64 sq = oracle::naive_pair(g, v, v);
        EXPECT_EQ((((sq - l->sigma()) % 8) + 8) % 8, 0);
        ++count;
      }
      int i = n - 1;
      while (i >= 0 && v[i] == 5) {
        v[i] = -5;
        --i;
      }
      if (i < 0) break;
      ++v[i];
    }
    EXPECT_GT(count, 0);
    (void)all;
  }
}

TEST(Lattice, VanDerBlijFuzzRank12) {
  auto l = z2_10();
  const auto& res = l->characteristic_residue();
  SplitMix64 rng(31337);
  for (int trial = 0; trial < 10000; ++trial) {
    IVec c(12);
    for (int i = 0; i < 12; ++i) c[i] = res[i] + 2 * rng.next_in(-6, 6);
    auto v = vec(l, c);
    ASSERT_TRUE(is_characteristic(v));
    EXPECT_EQ((((pair(v, v) - l->sigma()) % 8) + 8) % 8, 0);
  }
}

TEST(Lattice, AutomorphismInverse) {
  auto l = z2_10();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto phi = random_automorphism(l, seed, 9);
    auto inv = inverse(phi);
    EXPECT_TRUE(is_identity(compose(phi, inv)));
    EXPECT_TRUE(is_identity(compose(inv, phi)));
  }
}

TEST(Lattice, PositiveBasisValidation) {
  auto l = z2_10();
  auto basis = default_positive_basis(l);
  EXPECT_EQ(static_cast<int>(basis.vectors.size()), 2);
  // negative direction is rejected
  std::vector<RVec> badv{RVec(12, Rat(0)), RVec(12, Rat(0))};
  badv[0][2] = 1;  // square -1
  badv[1][0] = 1;
  EXPECT_THROW(make_positive_basis(l, std::move(badv)), Error);
}
