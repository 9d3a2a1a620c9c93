#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace swfam {

using i64 = std::int64_t;
using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

enum class Errc {
  usage,              // bad arguments / syntax
  domain,             // value outside an operation's domain
  parent_mismatch,    // vectors from incompatible lattices
  precondition,       // violated operation precondition
  chamber_undefined,  // no invariant exists for the requested chamber
  overflow,           // exact integer result does not fit i64
  internal,           // broken internal invariant
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string msg) : std::runtime_error(std::move(msg)), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) { throw Error(code, msg); }

inline i64 checked_i64(const BigInt& v, const char* what) {
  if (v > (std::numeric_limits<i64>::max)() || v < (std::numeric_limits<i64>::min)())
    fail(Errc::overflow, std::string(what) + ": value does not fit in 64 bits");
  return static_cast<i64>(v);
}

inline i64 checked_add(i64 a, i64 b) {
  i64 r = 0;
  if (__builtin_add_overflow(a, b, &r)) fail(Errc::overflow, "integer addition overflow");
  return r;
}

inline i64 checked_mul(i64 a, i64 b) {
  i64 r = 0;
  if (__builtin_mul_overflow(a, b, &r)) fail(Errc::overflow, "integer multiplication overflow");
  return r;
}

// Row-major integer matrix; all lattice data is small and dense.
struct IMat {
  int rows = 0;
  int cols = 0;
  std::vector<i64> a;

  IMat() = default;
  IMat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0) {}

  static IMat identity(int n) {
    IMat m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }

  i64& at(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
  i64 at(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }

  bool operator==(const IMat&) const = default;
};

inline IMat imat_transpose(const IMat& m) {
  IMat t(m.cols, m.rows);
  for (int r = 0; r < m.rows; ++r)
    for (int c = 0; c < m.cols; ++c) t.at(c, r) = m.at(r, c);
  return t;
}

inline IMat imat_mul(const IMat& x, const IMat& y) {
  if (x.cols != y.rows) fail(Errc::internal, "matrix shape mismatch");
  IMat z(x.rows, y.cols);
  for (int r = 0; r < x.rows; ++r)
    for (int c = 0; c < y.cols; ++c) {
      i64 acc = 0;
      for (int k = 0; k < x.cols; ++k) acc = checked_add(acc, checked_mul(x.at(r, k), y.at(k, c)));
      z.at(r, c) = acc;
    }
  return z;
}

inline std::vector<i64> imat_apply(const IMat& m, const std::vector<i64>& v) {
  if (m.cols != static_cast<int>(v.size())) fail(Errc::internal, "matrix/vector shape mismatch");
  std::vector<i64> out(static_cast<std::size_t>(m.rows), 0);
  for (int r = 0; r < m.rows; ++r) {
    i64 acc = 0;
    for (int c = 0; c < m.cols; ++c) acc = checked_add(acc, checked_mul(m.at(r, c), v[c]));
    out[r] = acc;
  }
  return out;
}

inline BigInt bareiss_det(const IMat& m) {
  if (m.rows != m.cols) fail(Errc::internal, "determinant of non-square matrix");
  int n = m.rows;
  if (n == 0) return 1;
  std::vector<BigInt> a(static_cast<std::size_t>(n) * n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) a[static_cast<std::size_t>(r) * n + c] = m.at(r, c);
  auto at = [&](int r, int c) -> BigInt& { return a[static_cast<std::size_t>(r) * n + c]; };
  BigInt prev = 1;
  int sign = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (at(k, k) == 0) {
      int p = -1;
      for (int r = k + 1; r < n; ++r)
        if (at(r, k) != 0) {
          p = r;
          break;
        }
      if (p < 0) return 0;
      for (int c = 0; c < n; ++c) std::swap(at(k, c), at(p, c));
      sign = -sign;
    }
    for (int r = k + 1; r < n; ++r)
      for (int c = k + 1; c < n; ++c) at(r, c) = (at(r, c) * at(k, k) - at(r, k) * at(k, c)) / prev;
    prev = at(k, k);
  }
  return sign * at(n - 1, n - 1);
}

// Deterministic PRNG (splitmix64); identical output on every platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [lo, hi], inclusive.
  i64 next_in(i64 lo, i64 hi) {
    if (lo > hi) fail(Errc::internal, "empty random range");
    std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    std::uint64_t limit = (span == 0) ? 0 : (~0ULL - (~0ULL % span + 1) % span);
    std::uint64_t v = next();
    while (span != 0 && v > limit && limit != 0) v = next();
    return lo + static_cast<i64>(span == 0 ? v : v % span);
  }

 private:
  std::uint64_t state_;
};

}  // namespace swfam
