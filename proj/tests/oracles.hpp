#pragma once

// Independent reference computations for the tests. Nothing here calls the library's
// arithmetic: plain 64/128-bit integers, direct products and brute force loops.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

using i64 = std::int64_t;
using i128 = __int128;

inline i64 floor_mod(i64 a, i64 b) {
  i64 r = a % b;
  return r < 0 ? r + b : r;
}

// little-endian digits in [-(b/2), b-1-(b/2)]
inline std::vector<int> signed_digits(i64 k, int b) {
  const i64 lo = -(b / 2);
  std::vector<int> d;
  while (k != 0) {
    const i64 r = floor_mod(k - lo, b) + lo;
    d.push_back(static_cast<int>(r));
    k = (k - r) / b;
  }
  return d;
}

inline i64 from_digits(const std::vector<int>& d, int b) {
  i64 v = 0;
  for (auto it = d.rbegin(); it != d.rend(); ++it) v = v * b + *it;
  return v;
}

// m_D(x) = 0 iff the fractional parts of (x1, x2) are (1/3, 2/3) or (2/3, 1/3).
// v in Z(mu_hat) iff that happens for x = A^{-j} v at some j >= 1.
inline bool zero_set_brute(i64 vx, i64 vy, int q1, int q2) {
  if (vx == 0 && vy == 0) return false;
  const i128 bx = 3 * q1, by = 3 * q2;
  i128 Bx = bx, By = by;
  const i128 ax = vx < 0 ? -static_cast<i128>(vx) : vx;
  const i128 ay = vy < 0 ? -static_cast<i128>(vy) : vy;
  for (int j = 1; j < 80; ++j) {
    // third(v, B) = r in {0,1,2} with v/B = r/3 mod 1, or -1 when v/B is not a multiple of 1/3
    auto third = [](i128 v, i128 B) -> int {
      i128 t = 3 * v;
      i128 m = t % (3 * B);
      if (m < 0) m += 3 * B;
      if (m % B != 0) return -1;
      return static_cast<int>(m / B);
    };
    const int rx = third(vx, Bx), ry = third(vy, By);
    if ((rx == 1 && ry == 2) || (rx == 2 && ry == 1)) return true;
    if (Bx > 3 * ax && By > 3 * ay) break;
    Bx *= bx;
    By *= by;
  }
  return false;
}

// 1-D: v in Z of the transform for base 3q and digits {0,1,2}
inline bool zero_set_1d_brute(i64 v, int q) {
  if (v == 0) return false;
  const i128 b = 3 * q;
  i128 B = b;
  const i128 a = v < 0 ? -static_cast<i128>(v) : v;
  for (int j = 1; j < 80; ++j) {
    i128 m = (3 * static_cast<i128>(v)) % (3 * B);
    if (m < 0) m += 3 * B;
    if (m % B == 0 && (m / B == 1 || m / B == 2)) return true;
    if (B > 3 * a) break;
    B *= b;
  }
  return false;
}

inline std::complex<double> mask(double x1, double x2) {
  const double tau = 2.0 * M_PI;
  return (1.0 + std::polar(1.0, -tau * x1) + std::polar(1.0, -tau * x2)) / 3.0;
}

inline std::complex<double> mu_hat_product(double x, double y, int q1, int q2, int depth) {
  std::complex<double> v = 1.0;
  double sx = x, sy = y;
  for (int j = 1; j <= depth; ++j) {
    sx /= 3.0 * q1;
    sy /= 3.0 * q2;
    v *= mask(sx, sy);
  }
  return v;
}

// canonical lambda_k = sum_i w_i A^{i-1} (q1, -q2), word from the balanced ternary digits of k
inline std::pair<i64, i64> canonical_lambda(i64 k, int q1, int q2) {
  const auto w = signed_digits(k, 3);
  i64 x = 0, y = 0, px = 1, py = 1;
  for (int letter : w) {
    x += letter * q1 * px;
    y -= letter * q2 * py;
    px *= 3 * q1;
    py *= 3 * q2;
  }
  return {x, y};
}

inline std::size_t ball_count_brute(const std::vector<std::pair<double, double>>& pts, double cx, double cy,
                                     double h) {
  std::size_t n = 0;
  for (auto [x, y] : pts)
    if (std::hypot(x - cx, y - cy) < h) ++n;
  return n;
}

inline double ls_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(ys.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

// seeded generator for property tests
struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}
  i64 range(i64 lo, i64 hi) { return std::uniform_int_distribution<i64>(lo, hi)(rng); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  bool coin() { return range(0, 1) == 1; }
};

}  // namespace oracle
