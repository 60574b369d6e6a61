#include "spectra/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace spectra {

long double to_long_double(const BigInt& v) {
  if (mpz_fits_slong_p(v.get_mpz_t())) return static_cast<long double>(mpz_get_si(v.get_mpz_t()));
  const std::size_t bits = mpz_sizeinbase(v.get_mpz_t(), 2);
  const std::size_t shift = bits - 64;
  if (shift > 16300) return v < 0 ? -HUGE_VALL : HUGE_VALL;
  BigInt t = abs(v);
  mpz_fdiv_q_2exp(t.get_mpz_t(), t.get_mpz_t(), shift);
  long double r = std::ldexp(static_cast<long double>(mpz_get_ui(t.get_mpz_t())), static_cast<int>(shift));
  return v < 0 ? -r : r;
}

namespace {

constexpr double kFarLog2 = 16000.0;
constexpr long double kTwo62 = 4611686018427387904.0L;

double log2_abs(const BigInt& v) {
  if (v == 0) return -std::numeric_limits<double>::infinity();
  long e = 0;
  double m = mpz_get_d_2exp(&e, v.get_mpz_t());
  return std::log2(std::abs(m)) + static_cast<double>(e);
}

bool integral(long double v) { return std::floor(v) == v; }

// |(dx, dy)| < h, exact for integer offsets and radii below 2^62
bool norm_less(long double dx, long double dy, long double h) {
  dx = std::fabs(dx);
  dy = std::fabs(dy);
  if (dx < kTwo62 && dy < kTwo62 && h < kTwo62 && integral(dx) && integral(dy) && integral(h)) {
    using U = unsigned __int128;
    const U x = static_cast<U>(static_cast<std::uint64_t>(dx));
    const U y = static_cast<U>(static_cast<std::uint64_t>(dy));
    const U r = static_cast<U>(static_cast<std::uint64_t>(h));
    return x * x + y * y < r * r;
  }
  if (dx >= h || dy >= h) return false;
  return dx * dx + dy * dy < h * h;
}

bool same_group(const ScaledPoint& a, const ScaledPoint& b) {
  if (!a.has_kick && !b.has_kick) return true;
  return a.has_kick && b.has_kick && a.kick_exp == b.kick_exp && a.kick_x == b.kick_x && a.kick_y == b.kick_y;
}

double log2_sum(double a, double b) {
  const double hi = std::max(a, b), lo = std::min(a, b);
  if (!std::isfinite(lo)) return hi;
  return hi + std::log2(1.0 + std::exp2(lo - hi));
}

}  // namespace

ScaledPoint to_scaled(const SparseVec& v, const MatrixParams& p) {
  ScaledPoint s;
  const double lbx = std::log2(static_cast<double>(p.base_x()));
  const double lby = std::log2(static_cast<double>(p.base_y()));
  for (const auto& t : v.terms()) {
    const double lead = std::max(static_cast<double>(t.power) * lbx + log2_abs(t.coef.x),
                                 static_cast<double>(t.power) * lby + log2_abs(t.coef.y));
    if (t.power == 0 || lead < 62.0) {
      s.bx += to_long_double(t.coef.x) * std::pow(static_cast<long double>(p.base_x()), t.power);
      s.by += to_long_double(t.coef.y) * std::pow(static_cast<long double>(p.base_y()), t.power);
      continue;
    }
    if (s.has_kick) throw std::invalid_argument("to_scaled: more than one large term is not supported");
    if (!mpz_fits_slong_p(t.coef.x.get_mpz_t()) || !mpz_fits_slong_p(t.coef.y.get_mpz_t())) {
      throw std::invalid_argument("to_scaled: kick digit does not fit a machine integer");
    }
    s.has_kick = true;
    s.kick_exp = t.power;
    s.kick_x = t.coef.x.get_si();
    s.kick_y = t.coef.y.get_si();
    s.far = lead > kFarLog2;
    s.log2_mag = lead;
  }
  if (!s.far) {
    s.fx = s.bx;
    s.fy = s.by;
    if (s.has_kick) {
      s.fx += s.kick_x * std::pow(static_cast<long double>(p.base_x()), static_cast<long double>(s.kick_exp));
      s.fy += s.kick_y * std::pow(static_cast<long double>(p.base_y()), static_cast<long double>(s.kick_exp));
    }
    const long double m = std::hypot(s.fx, s.fy);
    s.log2_mag = m > 0 ? static_cast<double>(std::log2(m)) : -std::numeric_limits<double>::infinity();
  }
  return s;
}

PointCloud::PointCloud(std::span<const LabeledPoint> pts, const MatrixParams& p) : params_(p) {
  pts_.reserve(pts.size());
  labels_.reserve(pts.size());
  for (const auto& lp : pts) {
    pts_.push_back(to_scaled(lp.lambda, p));
    labels_.push_back(lp.k);
  }
  for (std::size_t i = 0; i < pts_.size(); ++i) {
    max_log2_mag_ = std::max(max_log2_mag_, pts_[i].log2_mag);
    if (pts_[i].far) {
      far_groups_[{pts_[i].kick_exp, pts_[i].kick_x, pts_[i].kick_y}].push_back(i);
    } else {
      near_order_.push_back(i);
    }
  }
  std::sort(near_order_.begin(), near_order_.end(),
            [&](std::size_t a, std::size_t b) { return pts_[a].fy < pts_[b].fy || (pts_[a].fy == pts_[b].fy && a < b); });
  near_y_.reserve(near_order_.size());
  for (std::size_t i : near_order_) near_y_.push_back(pts_[i].fy);
}

bool PointCloud::within(std::size_t i, std::size_t j, long double h) const {
  const auto& a = pts_[i];
  const auto& b = pts_[j];
  if (same_group(a, b)) return norm_less(b.bx - a.bx, b.by - a.by, h);
  if (a.far || b.far) return false;
  return norm_less(b.fx - a.fx, b.fy - a.fy, h);
}

std::size_t PointCloud::count_around(std::size_t i, long double h) const {
  const auto& c = pts_[i];
  std::size_t n = 0;
  if (c.far) {
    for (std::size_t j : far_groups_.at({c.kick_exp, c.kick_x, c.kick_y})) n += within(i, j, h) ? 1 : 0;
    return n;
  }
  const long double margin = 8.0L * std::numeric_limits<long double>::epsilon() * (std::fabs(c.fy) + 1.0L);
  auto lo = std::lower_bound(near_y_.begin(), near_y_.end(), c.fy - h - margin);
  auto hi = std::upper_bound(near_y_.begin(), near_y_.end(), c.fy + h + margin);
  for (auto it = lo; it != hi; ++it) {
    n += within(i, near_order_[static_cast<std::size_t>(it - near_y_.begin())], h) ? 1 : 0;
  }
  return n;
}

std::size_t PointCloud::count_around(long double cx, long double cy, long double h) const {
  std::size_t n = 0;
  auto lo = std::lower_bound(near_y_.begin(), near_y_.end(), cy - h);
  auto hi = std::upper_bound(near_y_.begin(), near_y_.end(), cy + h);
  for (auto it = lo; it != hi; ++it) {
    const auto& q = pts_[near_order_[static_cast<std::size_t>(it - near_y_.begin())]];
    n += norm_less(q.fx - cx, q.fy - cy, h) ? 1 : 0;
  }
  return n;
}

std::size_t PointCloud::count_around_brute(std::size_t i, long double h) const {
  std::size_t n = 0;
  for (std::size_t j = 0; j < pts_.size(); ++j) n += within(i, j, h) ? 1 : 0;
  return n;
}

std::size_t count_in_ball(const PointCloud& cloud, long double cx, long double cy, long double h) {
  if (!(h > 0)) throw std::invalid_argument("count_in_ball: h must be positive");
  return cloud.count_around(cx, cy, h);
}

std::vector<std::size_t> select_centers(const PointCloud& cloud, const CentersPolicy& policy) {
  std::vector<std::size_t> out{kOrigin};
  const std::size_t n = cloud.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (n > policy.max_centers) {
    std::mt19937_64 rng(policy.seed);
    for (std::size_t i = 0; i < policy.max_centers; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, n - 1);
      std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(policy.max_centers);
    std::sort(idx.begin(), idx.end());
  }
  out.insert(out.end(), idx.begin(), idx.end());
  return out;
}

namespace {

std::size_t center_rank(std::size_t c) { return c == kOrigin ? 0 : c + 1; }

bool better(std::size_t count, std::size_t center, std::size_t best_count, std::size_t best_center) {
  return count > best_count || (count == best_count && center_rank(center) < center_rank(best_center));
}

template <class Count>
BallCountTable ball_counts_impl(const PointCloud& cloud, const std::vector<std::size_t>& centers,
                                const std::vector<long double>& scales, double log2_radius, bool parallel,
                                Count count) {
  const std::size_t S = scales.size();
  BallCountTable t{std::vector<std::size_t>(S, 0), std::vector<std::size_t>(S, kOrigin)};
  std::vector<double> log2h(S);
  for (std::size_t s = 0; s < S; ++s) log2h[s] = static_cast<double>(std::log2(scales[s]));
  const auto nc = static_cast<std::int64_t>(centers.size());
#pragma omp parallel if (parallel)
  {
    std::vector<std::size_t> best(S, 0), arg(S, kOrigin);
#pragma omp for schedule(dynamic, 1) nowait
    for (std::int64_t ci = 0; ci < nc; ++ci) {
      const std::size_t c = centers[static_cast<std::size_t>(ci)];
      const double lc = c == kOrigin ? -std::numeric_limits<double>::infinity() : cloud[c].log2_mag;
      for (std::size_t s = 0; s < S; ++s) {
        if (log2_sum(lc, log2h[s]) > log2_radius) break;  // ball leaves the complete region
        const std::size_t n = count(c, scales[s]);
        if (better(n, c, best[s], arg[s])) {
          best[s] = n;
          arg[s] = c;
        }
      }
    }
#pragma omp critical
    for (std::size_t s = 0; s < S; ++s) {
      if (better(best[s], arg[s], t.max_count[s], t.argmax[s])) {
        t.max_count[s] = best[s];
        t.argmax[s] = arg[s];
      }
    }
  }
  return t;
}

}  // namespace

BallCountTable ball_counts(const PointCloud& cloud, const std::vector<std::size_t>& centers,
                           const std::vector<long double>& scales, double log2_radius) {
  return ball_counts_impl(cloud, centers, scales, log2_radius, true, [&](std::size_t c, long double h) {
    return c == kOrigin ? cloud.count_around(0.0L, 0.0L, h) : cloud.count_around(c, h);
  });
}

BallCountTable ball_counts_serial(const PointCloud& cloud, const std::vector<std::size_t>& centers,
                                  const std::vector<long double>& scales, double log2_radius) {
  return ball_counts_impl(cloud, centers, scales, log2_radius, false, [&](std::size_t c, long double h) {
    if (c != kOrigin) return cloud.count_around_brute(c, h);
    std::size_t n = 0;
    for (std::size_t j = 0; j < cloud.size(); ++j) {
      if (!cloud[j].far && norm_less(cloud[j].fx, cloud[j].fy, h)) ++n;
    }
    return n;
  });
}

DimensionEstimate beurling_dim_estimate(const PointCloud& cloud, std::optional<ScaleWindow> window,
                                        const CentersPolicy& policy, double log2_radius) {
  const int b = cloud.params().base_y();
  const double lb = std::log2(static_cast<double>(b));
  ScaleWindow w;
  if (window) {
    w = *window;
    if (w.j_max - w.j_min + 1 < 4 || w.j_max - w.j_min < 3 || w.j_min < 0) {
      throw std::invalid_argument("beurling_dim_estimate: need >= 4 scales spanning >= 3 powers of 3*q2");
    }
    if (w.j_max * lb > log2_radius) {
      throw std::invalid_argument("beurling_dim_estimate: scale (3q2)^" + std::to_string(w.j_max) +
                                  " exceeds the radius where the prefix is complete");
    }
  } else {
    int J = 64;
    if (std::isfinite(log2_radius)) {
      J = std::min(J, static_cast<int>(std::floor(log2_radius / lb)));
    } else if (std::isfinite(cloud.max_log2_mag())) {
      J = std::min(J, static_cast<int>(std::ceil(cloud.max_log2_mag() / lb)) + 1);
    }
    w = ScaleWindow{1, J};
    if (J < 4) {
      throw std::invalid_argument("beurling_dim_estimate: the complete window holds only " +
                                  std::to_string(std::max(J, 0)) + " scales (need >= 4)");
    }
  }
  DimensionEstimate est;
  est.window_lo = w.j_min;
  est.window_hi = w.j_max;
  for (int j = w.j_min; j <= w.j_max; ++j) {
    est.exponents.push_back(j);
    est.scales.push_back(std::pow(static_cast<long double>(b), static_cast<long double>(j)));
  }
  auto centers = select_centers(cloud, policy);
  est.centers = centers.size();
  auto table = ball_counts(cloud, centers, est.scales, log2_radius);
  est.counts = table.max_count;
  std::vector<double> xs, ys;
  for (std::size_t s = 0; s < est.scales.size(); ++s) {
    if (est.counts[s] == 0) continue;
    xs.push_back(static_cast<double>(std::log(est.scales[s])));
    ys.push_back(std::log(static_cast<double>(est.counts[s])));
  }
  if (xs.size() < 4) throw std::invalid_argument("beurling_dim_estimate: fewer than 4 nonempty scales");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  est.slope = sxy / sxx;
  double rss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (my + est.slope * (xs[i] - mx));
    rss += r * r;
  }
  est.fit_residual = std::sqrt(rss / n);
  return est;
}

PatternSpec PatternSpec::periodic(std::vector<bool> bits) {
  if (bits.empty()) throw std::invalid_argument("periodic pattern needs at least one bit");
  PatternSpec s;
  s.kind = Kind::Periodic;
  s.bits = std::move(bits);
  return s;
}

PatternSpec PatternSpec::beatty(long double d) {
  if (!(d >= 0.0L && d <= 1.0L)) throw std::invalid_argument("Beatty density must lie in [0,1]");
  PatternSpec s;
  s.kind = Kind::Beatty;
  s.density = d;
  return s;
}

PatternSpec PatternSpec::explicit_pattern(std::function<bool(std::int64_t)> pred, double frequency) {
  PatternSpec s;
  s.kind = Kind::Explicit;
  s.predicate = std::move(pred);
  s.explicit_frequency = frequency;
  const double observed = static_cast<double>(s.active_count(10000)) / 10000.0;
  if (std::abs(observed - frequency) > 0.05) {
    throw std::invalid_argument("explicit pattern: stated frequency " + std::to_string(frequency) +
                                " disagrees with prefix average " + std::to_string(observed));
  }
  return s;
}

bool PatternSpec::active(std::int64_t i) const {
  switch (kind) {
    case Kind::Periodic: return bits[static_cast<std::size_t>((i - 1) % static_cast<std::int64_t>(bits.size()))];
    case Kind::Beatty:
      return std::floor(static_cast<long double>(i) * density) > std::floor(static_cast<long double>(i - 1) * density);
    case Kind::Explicit: return predicate(i);
  }
  return false;
}

double PatternSpec::frequency() const {
  switch (kind) {
    case Kind::Periodic:
      return static_cast<double>(std::count(bits.begin(), bits.end(), true)) / static_cast<double>(bits.size());
    case Kind::Beatty: return static_cast<double>(density);
    case Kind::Explicit: return explicit_frequency;
  }
  return 0.0;
}

std::int64_t PatternSpec::active_count(std::int64_t n) const {
  std::int64_t c = 0;
  for (std::int64_t i = 1; i <= n; ++i) c += active(i) ? 1 : 0;
  return c;
}

double formula_dim_1d(int b, const std::vector<int>& digits, const PatternSpec& pattern) {
  if (b < 2) throw std::invalid_argument("formula_dim_1d: base must be >= 2");
  std::set<int> d(digits.begin(), digits.end());
  for (int x : d) {
    if (x < digit_low(b) || x > digit_high(b)) {
      throw std::invalid_argument("formula_dim_1d: digit " + std::to_string(x) + " outside [-floor(b/2), b-1-floor(b/2)]");
    }
  }
  if (d.empty()) throw std::invalid_argument("formula_dim_1d: empty digit set");
  return pattern.frequency() * std::log(static_cast<double>(d.size())) / std::log(static_cast<double>(b));
}

double formula_dim_2d(int a, int b, const std::vector<LatticeVec>& digits, const PatternSpec& pattern,
                      int check_depth) {
  if (!(1 < a && a <= b)) throw std::invalid_argument("formula_dim_2d: need 1 < a <= b");
  std::set<LatticeVec> B(digits.begin(), digits.end());
  if (B.empty()) throw std::invalid_argument("formula_dim_2d: empty digit set");
  for (const auto& v : B) {
    if (v.y < digit_low(b) || v.y > digit_high(b)) {
      throw std::invalid_argument("formula_dim_2d: y-digit of " + to_string(v) + " outside the range for b");
    }
  }
  // generate the finite-level set and look for two points on one vertical line
  std::vector<LatticeVec> pts{LatticeVec(0L, 0L)};
  BigInt ax = 1, by = 1;
  for (int i = 1; i <= check_depth && pts.size() * B.size() <= 200000; ++i) {
    if (pattern.active(i)) {
      std::vector<LatticeVec> next;
      next.reserve(pts.size() * B.size());
      for (const auto& p : pts) {
        for (const auto& d : B) next.emplace_back(BigInt(p.x + ax * d.x), BigInt(p.y + by * d.y));
      }
      pts = std::move(next);
    }
    ax *= a;
    by *= b;
  }
  std::set<BigInt> xs;
  for (const auto& p : pts) {
    if (!xs.insert(p.x).second) {
      throw std::invalid_argument("formula_dim_2d: two generated points share the vertical line x = " + p.x.get_str() +
                                  " (one point per vertical line is required)");
    }
  }
  return pattern.frequency() * std::log(static_cast<double>(B.size())) / std::log(static_cast<double>(b));
}

LacunaryReport lacunary_check(std::span<const LabeledPoint> pts, const MatrixParams& p, double b) {
  if (!(b > 1.0)) throw std::invalid_argument("lacunary_check: b must exceed 1");
  LacunaryReport rep;
  const mpq_class bq(b);
  const BigInt num2 = bq.get_num() * bq.get_num();
  const BigInt den2 = bq.get_den() * bq.get_den();
  rep.pass = true;
  rep.leading_ok = true;
  for (int sign : {1, -1}) {
    std::vector<std::pair<std::int64_t, BigInt>> branch;  // (|k|, |a|^2)
    for (const auto& lp : pts) {
      if (lp.k == 0 || (lp.k > 0) != (sign > 0)) continue;
      LatticeVec v = lp.lambda.materialize(p);
      branch.emplace_back(lp.k, BigInt(v.x * v.x + v.y * v.y));
    }
    std::sort(branch.begin(), branch.end(),
              [](const auto& a, const auto& c) { return std::abs(a.first) < std::abs(c.first); });
    if (branch.empty()) continue;
    if (branch.front().second * den2 < num2) rep.leading_ok = false;
    for (std::size_t i = 0; i + 1 < branch.size(); ++i) {
      const BigInt& cur = branch[i].second;
      const BigInt& nxt = branch[i + 1].second;
      const bool ok = nxt * den2 >= num2 * cur;
      if (!ok) {
        rep.pass = false;
        if (!rep.first_failure) rep.first_failure = branch[i].first;
      }
      const double lr = 0.5 * (log2_abs(nxt) - log2_abs(cur));
      rep.min_ratio = std::min(rep.min_ratio, cur == 0 ? std::numeric_limits<double>::infinity() : std::exp2(lr));
    }
  }
  return rep;
}

EntropyClosedForm entropy_dim_closed_form(const MatrixParams& p) {
  EntropyClosedForm e;
  const double lx = std::log(static_cast<double>(p.base_x()));
  const double ly = std::log(static_cast<double>(p.base_y()));
  e.dim_x = (2.0 / 3.0 * std::log(2.0 / 3.0) + 1.0 / 3.0 * std::log(1.0 / 3.0)) / (-lx);
  e.dim = (e.dim_x * (ly - lx) + std::log(3.0)) / ly;
  e.lower = std::log(3.0) / ly;
  e.upper = std::log(3.0) / lx;
  if (p.q1 < p.q2) {
    e.chain_ok = e.lower < e.dim && e.dim < e.upper;
  } else {
    e.chain_ok = std::abs(e.dim - e.upper) < 1e-12;
  }
  return e;
}

double entropy_dim_monte_carlo(const MatrixParams& p, int n, std::size_t samples, std::uint64_t seed) {
  if (n < 0 || n > 30) throw std::invalid_argument("entropy_dim_monte_carlo: n must lie in [0, 30]");
  if (n == 0) return 0.0;
  if (samples == 0) throw std::invalid_argument("entropy_dim_monte_carlo: need samples");
  // truncation tail 1/((3q1)^J (3q1 - 1)) below 2^{-n-4}
  int J = 1;
  while (std::pow(static_cast<double>(p.base_x()), J) * (p.base_x() - 1) < std::exp2(n + 4)) ++J;
  std::mt19937_64 rng(seed);
  const double grid = std::exp2(n);
  std::unordered_map<std::uint64_t, std::size_t> hist;
  for (std::size_t s = 0; s < samples; ++s) {
    double x = 0.0, y = 0.0, sx = 1.0, sy = 1.0;
    for (int j = 1; j <= J; ++j) {
      sx /= p.base_x();
      sy /= p.base_y();
      switch (rng() % 3) {
        case 1: x += sx; break;
        case 2: y += sy; break;
        default: break;
      }
    }
    const auto cx = static_cast<std::uint64_t>(std::floor(x * grid));
    const auto cy = static_cast<std::uint64_t>(std::floor(y * grid));
    hist[(cx << 32) | cy]++;
  }
  double h = 0.0;
  for (const auto& [cell, c] : hist) {
    const double q = static_cast<double>(c) / static_cast<double>(samples);
    h -= q * std::log(q);
  }
  return h / (n * std::log(2.0));
}

HausdorffValue support_hausdorff_dim(const MatrixParams& p) {
  const double lx = std::log(static_cast<double>(p.base_x()));
  const double ly = std::log(static_cast<double>(p.base_y()));
  const double u = lx / ly;
  HausdorffValue h;
  h.value = std::log(std::pow(2.0, u) + 1.0) / lx;
  h.exceeds_beurling_bound = h.value > std::log(3.0) / ly;
  return h;
}

double beurling_upper_bound(const MatrixParams& p) { return std::log(3.0) / std::log(static_cast<double>(p.base_y())); }

double relative_density_check(std::span<const LabeledPoint> pts, const MatrixParams& p, int pexp) {
  if (pts.empty()) throw std::invalid_argument("relative_density_check: empty prefix");
  if (pexp < 1) throw std::invalid_argument("relative_density_check: pexp must be >= 1");
  PointCloud cloud(pts, p);
  const long double sx = std::pow(static_cast<long double>(p.base_x()), pexp);
  const long double sy = std::pow(static_cast<long double>(p.base_y()), pexp);
  double worst = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (cloud[i].far) return std::numeric_limits<double>::infinity();
    const long double tx = cloud[i].fx / sx, ty = cloud[i].fy / sy;
    long double best = HUGE_VALL;
    for (std::size_t j = 0; j < cloud.size(); ++j) {
      if (cloud[j].far) continue;
      best = std::min(best, std::hypot(cloud[j].fx - tx, cloud[j].fy - ty));
    }
    worst = std::max(worst, static_cast<double>(best));
  }
  return worst;
}

}  // namespace spectra
