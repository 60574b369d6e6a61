#include "spectra/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace spectra {

namespace {

using Finding = std::pair<std::pair<std::size_t, std::size_t>, std::string>;

// Checks either every pair (i < j) or a seeded sample; `check` returns a reason on failure.
// Findings come back sorted by (i, j) regardless of the schedule.
template <class Check>
std::vector<Finding> scan_pairs(std::size_t n, const PairwiseOptions& opt, bool parallel, std::size_t& checked,
                                bool& sampled, Check check) {
  std::vector<Finding> out;
  sampled = n > opt.full_limit;
  if (n < 2) {
    checked = 0;
    return out;
  }
  if (!sampled) {
    checked = n * (n - 1) / 2;
    const auto ni = static_cast<std::int64_t>(n);
#pragma omp parallel if (parallel)
    {
      std::vector<Finding> local;
#pragma omp for schedule(dynamic, 16) nowait
      for (std::int64_t i = 0; i < ni; ++i) {
        for (std::size_t j = static_cast<std::size_t>(i) + 1; j < n; ++j) {
          if (auto r = check(static_cast<std::size_t>(i), j)) local.push_back({{static_cast<std::size_t>(i), j}, *r});
        }
      }
#pragma omp critical
      out.insert(out.end(), local.begin(), local.end());
    }
  } else {
    std::mt19937_64 rng(opt.seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<std::pair<std::size_t, std::size_t>> plan;
    plan.reserve(opt.sample_pairs);
    while (plan.size() < opt.sample_pairs) {
      std::size_t i = pick(rng), j = pick(rng);
      if (i == j) continue;
      plan.emplace_back(std::min(i, j), std::max(i, j));
    }
    std::sort(plan.begin(), plan.end());
    plan.erase(std::unique(plan.begin(), plan.end()), plan.end());
    checked = plan.size();
    const auto np = static_cast<std::int64_t>(plan.size());
#pragma omp parallel if (parallel)
    {
      std::vector<Finding> local;
#pragma omp for schedule(dynamic, 256) nowait
      for (std::int64_t t = 0; t < np; ++t) {
        const auto [i, j] = plan[static_cast<std::size_t>(t)];
        if (auto r = check(i, j)) local.push_back({{i, j}, *r});
      }
#pragma omp critical
      out.insert(out.end(), local.begin(), local.end());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

OrthogonalityReport orthogonality_impl(std::span<const LabeledPoint> pts, const MatrixParams& p,
                                       const PairwiseOptions& opt, bool parallel) {
  OrthogonalityReport rep;
  auto found = scan_pairs(pts.size(), opt, parallel, rep.pairs_checked, rep.sampled,
                          [&](std::size_t i, std::size_t j) -> std::optional<std::string> {
                            SparseVec d = pts[i].lambda - pts[j].lambda;
                            if (d.is_zero()) return std::string("coincident");
                            if (in_zero_set(d, p)) return std::nullopt;
                            return std::string("difference not in Z(mu_hat)");
                          });
  for (auto& [ij, reason] : found) {
    const auto& a = pts[ij.first];
    const auto& b = pts[ij.second];
    rep.violations.push_back({a.k, b.k, describe(a.lambda - b.lambda, p), reason});
  }
  return rep;
}

}  // namespace

std::string describe(const SparseVec& v, const MatrixParams& /*p*/) {
  if (v.is_zero()) return "(0,0)";
  std::string s;
  for (const auto& t : v.terms()) {
    if (!s.empty()) s += " + ";
    if (t.power != 0) s += "A^" + std::to_string(t.power);
    s += to_string(t.coef);
  }
  return s;
}

OrthogonalityReport check_orthogonality(std::span<const LabeledPoint> pts, const MatrixParams& p,
                                        const PairwiseOptions& opt) {
  return orthogonality_impl(pts, p, opt, true);
}

OrthogonalityReport check_orthogonality(const SpectrumPrefix& prefix, const PairwiseOptions& opt) {
  auto pts = prefix.labeled();
  return check_orthogonality(pts, prefix.params, opt);
}

OrthogonalityReport check_orthogonality_serial(std::span<const LabeledPoint> pts, const MatrixParams& p,
                                               const PairwiseOptions& opt) {
  return orthogonality_impl(pts, p, opt, false);
}

LineReport check_distinct_lines(std::span<const LabeledPoint> pts, const MatrixParams& p,
                                const PairwiseOptions& opt) {
  LineReport rep;
  auto found = scan_pairs(pts.size(), opt, true, rep.pairs_checked, rep.sampled,
                          [&](std::size_t i, std::size_t j) -> std::optional<std::string> {
                            SparseVec d = pts[i].lambda - pts[j].lambda;
                            if (!strip_axis(d, p, 0)) return std::string("shared x");
                            if (!strip_axis(d, p, 1)) return std::string("shared y");
                            return std::nullopt;
                          });
  for (auto& [ij, reason] : found) {
    rep.violations.push_back({pts[ij.first].k, pts[ij.second].k,
                              describe(pts[ij.first].lambda - pts[ij.second].lambda, p), reason});
  }
  return rep;
}

LineReport check_projection_orthogonality(std::span<const LabeledPoint> pts, const MatrixParams& p,
                                          const PairwiseOptions& opt) {
  LineReport rep;
  auto found = scan_pairs(pts.size(), opt, true, rep.pairs_checked, rep.sampled,
                          [&](std::size_t i, std::size_t j) -> std::optional<std::string> {
                            SparseVec d = pts[i].lambda - pts[j].lambda;
                            if (!zero_set_1d(d, p, 0)) return std::string("x-projection");
                            if (!zero_set_1d(d, p, 1)) return std::string("y-projection");
                            return std::nullopt;
                          });
  for (auto& [ij, reason] : found) {
    rep.violations.push_back({pts[ij.first].k, pts[ij.second].k,
                              describe(pts[ij.first].lambda - pts[ij.second].lambda, p), reason});
  }
  return rep;
}

namespace {

// lambda[axis] mod b^n as a nonnegative integer
BigInt residue_mod_power(const SparseVec& v, const MatrixParams& p, int axis, int n) {
  const BigInt M = pow_base(p.base(axis), n);
  BigInt r = 0;
  for (const auto& t : v.terms()) {
    if (t.power >= n) continue;
    r += t.coef[axis] * pow_base(p.base(axis), t.power);
  }
  mpz_fdiv_r(r.get_mpz_t(), r.get_mpz_t(), M.get_mpz_t());
  return r;
}

double gram_impl(int n, std::span<const LabeledPoint> pts, const MatrixParams& p, bool parallel) {
  if (n < 0) throw std::invalid_argument("gram_unitarity: n must be >= 0");
  std::size_t N = 1;
  for (int i = 0; i < n; ++i) N *= 3;
  if (pts.size() != N) {
    throw std::invalid_argument("gram_unitarity: expected 3^" + std::to_string(n) + " = " + std::to_string(N) +
                                " points, got " + std::to_string(pts.size()));
  }
  // frac(lambda_c / b_c^j) for j = 1..n
  std::vector<std::vector<double>> fx(N, std::vector<double>(n + 1)), fy(N, std::vector<double>(n + 1));
  for (std::size_t r = 0; r < N; ++r) {
    for (int axis = 0; axis < 2; ++axis) {
      BigInt res = residue_mod_power(pts[r].lambda, p, axis, n);
      auto& f = axis == 0 ? fx[r] : fy[r];
      for (int j = 1; j <= n; ++j) {
        BigInt m = pow_base(p.base(axis), j);
        BigInt rj;
        mpz_fdiv_r(rj.get_mpz_t(), res.get_mpz_t(), m.get_mpz_t());
        mpq_class q(rj, m);
        f[j] = q.get_d();
      }
    }
  }
  // atoms enumerated by base-3 counter over D = {(0,0),(1,0),(0,1)} per level
  static const int dx[3] = {0, 1, 0};
  static const int dy[3] = {0, 0, 1};
  const double scale = 1.0 / std::sqrt(static_cast<double>(N));
  std::vector<Complex> U(N * N);
  for (std::size_t a = 0; a < N; ++a) {
    for (std::size_t r = 0; r < N; ++r) {
      double phase = 0.0;
      std::size_t code = a;
      for (int j = 1; j <= n; ++j) {
        const int d = static_cast<int>(code % 3);
        code /= 3;
        phase += dx[d] * fx[r][j] + dy[d] * fy[r][j];
      }
      phase -= std::floor(phase);
      U[a * N + r] = std::polar(scale, -2.0 * std::numbers::pi * phase);
    }
  }
  double worst = 0.0;
  const auto Ni = static_cast<std::int64_t>(N);
#pragma omp parallel for schedule(dynamic) reduction(max : worst) if (parallel)
  for (std::int64_t r = 0; r < Ni; ++r) {
    for (std::size_t s = 0; s < N; ++s) {
      Complex g = 0.0;
      for (std::size_t a = 0; a < N; ++a) g += std::conj(U[a * N + static_cast<std::size_t>(r)]) * U[a * N + s];
      if (static_cast<std::size_t>(r) == s) g -= 1.0;
      worst = std::max(worst, std::abs(g));
    }
  }
  return worst;
}

}  // namespace

double gram_unitarity(int n, std::span<const LabeledPoint> pts, const MatrixParams& p) {
  return gram_impl(n, pts, p, true);
}

double gram_unitarity_serial(int n, std::span<const LabeledPoint> pts, const MatrixParams& p) {
  return gram_impl(n, pts, p, false);
}

Vec2 SamplingBox::sample(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> ux(-hx, hx), uy(-hy, hy);
  Vec2 v;
  v.x = ux(rng);
  v.y = uy(rng);
  return v;
}

SamplingBox sampling_box(const MatrixParams& p) {
  SamplingBox b;
  b.hx = p.base_x() / (2.0 * (p.base_x() - 1.0));
  b.hy = p.base_y() / (2.0 * (p.base_y() - 1.0));
  return b;
}

QSum q_sum(const Vec2& xi, std::span<const LabeledPoint> pts, const MatrixParams& p, double tolerance) {
  const std::size_t N = pts.size();
  std::vector<double> val(N), err(N);
  const double target = tolerance / (4.0 * std::max<std::size_t>(N, 1));
  const auto Ni = static_cast<std::int64_t>(N);
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t i = 0; i < Ni; ++i) {
    auto t = mu_hat_shifted(xi, pts[static_cast<std::size_t>(i)].lambda, p, target);
    const double m = std::abs(t.value);
    const double v = m * m;
    const double hi = std::min(1.0, m + t.tail_bound);
    const double lo = std::max(0.0, m - t.tail_bound);
    val[static_cast<std::size_t>(i)] = v;
    err[static_cast<std::size_t>(i)] = std::max(hi * hi - v, v - lo * lo);
  }
  QSum q;
  // fixed summation order keeps results schedule-independent
  for (std::size_t i = 0; i < N; ++i) {
    q.value += val[i];
    q.error += err[i];
  }
  return q;
}

std::vector<ProbeResult> maximality_probe(std::span<const LabeledPoint> pts, const MatrixParams& p, long box) {
  std::vector<ProbeResult> out;
  for (long x = -box; x <= box; ++x) {
    for (long y = -box; y <= box; ++y) {
      SparseVec g{LatticeVec(x, y)};
      bool member = false;
      std::optional<std::int64_t> witness;
      for (const auto& pt : pts) {
        SparseVec d = g - pt.lambda;
        if (d.is_zero()) {
          member = true;
          break;
        }
        if (!witness && !in_zero_set(d, p)) witness = pt.k;
      }
      if (member) continue;
      ProbeResult r;
      r.gamma = LatticeVec(x, y);
      if (witness) {
        r.verdict = ProbeVerdict::Conflict;
        r.witness_k = witness;
      }
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace spectra
