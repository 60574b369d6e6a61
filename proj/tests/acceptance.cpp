// One PASS/FAIL line per acceptance criterion. Exit status is nonzero if any line fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "spectra/construct.hpp"
#include "spectra/dimension.hpp"
#include "spectra/fourier.hpp"
#include "spectra/lattice.hpp"
#include "spectra/verify.hpp"

using namespace spectra;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;
// criterion 4 reuses prefixes verified by 7 and 8, so lines are collected and printed by id
std::map<int, std::string> lines;

void report(int id, bool pass, const std::string& detail) {
  char head[16];
  std::snprintf(head, sizeof head, "%s %2d  ", pass ? "PASS" : "FAIL", id);
  lines[id] = head + detail;
  if (!pass) ++failures;
}

// runs a criterion body, turning an escaped exception into a FAIL line
void criterion(int id, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, false, std::string("exception: ") + e.what());
  }
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<LabeledPoint> canonical(const MatrixParams& p, SpectrumBound b) {
  return enumerate_spectrum(TreeMappingSpec::canonical(), p, b).labeled();
}

// finite sets (a single point) have dimension 0
double estimate(const std::vector<LabeledPoint>& pts, const MatrixParams& p, double log2_radius) {
  if (pts.size() <= 1) return 0.0;
  PointCloud cloud(pts, p);
  return beurling_dim_estimate(cloud, std::nullopt, {}, log2_radius).slope;
}

// every orthogonality-verified prefix, for criteria 4 and 9
struct Verified {
  std::string name;
  MatrixParams p;
  std::vector<LabeledPoint> pts;
  double log2_radius;
};
std::vector<Verified> verified;

void c1() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::ostringstream d;
  for (auto [q1, q2] : {std::pair{1, 1}, {1, 2}, {2, 3}}) {
    const MatrixParams p(q1, q2);
    const auto pts = canonical(p, SpectrumBound::range(364));
    const auto r = check_orthogonality(pts, p);
    ok = ok && pts.size() == 729 && r.pass() && !r.sampled;
    d << "p=(" << q1 << "," << q2 << ") pairs=" << r.pairs_checked << " violations=" << r.violations.size() << "; ";
    if (r.pass())
      verified.push_back({"canonical", p, pts, completeness_log2_radius(TreeMappingSpec::canonical(), p, 364)});
  }
  const double s = seconds_since(t0);
  report(1, ok && s < 60, "exact orthogonality, |k| <= 364: " + d.str() + fmt("%.1f s (< 60 s)", s));
}

void c2() {
  const auto t0 = Clock::now();
  double worst = 0;
  for (auto [q1, q2] : {std::pair{1, 1}, {1, 2}}) {
    const MatrixParams p(q1, q2);
    for (int n = 1; n <= 5; ++n) worst = std::max(worst, gram_unitarity(n, canonical(p, SpectrumBound::level(n)), p));
  }
  const double s = seconds_since(t0);
  report(2, worst < 1e-9 && s < 30,
         "Gram unitarity n = 1..5, p in {(1,1),(1,2)}: max deviation " + fmt("%.3g", worst) + fmt(", %.1f s", s));
}

void c3() {
  bool ok = true;
  double min_gap = 1.0, max_gap = 0.0, worst_excess = -1.0;
  for (auto [q1, q2] : {std::pair{1, 1}, {1, 2}}) {
    const MatrixParams p(q1, q2);
    const auto all = canonical(p, SpectrumBound::level(6));
    std::vector<std::vector<LabeledPoint>> levels(7);
    for (int n = 0; n <= 6; ++n)
      for (const auto& pt : all)
        if (std::llabs(pt.k) <= alpha(n)) levels[static_cast<std::size_t>(n)].push_back(pt);
    std::mt19937_64 rng(2024);
    const auto box = sampling_box(p);
    for (int i = 0; i < 100; ++i) {
      const Vec2 xi = box.sample(rng);
      QSum prev{};
      for (int n = 0; n <= 6; ++n) {
        const auto q = q_sum(xi, levels[static_cast<std::size_t>(n)], p);
        ok = ok && q.value - q.error <= 1.0 + 1e-9;
        worst_excess = std::max(worst_excess, q.value - 1.0);
        if (n > 0) ok = ok && q.value + q.error + prev.error >= prev.value;
        prev = q;
      }
      min_gap = std::min(min_gap, 1.0 - prev.value);
      max_gap = std::max(max_gap, 1.0 - prev.value);
    }
  }
  report(3, ok,
         "Q_n(xi) <= 1 + 1e-9 and nondecreasing for n <= 6, 100 xi per p in {(1,1),(1,2)}; gap 1 - Q_6 in [" +
             fmt("%.3g", min_gap) + fmt(", %.3g]", max_gap) + fmt(", max Q - 1 = %.3g", worst_excess));
}

void c4() {
  const MatrixParams p(1, 2);
  const double ref = std::log(3.0) / std::log(6.0);
  PointCloud cloud(canonical(p, SpectrumBound::level(10)), p);
  const double est = beurling_dim_estimate(cloud, ScaleWindow{4, 10}, {}).slope;
  bool ok = std::abs(est - ref) <= 0.08;
  std::ostringstream d;
  d << fmt("Lambda_max p=(1,2), h = 6^4..6^10: %.5f", est) << fmt(" vs %.5f (+-0.08)", ref);
  // upper bound per verified prefix: log3/log(3 q2) of its own parameters
  double worst = -1e9;
  for (const auto& v : verified) {
    const double e = estimate(v.pts, v.p, v.log2_radius);
    worst = std::max(worst, e - beurling_upper_bound(v.p));
  }
  ok = ok && worst <= 0.08;
  d << "; " << verified.size() << " verified prefixes, max(estimate - bound) = " << fmt("%.4f", worst);
  report(4, ok, d.str());
}

void c5() {
  bool ok = true;
  std::ostringstream d;
  const auto e11 = entropy_dim_closed_form(MatrixParams(1, 1));
  const auto e12 = entropy_dim_closed_form(MatrixParams(1, 2));
  // direct evaluation at p=(1,2)
  const double h = -(2.0 / 3 * std::log(2.0 / 3) + 1.0 / 3 * std::log(1.0 / 3));
  const double dx = h / std::log(3.0);
  const double ref12 = (dx * (std::log(6.0) - std::log(3.0)) + std::log(3.0)) / std::log(6.0);
  ok = ok && std::abs(e11.dim - 1.0) <= 1e-5 && std::abs(e12.dim - ref12) <= 1e-5 && std::abs(e12.dim - 0.83728) <= 1e-5;
  d << fmt("dim_e(1,1) = %.6f", e11.dim) << fmt(", dim_e(1,2) = %.6f", e12.dim);
  const double mc = entropy_dim_monte_carlo(MatrixParams(1, 2), 8, 100000, 0);
  ok = ok && std::abs(mc - e12.dim) <= 0.1;
  d << fmt(", Monte Carlo n=8 %.4f", mc);
  int chain = 0, haus = 0, grid = 0;
  for (int q1 = 1; q1 <= 6; ++q1)
    for (int q2 = q1 + 1; q2 <= 6; ++q2) {
      const MatrixParams p(q1, q2);
      const auto e = entropy_dim_closed_form(p);
      const double lo = std::log(3.0) / std::log(3.0 * q2), hi = std::log(3.0) / std::log(3.0 * q1);
      ++grid;
      if (lo < e.dim && e.dim < hi && e.chain_ok) ++chain;
      if (support_hausdorff_dim(p).value > lo) ++haus;
    }
  ok = ok && chain == grid && haus == grid;
  d << "; chain " << chain << "/" << grid << ", Hausdorff > lower " << haus << "/" << grid;
  report(5, ok, d.str());
}

void c6() {
  const MatrixParams p(1, 2);
  const auto L = enumerate_digit_sets(p).l_set;
  oracle::Gen g(6);
  double worst = 0;
  int n = 0;
  while (n < 20) {
    const auto period = static_cast<std::size_t>(g.range(1, 8));
    std::vector<bool> bits(period);
    for (std::size_t i = 0; i < period; ++i) bits[i] = g.coin();
    if (std::find(bits.begin(), bits.end(), true) == bits.end()) continue;
    const auto pat = PatternSpec::periodic(bits);
    // Lambda_max digits on active positions only
    IntermediateSpec s = make_intermediate(0.0, p, LatticeVec(0L, 1L));
    s.gamma_t.d = static_cast<long double>(pat.frequency());
    s.gamma_t.pattern = pat;
    const auto pts = f_t_points(s, 12);
    const double est = estimate(pts, p, f_t_log2_radius(s, 12));
    worst = std::max(worst, std::abs(est - formula_dim_2d(3, 6, L, pat)));
    ++n;
  }
  report(6, worst <= 0.05, "20 seeded periodic patterns, depth 12: max |estimate - formula| = " + fmt("%.4f", worst));
}

void c7() {
  const MatrixParams p(4, 4);
  const auto spec = make_intermediate(0.0, p);
  const auto pts = build_intermediate_spectrum(spec, SpectrumBound::range(50)).labeled();
  const auto lr = lacunary_check(pts, p, 36.0);
  const double est = estimate(pts, p, completeness_log2_radius(spec.tree(), p, 50));
  const bool orth = check_orthogonality(pts, p).pass();
  if (orth) verified.push_back({"all-kicked (4,4)", p, pts, completeness_log2_radius(spec.tree(), p, 50)});
  report(7, lr.pass && est < 0.1,
         "all-kicked p=(4,4), |k| <= 50: lacunary b = 36 " + std::string(lr.pass ? "holds" : "fails") +
             fmt(" (min ratio %.1f)", lr.min_ratio) + fmt(", estimate %.4f (< 0.1)", est));
}

void c8() {
  const MatrixParams p(4, 8);
  const double tm = t_max(p);
  bool ok = true;
  std::ostringstream d;
  d << "p=(4,8), Coherent, |k| <= 364, 4 variants:";
  for (double t : {0.0, 0.15, 0.3, tm}) {
    const auto fam = family_variants(t, p, 4, 0);
    bool orth = true;
    double lp_max = 0;
    std::vector<double> est_t;
    std::vector<std::set<std::string>> keys;
    for (const auto& spec : fam) {
      const auto prefix = build_intermediate_spectrum(spec, SpectrumBound::range(364));
      const auto pts = prefix.labeled();
      const bool o = check_orthogonality(pts, p).pass();
      orth = orth && o;
      if (o && &spec == &fam.front())
        verified.push_back({"Lambda_t", p, pts, completeness_log2_radius(spec.tree(), p, 364)});
      const auto split = split_prefix(prefix, spec);
      lp_max = std::max(lp_max, estimate(split.lambda_prime, p, lambda_prime_log2_radius(spec, 364)));
      est_t.push_back(estimate(pts, p, completeness_log2_radius(spec.tree(), p, 364)));
      std::set<std::string> k;
      for (const auto& pt : pts) k.insert(std::to_string(pt.k) + ":" + describe(pt.lambda, p));
      keys.push_back(std::move(k));
    }
    // F_t never carries kicks, so it is shared by all variants
    const double ft = estimate(f_t_points(fam.front(), 12), p, f_t_log2_radius(fam.front(), 12));
    bool distinct = true;
    for (std::size_t a = 0; a < keys.size(); ++a)
      for (std::size_t b = a + 1; b < keys.size(); ++b) distinct = distinct && keys[a] != keys[b];
    const auto [mn, mx] = std::minmax_element(est_t.begin(), est_t.end());
    const bool row = orth && std::abs(ft - t) <= 0.1 && lp_max < 0.1 && distinct && *mx - *mn <= 0.1;
    ok = ok && row;
    d << fmt(" [t=%.4f", t) << (orth ? " orth ok" : " orth FAIL") << fmt(", F_t %.3f", ft)
      << fmt(", Lambda' %.3f", lp_max) << (distinct ? ", distinct" : ", variants NOT distinct: no kicked index")
      << fmt(", spread %.3f]", *mx - *mn);
  }
  // the remaining listed t lie above log3/log24 and must be refused
  for (double t : {0.45, std::log(3.0) / std::log(6.0)}) {
    bool refused = false;
    try {
      make_intermediate(t, p);
    } catch (const std::invalid_argument&) {
      refused = true;
    }
    ok = ok && refused;
    d << fmt(" [t=%.4f ", t) << (refused ? "refused: above t_max]" : "accepted]");
  }
  report(8, ok, d.str());
}

void c9() {
  bool ok = true;
  for (const auto& v : verified) {
    ok = ok && check_distinct_lines(v.pts, v.p).pass() && check_projection_orthogonality(v.pts, v.p).pass();
  }
  // injected counterexamples on a verified canonical prefix
  const MatrixParams p(1, 2);
  auto base = canonical(p, SpectrumBound::level(4));
  const LatticeVec l1 = base.back().lambda.materialize(p);
  auto shared = base;
  shared.push_back({1'000'000, SparseVec(LatticeVec(l1.x, l1.y + 1))});
  auto proj = base;
  proj.push_back({1'000'000, SparseVec(LatticeVec(l1.x + 1, l1.y + 3 * 6 * 6 * 6 * 6 * 6))});
  const bool lines_caught = !check_distinct_lines(shared, p).pass() && !check_orthogonality(shared, p).pass();
  const bool proj_caught = !check_projection_orthogonality(proj, p).pass() && !check_orthogonality(proj, p).pass();
  ok = ok && lines_caught && proj_caught;
  report(9, ok,
         std::to_string(verified.size()) + " verified prefixes pass lines and projections; injected shared-x pair " +
             (lines_caught ? "detected" : "missed") + ", injected projection pair " +
             (proj_caught ? "detected" : "missed"));
}

void c10() {
  const MatrixParams p(4, 4);
  auto spec = [](KickMode m) {
    return TreeMappingSpec::kicked(OffsetRule::table({{1, 1}}), LatticeVec(1L, -1L), m);
  };
  const auto lit = check_orthogonality(enumerate_spectrum(spec(KickMode::Literal), p, SpectrumBound::range(40)));
  const auto coh = check_orthogonality(enumerate_spectrum(spec(KickMode::Coherent), p, SpectrumBound::range(40)));
  report(10, !lit.pass() && coh.pass(),
         "p=(4,4), m_1 = 1, |k| <= 40: Literal " + std::to_string(lit.violations.size()) + " violations, Coherent " +
             std::to_string(coh.violations.size()));
}

void c11() {
  const auto t0 = Clock::now();
  bool ok = true;
  oracle::Gen g(11);
  for (int b : {3, 6, 9, 12, 24})
    for (std::int64_t k = -3000; k <= 3000; ++k) ok = ok && signed_expansion(k, b) == oracle::signed_digits(k, b);
  for (int b : {3, 6, 12})
    for (int i = 0; i < 100000; ++i) {
      const std::int64_t k = g.range(-1'000'000'000'000LL, 1'000'000'000'000LL);
      ok = ok && reconstruct_scalar(signed_expansion(k, b), b) == k;
    }
  std::set<std::vector<int>> seen;
  for (std::int64_t k = -10000; k <= 10000; ++k) ok = ok && seen.insert(signed_expansion(k, 3)).second;
  int residue = 0;
  for (int q1 = 1; q1 <= 6; ++q1)
    for (int q2 = q1; q2 <= 6; ++q2) {
      const MatrixParams p(q1, q2);
      if (verify_residue_decomposition(p).pass) ++residue;
      for (int i = 0; i < 500; ++i) {
        const LatticeVec v(g.range(-1'000'000'000, 1'000'000'000), g.range(-1'000'000'000, 1'000'000'000));
        ok = ok && reconstruct(a_adic_expansion(v, p), p) == v;
      }
    }
  ok = ok && residue == 21;
  const double s = seconds_since(t0);
  report(11, ok && s < 10,
         "signed expansions (oracle, round trip, uniqueness), A-adic round trips, residue decomposition " +
             std::to_string(residue) + "/21" + fmt(", %.1f s (< 10 s)", s));
}

}  // namespace

int main() {
  criterion(1, c1);
  criterion(2, c2);
  criterion(3, c3);
  criterion(7, c7);
  criterion(8, c8);
  criterion(4, c4);
  criterion(5, c5);
  criterion(6, c6);
  criterion(9, c9);
  criterion(10, c10);
  criterion(11, c11);
  for (const auto& [id, line] : lines) std::printf("%s\n", line.c_str());
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
