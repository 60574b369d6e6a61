#include <doctest.h>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "spectra/construct.hpp"
#include "spectra/verify.hpp"

using namespace spectra;

namespace {

LatticeVec lv(long x, long y) { return LatticeVec(x, y); }

bool same(const SparseVec& a, const SparseVec& b) { return (a - b).is_zero(); }

// Beatty membership straight from floor(i d) - floor((i-1) d), word digits from the oracle
bool gamma_oracle(std::int64_t k, long double d) {
  const auto w = oracle::signed_digits(k, 3);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const auto pos = static_cast<long double>(i + 1);
    const bool active = std::floor(pos * d) > std::floor((pos - 1) * d);
    if (w[i] != 0 && !active) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("t range and density") {
  const MatrixParams p12(1, 2), p48(4, 8);
  CHECK(t_max(p12) == doctest::Approx(std::log(3.0) / std::log(6.0)));
  CHECK(gamma_t_from_density(t_max(p12), p12).d == 1.0L);
  CHECK(gamma_t_from_density(0.0, p12).d == 0.0L);
  // 0.3 log 6 / log 3
  CHECK(static_cast<double>(gamma_t_from_density(0.3, p12).d) == doctest::Approx(0.48927892607).epsilon(1e-10));
  CHECK_THROWS_AS(gamma_t_from_density(-0.01, p12), std::invalid_argument);
  CHECK_THROWS_AS(gamma_t_from_density(t_max(p12) + 0.01, p12), std::invalid_argument);
  CHECK_THROWS_AS(make_intermediate(0.45, p48), std::invalid_argument);
}

TEST_CASE("Beatty prefix density over 10^4 positions") {
  const auto g = gamma_t_from_density(0.3, MatrixParams(1, 2));
  const long double d = 0.3L * std::log(6.0L) / std::log(3.0L);
  std::int64_t active = 0;
  for (std::int64_t i = 1; i <= 10000; ++i)
    if (std::floor(i * d) > std::floor((i - 1) * d)) ++active;
  CHECK(g.pattern.active_count(10000) == active);
  CHECK(std::abs(static_cast<double>(active) / 10000.0 - 0.48927892607) < 1e-3);
}

TEST_CASE("property: d is affine in t") {
  oracle::Gen g(61);
  for (auto [q1, q2] : {std::pair{1, 1}, {1, 2}, {2, 3}, {4, 8}}) {
    const MatrixParams p(q1, q2);
    const double tm = t_max(p);
    for (int i = 0; i < 200; ++i) {
      const double t = g.real(0, tm);
      const double d = static_cast<double>(gamma_t_from_density(t, p).d);
      REQUIRE(d == doctest::Approx(t / tm).epsilon(1e-12));
    }
  }
}

TEST_CASE("property: Gamma_t membership matches the word oracle") {
  oracle::Gen g(62);
  const MatrixParams p(1, 2);
  for (double t : {0.0, 0.1, 0.3, 0.5, t_max(p)}) {
    const auto gt = gamma_t_from_density(t, p);
    for (int i = 0; i < 3000; ++i) {
      const std::int64_t k = g.range(-1'000'000, 1'000'000);
      REQUIRE(gt.contains(k) == gamma_oracle(k, gt.d));
    }
  }
  const auto g0 = gamma_t_from_density(0.0, p);
  CHECK(g0.contains(0));
  for (std::int64_t k = 1; k <= 200; ++k) REQUIRE((!g0.contains(k) && !g0.contains(-k)));
}

TEST_CASE("t = max reproduces Lambda_max") {
  for (auto [q1, q2] : {std::pair{1, 1}, {1, 2}, {4, 8}}) {
    const MatrixParams p(q1, q2);
    const auto spec = make_intermediate(t_max(p), p, lv(0, 1));
    const auto got = build_intermediate_spectrum(spec, SpectrumBound::range(364));
    const auto ref = enumerate_spectrum(TreeMappingSpec::canonical(), p, SpectrumBound::range(364));
    REQUIRE(got.points.size() == ref.points.size());
    for (std::size_t i = 0; i < got.points.size(); ++i) {
      REQUIRE(!got.points[i].kick);
      REQUIRE(got.points[i].k == ref.points[i].k);
      REQUIRE(same(got.points[i].lambda(), ref.points[i].lambda()));
    }
  }
}

TEST_CASE("t = 0 at p=(4,4) is all kicked and lacunary with b = 36") {
  const MatrixParams p(4, 4);
  const auto pre = build_intermediate_spectrum(make_intermediate(0.0, p), SpectrumBound::range(50));
  for (const auto& pt : pre.points) REQUIRE(static_cast<bool>(pt.kick) == (pt.k != 0));
  const auto lr = lacunary_check(pre.labeled(), p, 36.0);
  CHECK(lr.pass);
  CHECK(check_orthogonality(pre.labeled(), p).pass());
}

TEST_CASE("t = 0.3 at p=(4,4) passes the exact checks") {
  const MatrixParams p(4, 4);
  const auto spec = make_intermediate(0.3, p);
  const auto pts = build_intermediate_spectrum(spec, SpectrumBound::range(364)).labeled();
  CHECK(pts.size() == 729);
  CHECK(check_orthogonality(pts, p).violations.empty());
  CHECK(check_distinct_lines(pts, p).pass());
  CHECK(check_projection_orthogonality(pts, p).pass());
  CHECK(validate_tree_mapping(spec.tree(), p, 6).pass);
}

TEST_CASE("kick admissibility") {
  CHECK_THROWS_AS(make_intermediate(0.3, MatrixParams(4, 4), lv(0, 0)), std::invalid_argument);
  // the default kick needs 4 | q1 and 4 | q2
  CHECK_THROWS(make_intermediate(0.3, MatrixParams(1, 2)));
  CHECK_NOTHROW(make_intermediate(0.3, MatrixParams(1, 2), lv(0, 1)));
}

TEST_CASE("offsets follow k^2 + bit off Gamma_t") {
  const MatrixParams p(4, 8);
  const auto v0 = make_intermediate(0.2, p);
  const auto v1 = make_intermediate(0.2, p, std::nullopt, KickMode::Coherent, 12345);
  std::int64_t prev = 0;
  for (std::int64_t k = -400; k <= 400; ++k) {
    if (v0.gamma_t.contains(k)) {
      REQUIRE(v0.offset(k) == 0);
      REQUIRE(v1.offset(k) == 0);
      continue;
    }
    REQUIRE(v0.offset(k) == k * k);
    const auto m = v1.offset(k);
    REQUIRE((m == k * k || m == k * k + 1));
  }
  // m_n < m_{n+1} along the kicked positive branch
  for (std::int64_t k = 1; k <= 2000; ++k) {
    if (v1.gamma_t.contains(k)) continue;
    REQUIRE(v1.offset(k) > prev);
    prev = v1.offset(k);
  }
}

TEST_CASE("family variants") {
  const MatrixParams p(4, 8);
  const auto one = family_variants(0.2, p, 1, 99);
  REQUIRE(one.size() == 1);
  CHECK(one[0].variant_seed == 0);
  CHECK(family_variants(0.2, p, 0, 1).empty());
  CHECK_THROWS(family_variants(0.2, p, (std::size_t{1} << 16) + 1, 1));

  const auto fam = family_variants(0.2, p, 4, 7);
  const auto again = family_variants(0.2, p, 4, 7);
  for (std::size_t i = 0; i < fam.size(); ++i) CHECK(fam[i].variant_seed == again[i].variant_seed);
  for (std::size_t i = 0; i < fam.size(); ++i)
    for (std::size_t j = i + 1; j < fam.size(); ++j) {
      const auto k = first_difference(fam[i], fam[j], 364);
      REQUIRE(k);
      REQUIRE(!fam[i].gamma_t.contains(*k));
      // the prefixes covering k differ at k
      const auto K = std::abs(*k);
      const auto a = build_intermediate_spectrum(fam[i], SpectrumBound::range(K)).labeled();
      const auto b = build_intermediate_spectrum(fam[j], SpectrumBound::range(K)).labeled();
      bool differ = false;
      for (std::size_t x = 0; x < a.size(); ++x)
        if (a[x].k == *k) differ = !same(a[x].lambda, b[x].lambda);
      CHECK(differ);
    }
}

TEST_CASE("variants at t = max cannot differ") {
  const MatrixParams p(4, 8);
  const auto fam = family_variants(t_max(p), p, 2, 7);
  CHECK(!first_difference(fam[0], fam[1], 364));
}

TEST_CASE("F_t points and perturbations") {
  const MatrixParams p(4, 8);
  const auto spec = make_intermediate(0.3, p);
  const auto pre = build_intermediate_spectrum(spec, SpectrumBound::level(6));
  const auto split = split_prefix(pre, spec);
  const auto direct = f_t_points(spec, 6);
  REQUIRE(direct.size() == split.f_t.size());
  std::set<std::int64_t> ks;
  for (const auto& pt : split.f_t) ks.insert(pt.k);
  for (const auto& pt : direct) REQUIRE(ks.count(pt.k) == 1);
  CHECK(split.f_t.size() + split.lambda_prime.size() == pre.points.size());
  CHECK(f_t_perturbation_count(pre, spec) == 0);
  CHECK(f_t_log2_radius(spec, 6) > 0);
}
