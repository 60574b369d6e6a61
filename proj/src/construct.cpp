#include "spectra/construct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace spectra {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

double t_max(const MatrixParams& p) { return std::log(3.0) / std::log(static_cast<double>(p.base_y())); }

bool GammaT::contains(std::int64_t k) const {
  const Word w = index_to_word(k);
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] != 0 && !pattern.active(static_cast<std::int64_t>(i) + 1)) return false;
  }
  return true;
}

GammaT gamma_t_from_density(double t, const MatrixParams& p) {
  const double tm = t_max(p);
  if (!(t >= 0.0) || t > tm + 1e-12) {
    throw std::invalid_argument("t = " + std::to_string(t) + " is outside [0, log3/log(3q2)] = [0, " +
                                std::to_string(tm) + "] for q2 = " + std::to_string(p.q2));
  }
  GammaT g;
  g.t = t;
  long double d = static_cast<long double>(t) * std::log(static_cast<long double>(p.base_y())) / std::log(3.0L);
  if (std::fabs(d - 1.0L) < 1e-12L) d = 1.0L;
  if (d < 1e-15L) d = 0.0L;
  g.d = std::clamp(d, 0.0L, 1.0L);
  g.pattern = PatternSpec::beatty(g.d);
  return g;
}

int IntermediateSpec::variant_bit(std::int64_t k) const {
  if (variant_seed == 0) return 0;
  return static_cast<int>(splitmix64(variant_seed ^ splitmix64(static_cast<std::uint64_t>(k))) & 1U);
}

std::int64_t IntermediateSpec::offset(std::int64_t k) const {
  if (gamma_t.contains(k)) return 0;
  return k * k + variant_bit(k);
}

TreeMappingSpec IntermediateSpec::tree() const {
  OffsetRule r;
  const IntermediateSpec self = *this;
  r.offset = [self](std::int64_t k) { return self.offset(k); };
  const bool any_kicked = gamma_t.d < 1.0L;
  const bool any_unkicked = gamma_t.d > 0.0L;
  r.min_kicked_beyond = [any_kicked](std::int64_t K) {
    return any_kicked ? (K + 1) * (K + 1) : std::numeric_limits<std::int64_t>::max();
  };
  r.unkicked_beyond = [any_unkicked](std::int64_t) { return any_unkicked; };
  r.description = "k^2+bit off Gamma_t(t=" + std::to_string(t) + ", variant=" + std::to_string(variant_seed) + ")";
  return TreeMappingSpec::kicked(std::move(r), kick, mode);
}

IntermediateSpec make_intermediate(double t, const MatrixParams& p, std::optional<LatticeVec> kick, KickMode mode,
                                   std::uint64_t variant_seed) {
  IntermediateSpec s;
  s.t = t;
  s.params = p;
  s.gamma_t = gamma_t_from_density(t, p);
  if (kick) {
    check_kick(*kick, p);
    s.kick = *kick;
  } else {
    s.kick = default_kick(p);
  }
  s.mode = mode;
  s.variant_seed = variant_seed;
  return s;
}

SpectrumPrefix build_intermediate_spectrum(const IntermediateSpec& spec, SpectrumBound bound) {
  return enumerate_spectrum(spec.tree(), spec.params, bound);
}

SplitPrefix split_prefix(const SpectrumPrefix& prefix, const IntermediateSpec& spec) {
  SplitPrefix s;
  for (const auto& pt : prefix.points) {
    (spec.gamma_t.contains(pt.k) ? s.f_t : s.lambda_prime).push_back({pt.k, pt.lambda()});
  }
  return s;
}

std::vector<LabeledPoint> f_t_points(const IntermediateSpec& spec, int level) {
  std::vector<std::int64_t> active;
  std::int64_t pow3 = 1;
  std::vector<std::int64_t> weights;
  for (int i = 1; i <= level; ++i) {
    if (spec.gamma_t.pattern.active(i)) weights.push_back(pow3);
    pow3 *= 3;
  }
  std::vector<std::int64_t> ks{0};
  for (std::int64_t w : weights) {
    std::vector<std::int64_t> next;
    next.reserve(ks.size() * 3);
    for (std::int64_t k : ks) {
      for (int letter = -1; letter <= 1; ++letter) next.push_back(k + letter * w);
    }
    ks = std::move(next);
  }
  if (ks.size() > kMaxPrefixPoints) throw std::invalid_argument("f_t_points: too many points");
  std::sort(ks.begin(), ks.end());
  const TreeMappingSpec tree = spec.tree();
  std::vector<LabeledPoint> out(ks.size());
  const auto n = static_cast<std::int64_t>(ks.size());
#pragma omp parallel for schedule(dynamic, 256)
  for (std::int64_t i = 0; i < n; ++i) {
    auto pt = lambda_of_index(tree, spec.params, ks[static_cast<std::size_t>(i)]);
    out[static_cast<std::size_t>(i)] = {pt.k, pt.lambda()};
  }
  return out;
}

std::size_t f_t_perturbation_count(const SpectrumPrefix& prefix, const IntermediateSpec& spec) {
  const auto canon = TreeMappingSpec::canonical();
  std::size_t n = 0;
  for (const auto& pt : prefix.points) {
    if (!spec.gamma_t.contains(pt.k)) continue;
    auto c = lambda_of_index(canon, spec.params, pt.k);
    if (pt.kick || !(pt.base == c.base)) ++n;
  }
  return n;
}

double f_t_log2_radius(const IntermediateSpec& spec, int level) {
  // the next unseen F_t word ends at the first active position past `level`
  int next = level + 1;
  while (next < level + 100000 && !spec.gamma_t.pattern.active(next)) ++next;
  if (!spec.gamma_t.pattern.active(next)) return std::numeric_limits<double>::infinity();
  if (next - 1 > 39) return std::numeric_limits<double>::infinity();
  return completeness_log2_radius(spec.tree(), spec.params, alpha(next - 1), true, false);
}

double lambda_prime_log2_radius(const IntermediateSpec& spec, std::int64_t K) {
  return completeness_log2_radius(spec.tree(), spec.params, K, false, true);
}

std::optional<std::int64_t> first_difference(const IntermediateSpec& a, const IntermediateSpec& b, std::int64_t K) {
  for (std::int64_t m = 1; m <= K; ++m) {
    for (std::int64_t k : {m, -m}) {
      if (a.offset(k) != b.offset(k)) return k;
    }
  }
  return std::nullopt;
}

std::vector<IntermediateSpec> family_variants(double t, const MatrixParams& p, std::size_t count, std::uint64_t seed,
                                              std::optional<LatticeVec> kick, KickMode mode,
                                              std::int64_t distinct_within) {
  if (count > (std::size_t{1} << 16)) throw std::invalid_argument("family_variants: count must be <= 2^16");
  std::vector<IntermediateSpec> out;
  if (count == 0) return out;
  out.push_back(make_intermediate(t, p, kick, mode, 0));
  std::uint64_t stream = splitmix64(seed);
  for (std::size_t i = 1; i < count; ++i) {
    IntermediateSpec cand;
    for (int attempt = 0; attempt < 64; ++attempt) {
      stream = splitmix64(stream);
      cand = make_intermediate(t, p, kick, mode, stream | 1U);
      bool distinct = true;
      for (const auto& prev : out) {
        if (!first_difference(prev, cand, distinct_within)) {
          distinct = false;
          break;
        }
      }
      if (distinct) break;
    }
    out.push_back(cand);
  }
  return out;
}

}  // namespace spectra
