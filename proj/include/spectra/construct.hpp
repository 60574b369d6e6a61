#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "spectra/dimension.hpp"
#include "spectra/lattice.hpp"
#include "spectra/treemap.hpp"

namespace spectra {

// log3 / log(3 q2)
double t_max(const MatrixParams& p);

// Gamma_t: indices whose words put nonzero letters only on active positions of a Beatty
// pattern with density d = t log(3 q2) / log 3.
struct GammaT {
  double t = 0.0;
  long double d = 0.0L;
  PatternSpec pattern;

  bool contains(std::int64_t k) const;
};

GammaT gamma_t_from_density(double t, const MatrixParams& p);

struct IntermediateSpec {
  double t = 0.0;
  MatrixParams params;
  GammaT gamma_t;
  LatticeVec kick;
  KickMode mode = KickMode::Coherent;
  std::uint64_t variant_seed = 0;  // 0: every variant bit is 0 (m_k = k^2)

  int variant_bit(std::int64_t k) const;
  // k^2 + bit(k) off Gamma_t, 0 on it
  std::int64_t offset(std::int64_t k) const;
  TreeMappingSpec tree() const;
};

// kick defaults to (q1/4, -q2/4)
IntermediateSpec make_intermediate(double t, const MatrixParams& p, std::optional<LatticeVec> kick = std::nullopt,
                                   KickMode mode = KickMode::Coherent, std::uint64_t variant_seed = 0);

SpectrumPrefix build_intermediate_spectrum(const IntermediateSpec& spec, SpectrumBound bound);

struct SplitPrefix {
  std::vector<LabeledPoint> f_t;           // k in Gamma_t
  std::vector<LabeledPoint> lambda_prime;  // k outside Gamma_t
};
SplitPrefix split_prefix(const SpectrumPrefix& prefix, const IntermediateSpec& spec);

// F_t points for all words of length <= level, generated directly from the active positions.
std::vector<LabeledPoint> f_t_points(const IntermediateSpec& spec, int level);

// F_t points of the prefix whose lambda differs from the canonical mapping's lambda_k.
std::size_t f_t_perturbation_count(const SpectrumPrefix& prefix, const IntermediateSpec& spec);

// Completeness radii (log2) for the F_t part at a level and for Lambda_t' beyond |k| <= K.
double f_t_log2_radius(const IntermediateSpec& spec, int level);
double lambda_prime_log2_radius(const IntermediateSpec& spec, std::int64_t K);

// variant 0 is the all-zero-bit spec; the rest use seeded bits, regenerated until every pair
// differs at some kicked index |k| <= distinct_within
std::vector<IntermediateSpec> family_variants(double t, const MatrixParams& p, std::size_t count, std::uint64_t seed,
                                              std::optional<LatticeVec> kick = std::nullopt,
                                              KickMode mode = KickMode::Coherent, std::int64_t distinct_within = 364);

// first index |k| <= K (by |k|, positive first) where the two specs' offsets differ
std::optional<std::int64_t> first_difference(const IntermediateSpec& a, const IntermediateSpec& b, std::int64_t K);

}  // namespace spectra
