#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "spectra/fourier.hpp"
#include "spectra/lattice.hpp"
#include "spectra/treemap.hpp"

namespace spectra {

// Pairwise checks enumerate all pairs up to full_limit points, then sample.
struct PairwiseOptions {
  std::size_t full_limit = 10'000;
  std::size_t sample_pairs = 1'000'000;
  std::uint64_t seed = 0;
};

struct PairViolation {
  std::int64_t k = 0;
  std::int64_t k2 = 0;
  std::string difference;
  std::string reason;
};

struct OrthogonalityReport {
  std::size_t pairs_checked = 0;
  bool sampled = false;
  std::vector<PairViolation> violations;
  bool pass() const { return violations.empty(); }
};

// "(x,y) + A^e(x,y)" style rendering; plain coordinates when the value is small
std::string describe(const SparseVec& v, const MatrixParams& p);

OrthogonalityReport check_orthogonality(std::span<const LabeledPoint> pts, const MatrixParams& p,
                                        const PairwiseOptions& opt = {});
OrthogonalityReport check_orthogonality(const SpectrumPrefix& prefix, const PairwiseOptions& opt = {});
// single-threaded reference for the OpenMP kernel
OrthogonalityReport check_orthogonality_serial(std::span<const LabeledPoint> pts, const MatrixParams& p,
                                               const PairwiseOptions& opt = {});

struct LineReport {
  std::size_t pairs_checked = 0;
  bool sampled = false;
  std::vector<PairViolation> violations;  // reason "shared x" / "shared y"
  bool pass() const { return violations.empty(); }
};

LineReport check_distinct_lines(std::span<const LabeledPoint> pts, const MatrixParams& p,
                                const PairwiseOptions& opt = {});
// reasons "x-projection" / "y-projection"
LineReport check_projection_orthogonality(std::span<const LabeledPoint> pts, const MatrixParams& p,
                                          const PairwiseOptions& opt = {});

// Atoms of mu_n against the given 3^n points; returns max |(U*U - I)_rs|.
double gram_unitarity(int n, std::span<const LabeledPoint> pts, const MatrixParams& p);
double gram_unitarity_serial(int n, std::span<const LabeledPoint> pts, const MatrixParams& p);

struct SamplingBox {
  double hx = 0.5;
  double hy = 0.5;
  Vec2 sample(std::mt19937_64& rng) const;
};
SamplingBox sampling_box(const MatrixParams& p);

struct QSum {
  double value = 0.0;
  double error = 0.0;  // certified bound on |Q_partial - value|
};

// Sum of |mu_hat(xi + lambda)|^2 over the points, with per-term certified truncation.
QSum q_sum(const Vec2& xi, std::span<const LabeledPoint> pts, const MatrixParams& p, double tolerance = 1e-9);

enum class ProbeVerdict { Conflict, Inconclusive };
struct ProbeResult {
  LatticeVec gamma;
  ProbeVerdict verdict = ProbeVerdict::Inconclusive;
  std::optional<std::int64_t> witness_k;
};

// Every integer vector in [-box, box]^2 not in the prefix.
std::vector<ProbeResult> maximality_probe(std::span<const LabeledPoint> pts, const MatrixParams& p, long box);

}  // namespace spectra
