#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <tuple>
#include <vector>

#include "spectra/lattice.hpp"
#include "spectra/treemap.hpp"

namespace spectra {

long double to_long_double(const BigInt& v);

// A point as base + A^kick_exp * kick. Points whose kick overflows long double are "far":
// they only ever share a ball with points carrying the same kick term.
struct ScaledPoint {
  long double bx = 0.0L, by = 0.0L;
  bool has_kick = false;
  std::int64_t kick_exp = 0;
  long kick_x = 0, kick_y = 0;
  bool far = false;
  long double fx = 0.0L, fy = 0.0L;  // base + kick, when not far
  double log2_mag = -std::numeric_limits<double>::infinity();
};

ScaledPoint to_scaled(const SparseVec& v, const MatrixParams& p);

class PointCloud {
 public:
  PointCloud(std::span<const LabeledPoint> pts, const MatrixParams& p);

  std::size_t size() const { return pts_.size(); }
  const ScaledPoint& operator[](std::size_t i) const { return pts_[i]; }
  std::int64_t label(std::size_t i) const { return labels_[i]; }
  const MatrixParams& params() const { return params_; }
  double max_log2_mag() const { return max_log2_mag_; }

  // open ball around point i, using the window index
  std::size_t count_around(std::size_t i, long double h) const;
  // open ball around a real center
  std::size_t count_around(long double cx, long double cy, long double h) const;
  // brute force over all points (reference path)
  std::size_t count_around_brute(std::size_t i, long double h) const;
  bool within(std::size_t i, std::size_t j, long double h) const;

 private:
  MatrixParams params_;
  std::vector<ScaledPoint> pts_;
  std::vector<std::int64_t> labels_;
  std::vector<std::size_t> near_order_;
  std::vector<long double> near_y_;
  std::map<std::tuple<std::int64_t, long, long>, std::vector<std::size_t>> far_groups_;
  double max_log2_mag_ = -std::numeric_limits<double>::infinity();
};

std::size_t count_in_ball(const PointCloud& cloud, long double cx, long double cy, long double h);

struct CentersPolicy {
  std::size_t max_centers = 256;  // sampled (seeded) when there are more points
  std::uint64_t seed = 0;
};

// kOrigin stands for the center (0,0)
constexpr std::size_t kOrigin = std::numeric_limits<std::size_t>::max();
std::vector<std::size_t> select_centers(const PointCloud& cloud, const CentersPolicy& policy);

struct BallCountTable {
  std::vector<std::size_t> max_count;
  std::vector<std::size_t> argmax;  // center achieving it (kOrigin for the origin)
};

// Max count per scale over centers whose ball lies inside the completeness radius.
BallCountTable ball_counts(const PointCloud& cloud, const std::vector<std::size_t>& centers,
                           const std::vector<long double>& scales, double log2_radius);
BallCountTable ball_counts_serial(const PointCloud& cloud, const std::vector<std::size_t>& centers,
                                  const std::vector<long double>& scales, double log2_radius);

struct ScaleWindow {
  int j_min = 1;
  int j_max = 1;
};

struct DimensionEstimate {
  std::vector<int> exponents;         // h = (3 q2)^j
  std::vector<long double> scales;
  std::vector<std::size_t> counts;
  double slope = 0.0;
  double fit_residual = 0.0;
  int window_lo = 0;
  int window_hi = 0;
  std::size_t centers = 0;
};

// Regresses log max-count on log h. Without an explicit window the largest complete window
// j = 1..J is used (J capped at 64).
DimensionEstimate beurling_dim_estimate(const PointCloud& cloud, std::optional<ScaleWindow> window,
                                        const CentersPolicy& policy = {},
                                        double log2_radius = std::numeric_limits<double>::infinity());

struct PatternSpec {
  enum class Kind { Periodic, Beatty, Explicit };
  Kind kind = Kind::Beatty;
  std::vector<bool> bits;
  long double density = 0.0L;
  std::function<bool(std::int64_t)> predicate;
  double explicit_frequency = 0.0;

  static PatternSpec periodic(std::vector<bool> bits);
  static PatternSpec beatty(long double d);
  // checks the frequency against the first 10^4 positions (tolerance 0.05)
  static PatternSpec explicit_pattern(std::function<bool(std::int64_t)> pred, double frequency);

  bool active(std::int64_t i) const;  // i >= 1
  double frequency() const;
  std::int64_t active_count(std::int64_t n) const;
};

double formula_dim_1d(int b, const std::vector<int>& digits, const PatternSpec& pattern);
// pre-checks: 1 < a <= b, y-digits in range, generated set one point per vertical line
double formula_dim_2d(int a, int b, const std::vector<LatticeVec>& digits, const PatternSpec& pattern,
                      int check_depth = 8);

struct LacunaryReport {
  bool pass = false;
  bool leading_ok = false;  // |a_{+1}|, |a_{-1}| >= b
  double min_ratio = std::numeric_limits<double>::infinity();
  std::optional<std::int64_t> first_failure;  // index k whose successor breaks the ratio
};

// Branches k > 0 and k < 0, each ordered by |k|; k = 0 is excluded.
LacunaryReport lacunary_check(std::span<const LabeledPoint> pts, const MatrixParams& p, double b);

struct EntropyClosedForm {
  double dim_x = 0.0;
  double dim = 0.0;
  double lower = 0.0;  // log3/log(3 q2)
  double upper = 0.0;  // log3/log(3 q1)
  bool chain_ok = false;
};

EntropyClosedForm entropy_dim_closed_form(const MatrixParams& p);
double entropy_dim_monte_carlo(const MatrixParams& p, int n, std::size_t samples, std::uint64_t seed = 0);

struct HausdorffValue {
  double value = 0.0;
  bool exceeds_beurling_bound = false;
};
HausdorffValue support_hausdorff_dim(const MatrixParams& p);

double beurling_upper_bound(const MatrixParams& p);

// max over lambda of min over gamma of |A^{-pexp} lambda - gamma|
double relative_density_check(std::span<const LabeledPoint> pts, const MatrixParams& p, int pexp);

}  // namespace spectra
