#include "spectra/fourier.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace spectra {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// sum_{i>=1} |1 - m(A^{-i} y)| <= s
double tail_sum(const Vec2& y, const MatrixParams& p) {
  return (kTwoPi / 3.0) * (std::abs(y.x) / (p.base_x() - 1.0) + std::abs(y.y) / (p.base_y() - 1.0));
}

double tail_from_sum(double s) { return s <= 0.5 ? 2.0 * s : std::numeric_limits<double>::infinity(); }

}  // namespace

const char* to_string(ResidueClass c) { return c == ResidueClass::Q12 ? "Q12" : "Q24"; }

Complex mask(const Vec2& x) {
  // reduce mod 1 first so large arguments keep their phase accuracy
  double a = x.x - std::floor(x.x);
  double b = x.y - std::floor(x.y);
  Complex s = 1.0 + std::polar(1.0, -kTwoPi * a) + std::polar(1.0, -kTwoPi * b);
  return s / 3.0;
}

TruncatedTransform mu_hat(const Vec2& xi, const MatrixParams& p, int depth) {
  if (depth <= 0) depth = auto_depth(xi, p);
  TruncatedTransform r;
  r.depth = depth;
  Vec2 y = xi;
  for (int j = 1; j <= depth; ++j) {
    y.x /= p.base_x();
    y.y /= p.base_y();
    r.value *= mask(y);
  }
  r.tail_bound = tail_from_sum(tail_sum(y, p));
  return r;
}

int auto_depth(const Vec2& xi, const MatrixParams& p, double target) {
  Vec2 y = xi;
  int depth = 1;
  y.x /= p.base_x();
  y.y /= p.base_y();
  while (tail_from_sum(tail_sum(y, p)) >= target && depth < 4000) {
    y.x /= p.base_x();
    y.y /= p.base_y();
    ++depth;
  }
  return depth;
}

TruncatedTransform mu_hat_shifted(const Vec2& xi, const SparseVec& lambda, const MatrixParams& p,
                                  double target) {
  TruncatedTransform r;
  const auto digits = sparse_digits(lambda, p);
  const double bx = p.base_x(), by = p.base_y();
  // y_j = A^{-1}(y_{j-1} + c_j) equals A^{-j}(xi + lambda) modulo Z^2
  Vec2 y = xi;
  std::int64_t pos = 0;
  double skipped = 0.0;
  std::size_t next = 0;
  long evaluated = 0;
  const double skip_threshold = target * 1e-3;
  for (;;) {
    bool have_digit = next < digits.size();
    if (!have_digit && tail_from_sum(tail_sum(y, p)) < target * 0.5) break;
    if (have_digit && digits[next].position > pos + 1) {
      double s = tail_sum(y, p);
      if (s < skip_threshold) {
        // jump over the zero run; both the skipped factors and the dropped
        // remainder of y contribute at most s each
        skipped += 2.0 * s;
        y = Vec2{};
        pos = digits[next].position - 1;
      }
    }
    ++pos;
    double cx = 0.0, cy = 0.0;
    if (have_digit && digits[next].position == pos) {
      cx = digits[next].digit.x.get_d();
      cy = digits[next].digit.y.get_d();
      ++next;
    }
    y.x = (y.x + cx) / bx;
    y.y = (y.y + cy) / by;
    r.value *= mask(y);
    ++evaluated;
    if (evaluated > 1000000) break;
  }
  r.depth = static_cast<int>(std::min<std::int64_t>(pos, std::numeric_limits<int>::max()));
  r.tail_bound = tail_from_sum(tail_sum(y, p)) + skipped;
  if (next < digits.size()) r.tail_bound = std::numeric_limits<double>::infinity();
  return r;
}

std::optional<ZeroSetWitness> in_zero_set(const SparseVec& v, const MatrixParams& p) {
  auto s = strip_powers(v, p);
  if (!s) return std::nullopt;
  const LatticeVec q12 = mod_a_reduce(LatticeVec(p.q1, 2L * p.q2), p);
  const LatticeVec q24 = mod_a_reduce(LatticeVec(2L * p.q1, 4L * p.q2), p);
  if (s->residue == q12) return ZeroSetWitness{s->strips + 1, ResidueClass::Q12};
  if (s->residue == q24) return ZeroSetWitness{s->strips + 1, ResidueClass::Q24};
  return std::nullopt;
}

std::optional<ZeroSetWitness> in_zero_set(const LatticeVec& v, const MatrixParams& p) {
  return in_zero_set(SparseVec(v), p);
}

bool zero_set_1d(const BigInt& v, int q) {
  auto s = strip_scalar(v, 3 * q);
  return s && (s->residue == q || s->residue == -q);
}

bool zero_set_1d(const SparseVec& v, const MatrixParams& p, int axis) {
  auto s = strip_axis(v, p, axis);
  const long q = p.q(axis);
  return s && (s->residue == q || s->residue == -q);
}

bool witness_holds(const LatticeVec& v, const MatrixParams& p, const ZeroSetWitness& w) {
  if (w.level < 1 || v.is_zero()) return false;
  BigInt x = v.x, y = v.y;
  for (std::int64_t i = 1; i < w.level; ++i) {
    if (!mpz_divisible_ui_p(x.get_mpz_t(), p.base_x()) || !mpz_divisible_ui_p(y.get_mpz_t(), p.base_y()))
      return false;
    x /= p.base_x();
    y /= p.base_y();
  }
  const long tx = w.residue_class == ResidueClass::Q12 ? p.q1 : 2L * p.q1;
  const long ty = w.residue_class == ResidueClass::Q12 ? 2L * p.q2 : 4L * p.q2;
  BigInt dx = x - tx, dy = y - ty;
  return mpz_divisible_ui_p(dx.get_mpz_t(), p.base_x()) && mpz_divisible_ui_p(dy.get_mpz_t(), p.base_y());
}

}  // namespace spectra
