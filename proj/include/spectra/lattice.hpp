#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace spectra {

using BigInt = mpz_class;

// A = diag(3*q1, 3*q2) with 1 <= q1 <= q2.
struct MatrixParams {
  int q1 = 1;
  int q2 = 1;

  MatrixParams() = default;
  MatrixParams(int q1_, int q2_);

  int base_x() const { return 3 * q1; }
  int base_y() const { return 3 * q2; }
  int base(int axis) const { return axis == 0 ? base_x() : base_y(); }
  int q(int axis) const { return axis == 0 ? q1 : q2; }

  bool operator==(const MatrixParams&) const = default;
};

struct LatticeVec {
  BigInt x;
  BigInt y;

  LatticeVec() = default;
  LatticeVec(BigInt x_, BigInt y_) : x(std::move(x_)), y(std::move(y_)) {}
  LatticeVec(long x_, long y_) : x(x_), y(y_) {}

  bool is_zero() const { return x == 0 && y == 0; }
  const BigInt& operator[](int axis) const { return axis == 0 ? x : y; }
  BigInt& operator[](int axis) { return axis == 0 ? x : y; }

  LatticeVec& operator+=(const LatticeVec& o) { x += o.x; y += o.y; return *this; }
  LatticeVec& operator-=(const LatticeVec& o) { x -= o.x; y -= o.y; return *this; }
  friend LatticeVec operator+(LatticeVec a, const LatticeVec& b) { return a += b; }
  friend LatticeVec operator-(LatticeVec a, const LatticeVec& b) { return a -= b; }
  friend LatticeVec operator-(const LatticeVec& a) { return LatticeVec(BigInt(-a.x), BigInt(-a.y)); }
  friend LatticeVec operator*(long s, const LatticeVec& a) {
    return LatticeVec(BigInt(a.x * s), BigInt(a.y * s));
  }
  friend bool operator==(const LatticeVec& a, const LatticeVec& b) { return a.x == b.x && a.y == b.y; }
  friend bool operator<(const LatticeVec& a, const LatticeVec& b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  }
};

std::string to_string(const LatticeVec& v);

// Reconstruction hit a digit outside Gamma.
class DigitOutOfRange : public std::invalid_argument {
 public:
  DigitOutOfRange(std::size_t index, const std::string& what)
      : std::invalid_argument(what), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

// Digit range [-floor(b/2), b-1-floor(b/2)].
inline int digit_low(int b) { return -(b / 2); }
inline int digit_high(int b) { return b - 1 - b / 2; }

// Little-endian signed base-b digits, no trailing zeros; 0 -> {}.
std::vector<int> signed_expansion(const BigInt& k, int b);
std::vector<int> signed_expansion(std::int64_t k, int b);
BigInt reconstruct_scalar(std::span<const int> digits, int b);

std::vector<LatticeVec> a_adic_expansion(const LatticeVec& w, const MatrixParams& p);
LatticeVec reconstruct(std::span<const LatticeVec> digits, const MatrixParams& p);

bool in_gamma(const LatticeVec& v, const MatrixParams& p);
LatticeVec mod_a_reduce(const LatticeVec& v, const MatrixParams& p);
// signed residue of v modulo b, in the digit range of b
long signed_mod(const BigInt& v, int b);

// A^k v for k >= 0
LatticeVec apply_a_power(const LatticeVec& v, const MatrixParams& p, std::int64_t k);
BigInt pow_base(int b, std::int64_t k);

struct DigitSetCatalog {
  std::vector<LatticeVec> gamma;
  std::vector<LatticeVec> c_set;
  std::vector<LatticeVec> e_q1;
  std::vector<LatticeVec> e_q2;
  std::vector<LatticeVec> l_set;
};

DigitSetCatalog enumerate_digit_sets(const MatrixParams& p);
// (q1, -q2)
LatticeVec ell_digit(const MatrixParams& p);

struct ResidueReport {
  bool pass = true;
  std::size_t cosets_q1 = 0;
  std::size_t cosets_q2 = 0;
  std::vector<std::string> problems;
};

ResidueReport verify_residue_decomposition(const MatrixParams& p);

// Sum of A^power * coef over a few terms. Kept sorted by power, merged, zero terms dropped.
struct PowerTerm {
  std::int64_t power = 0;
  LatticeVec coef;
};

class SparseVec {
 public:
  SparseVec() = default;
  explicit SparseVec(LatticeVec v);
  explicit SparseVec(std::vector<PowerTerm> terms);

  const std::vector<PowerTerm>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  LatticeVec materialize(const MatrixParams& p) const;

  friend SparseVec operator-(const SparseVec& a, const SparseVec& b);
  friend SparseVec operator+(const SparseVec& a, const SparseVec& b);

 private:
  void normalize();
  std::vector<PowerTerm> terms_;
};

// v = A^strips * u with u not in A Z^2; residue = mod_a_reduce(u). Nullopt when v = 0.
struct StripResult {
  std::int64_t strips = 0;
  LatticeVec residue;
};
std::optional<StripResult> strip_powers(const SparseVec& v, const MatrixParams& p);

// Same along one axis with base 3*q(axis): returns (strips, signed residue mod base).
struct AxisStrip {
  std::int64_t strips = 0;
  long residue = 0;
};
std::optional<AxisStrip> strip_axis(const SparseVec& v, const MatrixParams& p, int axis);
std::optional<AxisStrip> strip_scalar(const BigInt& v, int b);

// Nonzero A-adic digits of v at 1-based positions, ascending. Long zero gaps are skipped.
struct PositionedDigit {
  std::int64_t position = 1;
  LatticeVec digit;
};
std::vector<PositionedDigit> sparse_digits(const SparseVec& v, const MatrixParams& p);

}  // namespace spectra
