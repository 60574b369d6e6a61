#pragma once

#include <complex>
#include <cstdint>
#include <optional>

#include "spectra/lattice.hpp"

namespace spectra {

using Complex = std::complex<double>;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

enum class ResidueClass { Q12, Q24 };
const char* to_string(ResidueClass c);

struct ZeroSetWitness {
  std::int64_t level = 1;
  ResidueClass residue_class = ResidueClass::Q12;
};

struct TruncatedTransform {
  Complex value{1.0, 0.0};
  double tail_bound = 0.0;  // +inf when the geometric bound does not apply
  int depth = 0;
};

Complex mask(const Vec2& x);

// Product of the first `depth` mask factors; depth <= 0 picks one with tail_bound < 1e-10.
TruncatedTransform mu_hat(const Vec2& xi, const MatrixParams& p, int depth = 0);
int auto_depth(const Vec2& xi, const MatrixParams& p, double target = 1e-10);

// mu_hat(xi + lambda) with lambda given exactly; the integer part enters through its A-adic
// digits, so huge coordinates never touch floating point. tail_bound covers every truncation.
TruncatedTransform mu_hat_shifted(const Vec2& xi, const SparseVec& lambda, const MatrixParams& p,
                                  double target = 1e-10);

std::optional<ZeroSetWitness> in_zero_set(const LatticeVec& v, const MatrixParams& p);
std::optional<ZeroSetWitness> in_zero_set(const SparseVec& v, const MatrixParams& p);

bool zero_set_1d(const BigInt& v, int q);
// x (axis 0) or y (axis 1) projection of a symbolic value
bool zero_set_1d(const SparseVec& v, const MatrixParams& p, int axis);

// Re-checks a witness against v directly (A-divisibility level-1 times, residue class).
bool witness_holds(const LatticeVec& v, const MatrixParams& p, const ZeroSetWitness& w);

}  // namespace spectra
