#include "spectra/lattice.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace spectra {

MatrixParams::MatrixParams(int q1_, int q2_) : q1(q1_), q2(q2_) {
  if (q1 < 1 || q2 < q1) {
    throw std::invalid_argument("MatrixParams requires 1 <= q1 <= q2 (got q1=" + std::to_string(q1) +
                                ", q2=" + std::to_string(q2) + ")");
  }
}

std::string to_string(const LatticeVec& v) { return "(" + v.x.get_str() + "," + v.y.get_str() + ")"; }

long signed_mod(const BigInt& v, int b) {
  long r = static_cast<long>(mpz_fdiv_ui(v.get_mpz_t(), static_cast<unsigned long>(b)));
  if (r > digit_high(b)) r -= b;
  return r;
}

std::vector<int> signed_expansion(const BigInt& k, int b) {
  if (b < 2) throw std::invalid_argument("signed_expansion: base must be >= 2");
  // digits {-1, 0} only reach k <= 0
  if (b == 2 && k > 0) throw std::invalid_argument("signed_expansion: positive k has no finite base-2 expansion");
  std::vector<int> out;
  BigInt v = k;
  while (v != 0) {
    long r = signed_mod(v, b);
    out.push_back(static_cast<int>(r));
    v -= r;
    mpz_divexact_ui(v.get_mpz_t(), v.get_mpz_t(), static_cast<unsigned long>(b));
  }
  return out;
}

std::vector<int> signed_expansion(std::int64_t k, int b) {
  if (b < 2) throw std::invalid_argument("signed_expansion: base must be >= 2");
  if (b == 2 && k > 0) throw std::invalid_argument("signed_expansion: positive k has no finite base-2 expansion");
  std::vector<int> out;
  const int hi = digit_high(b);
  while (k != 0) {
    std::int64_t r = k % b;
    if (r < 0) r += b;
    if (r > hi) r -= b;
    out.push_back(static_cast<int>(r));
    k = (k - r) / b;
  }
  return out;
}

BigInt reconstruct_scalar(std::span<const int> digits, int b) {
  BigInt v = 0;
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
    v *= b;
    v += *it;
  }
  return v;
}

std::vector<LatticeVec> a_adic_expansion(const LatticeVec& w, const MatrixParams& p) {
  auto dx = signed_expansion(w.x, p.base_x());
  auto dy = signed_expansion(w.y, p.base_y());
  std::size_t n = std::max(dx.size(), dy.size());
  std::vector<LatticeVec> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.emplace_back(i < dx.size() ? dx[i] : 0L, i < dy.size() ? dy[i] : 0L);
  }
  return out;
}

bool in_gamma(const LatticeVec& v, const MatrixParams& p) {
  for (int axis = 0; axis < 2; ++axis) {
    int b = p.base(axis);
    if (v[axis] < digit_low(b) || v[axis] > digit_high(b)) return false;
  }
  return true;
}

LatticeVec reconstruct(std::span<const LatticeVec> digits, const MatrixParams& p) {
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (!in_gamma(digits[i], p)) {
      throw DigitOutOfRange(i, "reconstruct: digit " + to_string(digits[i]) + " at index " +
                                   std::to_string(i) + " is outside Gamma");
    }
  }
  LatticeVec v(0L, 0L);
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
    v.x *= p.base_x();
    v.y *= p.base_y();
    v += *it;
  }
  return v;
}

LatticeVec mod_a_reduce(const LatticeVec& v, const MatrixParams& p) {
  return LatticeVec(signed_mod(v.x, p.base_x()), signed_mod(v.y, p.base_y()));
}

BigInt pow_base(int b, std::int64_t k) {
  if (k < 0) throw std::invalid_argument("pow_base: negative exponent");
  BigInt r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(b), static_cast<unsigned long>(k));
  return r;
}

LatticeVec apply_a_power(const LatticeVec& v, const MatrixParams& p, std::int64_t k) {
  if (k == 0) return v;
  return LatticeVec(BigInt(v.x * pow_base(p.base_x(), k)), BigInt(v.y * pow_base(p.base_y(), k)));
}

LatticeVec ell_digit(const MatrixParams& p) { return LatticeVec(p.q1, -p.q2); }

DigitSetCatalog enumerate_digit_sets(const MatrixParams& p) {
  DigitSetCatalog cat;
  const int bx = p.base_x(), by = p.base_y();
  for (int x = digit_low(bx); x <= digit_high(bx); ++x) {
    for (int y = digit_low(by); y <= digit_high(by); ++y) {
      LatticeVec v(x, y);
      cat.gamma.push_back(v);
      if (-p.q1 <= 2 * x && 2 * x < p.q1) cat.e_q1.push_back(v);
      if (-p.q2 <= 2 * y && 2 * y < p.q2) cat.e_q2.push_back(v);
    }
  }
  cat.c_set = {LatticeVec(0L, 0L), LatticeVec(p.q1, -p.q2), LatticeVec(-p.q1, p.q2)};
  cat.l_set = cat.c_set;
  return cat;
}

namespace {

void check_partition(const std::vector<LatticeVec>& leaders, const DigitSetCatalog& cat,
                     const MatrixParams& p, const std::string& label, ResidueReport& rep,
                     std::size_t& cosets) {
  std::map<LatticeVec, int> hits;
  for (const auto& a : leaders) {
    std::set<LatticeVec> coset;
    for (const auto& c : cat.c_set) coset.insert(mod_a_reduce(a + c, p));
    if (coset.size() != 3) {
      rep.pass = false;
      rep.problems.push_back(label + ": coset of " + to_string(a) + " has " +
                             std::to_string(coset.size()) + " elements");
    }
    for (const auto& v : coset) hits[v]++;
    ++cosets;
  }
  for (const auto& g : cat.gamma) {
    auto it = hits.find(g);
    if (it == hits.end()) {
      rep.pass = false;
      rep.problems.push_back(label + ": omission " + to_string(g));
    } else if (it->second > 1) {
      rep.pass = false;
      rep.problems.push_back(label + ": collision at " + to_string(g));
    }
  }
}

}  // namespace

ResidueReport verify_residue_decomposition(const MatrixParams& p) {
  ResidueReport rep;
  auto cat = enumerate_digit_sets(p);
  check_partition(cat.e_q1, cat, p, "E_q1", rep, rep.cosets_q1);
  check_partition(cat.e_q2, cat, p, "E_q2", rep, rep.cosets_q2);
  return rep;
}

SparseVec::SparseVec(LatticeVec v) {
  terms_.push_back({0, std::move(v)});
  normalize();
}

SparseVec::SparseVec(std::vector<PowerTerm> terms) : terms_(std::move(terms)) { normalize(); }

void SparseVec::normalize() {
  std::stable_sort(terms_.begin(), terms_.end(),
                   [](const PowerTerm& a, const PowerTerm& b) { return a.power < b.power; });
  std::vector<PowerTerm> out;
  for (auto& t : terms_) {
    if (t.power < 0) throw std::invalid_argument("SparseVec: negative power");
    if (!out.empty() && out.back().power == t.power) {
      out.back().coef += t.coef;
    } else {
      out.push_back(std::move(t));
    }
  }
  std::erase_if(out, [](const PowerTerm& t) { return t.coef.is_zero(); });
  terms_ = std::move(out);
}

LatticeVec SparseVec::materialize(const MatrixParams& p) const {
  LatticeVec v(0L, 0L);
  for (const auto& t : terms_) v += apply_a_power(t.coef, p, t.power);
  return v;
}

SparseVec operator+(const SparseVec& a, const SparseVec& b) {
  std::vector<PowerTerm> t = a.terms_;
  t.insert(t.end(), b.terms_.begin(), b.terms_.end());
  return SparseVec(std::move(t));
}

SparseVec operator-(const SparseVec& a, const SparseVec& b) {
  std::vector<PowerTerm> t = a.terms_;
  for (const auto& bt : b.terms_) t.push_back({bt.power, -bt.coef});
  return SparseVec(std::move(t));
}

namespace {

// Divides v by b while divisible, at most `limit` times (limit < 0 means unbounded).
std::int64_t strip_divisible(BigInt& v, unsigned long b, std::int64_t limit) {
  std::int64_t n = 0;
  while ((limit < 0 || n < limit) && v != 0 && mpz_divisible_ui_p(v.get_mpz_t(), b)) {
    mpz_divexact_ui(v.get_mpz_t(), v.get_mpz_t(), b);
    ++n;
  }
  return n;
}

bool divisible_by_a(const LatticeVec& v, const MatrixParams& p) {
  return mpz_divisible_ui_p(v.x.get_mpz_t(), p.base_x()) &&
         mpz_divisible_ui_p(v.y.get_mpz_t(), p.base_y());
}

}  // namespace

std::optional<StripResult> strip_powers(const SparseVec& v, const MatrixParams& p) {
  const auto& t = v.terms();
  std::size_t i = 0;
  while (i < t.size()) {
    LatticeVec s = t[i].coef;
    std::int64_t e = t[i].power;
    ++i;
    for (;;) {
      if (s.is_zero()) break;  // partial sum cancelled; restart from the next term
      const bool last = i >= t.size();
      while ((last || e < t[i].power) && divisible_by_a(s, p)) {
        mpz_divexact_ui(s.x.get_mpz_t(), s.x.get_mpz_t(), p.base_x());
        mpz_divexact_ui(s.y.get_mpz_t(), s.y.get_mpz_t(), p.base_y());
        ++e;
      }
      if (i >= t.size() || e < t[i].power) return StripResult{e, mod_a_reduce(s, p)};
      s += t[i].coef;
      ++i;
    }
  }
  return std::nullopt;
}

std::optional<AxisStrip> strip_scalar(const BigInt& v, int b) {
  if (v == 0) return std::nullopt;
  BigInt s = v;
  std::int64_t n = strip_divisible(s, static_cast<unsigned long>(b), -1);
  return AxisStrip{n, signed_mod(s, b)};
}

std::optional<AxisStrip> strip_axis(const SparseVec& v, const MatrixParams& p, int axis) {
  const auto& t = v.terms();
  const int b = p.base(axis);
  std::size_t i = 0;
  while (i < t.size()) {
    BigInt s = t[i].coef[axis];
    std::int64_t e = t[i].power;
    ++i;
    for (;;) {
      if (s == 0) break;
      std::int64_t limit = i < t.size() ? t[i].power - e : -1;
      e += strip_divisible(s, static_cast<unsigned long>(b), limit);
      if (i >= t.size() || e < t[i].power) return AxisStrip{e, signed_mod(s, b)};
      // bring the next term's contribution in at the current exponent
      s += t[i].coef[axis];
      ++i;
    }
  }
  return std::nullopt;
}

std::vector<PositionedDigit> sparse_digits(const SparseVec& v, const MatrixParams& p) {
  std::vector<PositionedDigit> out;
  const auto& t = v.terms();
  LatticeVec carry(0L, 0L);
  std::int64_t pos = t.empty() ? 0 : t.front().power;  // 0-based exponent of carry
  std::size_t i = 0;
  while (i < t.size() || !carry.is_zero()) {
    if (carry.is_zero()) pos = std::max(pos, t[i].power);
    while (i < t.size() && t[i].power == pos) carry += t[i++].coef;
    if (carry.is_zero()) continue;
    LatticeVec d = mod_a_reduce(carry, p);
    if (!d.is_zero()) out.push_back({pos + 1, d});
    carry -= d;
    mpz_divexact_ui(carry.x.get_mpz_t(), carry.x.get_mpz_t(), p.base_x());
    mpz_divexact_ui(carry.y.get_mpz_t(), carry.y.get_mpz_t(), p.base_y());
    ++pos;
  }
  return out;
}

}  // namespace spectra
