#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spectra/lattice.hpp"

namespace spectra {

// Letters in {-1, 0, 1}; index words have a nonzero last letter (empty word is k = 0).
using Word = std::vector<int>;

Word index_to_word(std::int64_t k);
std::int64_t word_to_index(const Word& w);
// "-0+" rendering, "" for the empty word
std::string word_to_string(const Word& w);
Word word_from_string(const std::string& s);

// alpha_n = (3^n - 1) / 2
std::int64_t alpha(int n);
// shortest level whose index range contains k
int level_of_index(std::int64_t k);

enum class KickMode { Coherent, Literal };
const char* to_string(KickMode m);
KickMode parse_kick_mode(const std::string& s);

// m_k as a rule over all indices.
struct OffsetRule {
  std::function<std::int64_t(std::int64_t)> offset;
  // lower bound for m_k over indices |k| > K that are kicked (m_k >= 1)
  std::function<std::int64_t(std::int64_t)> min_kicked_beyond;
  // whether some |k| > K has m_k = 0
  std::function<bool(std::int64_t)> unkicked_beyond;
  std::string description;

  static OffsetRule zero();
  // finite table, zero elsewhere
  static OffsetRule table(std::map<std::int64_t, std::int64_t> entries);
};

class TreeMappingSpec {
 public:
  static TreeMappingSpec canonical();
  static TreeMappingSpec kicked(OffsetRule offsets, LatticeVec kick, KickMode mode);

  bool is_canonical() const { return canonical_; }
  std::int64_t offset(std::int64_t k) const;
  const LatticeVec& kick() const { return kick_; }
  KickMode mode() const { return mode_; }
  const OffsetRule& offsets() const { return offsets_; }
  std::string description() const;

 private:
  bool canonical_ = true;
  OffsetRule offsets_ = OffsetRule::zero();
  LatticeVec kick_{0L, 0L};
  KickMode mode_ = KickMode::Coherent;
};

// (q1/4, -q2/4); requires 4 | q1 and 4 | q2.
LatticeVec default_kick(const MatrixParams& p);
// Throws std::invalid_argument unless kick lies in E_q1 \ {0}.
void check_kick(const LatticeVec& kick, const MatrixParams& p);

LatticeVec tau_eval(const TreeMappingSpec& spec, const Word& w, const MatrixParams& p);

struct TailKick {
  std::int64_t position = 0;  // 1-based digit position n + m_k
  LatticeVec digit;
};

struct SpectrumPoint {
  std::int64_t k = 0;
  Word word;
  LatticeVec base{0L, 0L};  // digits at positions 1..n
  std::optional<TailKick> kick;

  SparseVec lambda() const;
  LatticeVec materialize(const MatrixParams& p) const { return lambda().materialize(p); }
};

SpectrumPoint lambda_of_index(const TreeMappingSpec& spec, const MatrixParams& p, std::int64_t k);

struct SpectrumBound {
  enum class Kind { IndexRange, Level };
  Kind kind = Kind::IndexRange;
  std::int64_t value = 0;

  static SpectrumBound range(std::int64_t k) { return {Kind::IndexRange, k}; }
  static SpectrumBound level(int n) { return {Kind::Level, n}; }
  std::int64_t max_index() const;
};

struct LabeledPoint {
  std::int64_t k = 0;
  SparseVec lambda;
};

struct SpectrumPrefix {
  MatrixParams params;
  TreeMappingSpec spec;
  SpectrumBound bound;
  std::vector<SpectrumPoint> points;

  std::vector<LabeledPoint> labeled() const;
};

constexpr std::size_t kMaxPrefixPoints = 10'000'000;

SpectrumPrefix enumerate_spectrum(const TreeMappingSpec& spec, const MatrixParams& p, SpectrumBound bound);

// log2 of a radius R such that every point of the full set with |lambda| < R is among the
// indices |k| <= K. Unkicked and kicked parts can be bounded separately.
double completeness_log2_radius(const TreeMappingSpec& spec, const MatrixParams& p, std::int64_t K,
                                bool include_unkicked = true, bool include_kicked = true);

struct TreeViolation {
  Word node;
  std::string clause;  // "i", "ii", "iii" or "gamma"
  std::string detail;
};

struct TreeValidationReport {
  bool pass = true;
  std::size_t nodes_checked = 0;
  std::vector<TreeViolation> violations;
};

TreeValidationReport validate_tree_mapping(const TreeMappingSpec& spec, const MatrixParams& p, int depth);

struct EllStats {
  std::vector<std::pair<std::int64_t, int>> per_k;
  int max = 0;
};

EllStats ell_stats(const TreeMappingSpec& spec, const MatrixParams& p, std::int64_t K);

}  // namespace spectra
