#include "spectra/treemap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

namespace spectra {

Word index_to_word(std::int64_t k) { return signed_expansion(k, 3); }

std::int64_t word_to_index(const Word& w) {
  if (!w.empty() && w.back() == 0) throw std::invalid_argument("word_to_index: trailing zero letter");
  if (w.size() > 39) throw std::invalid_argument("word_to_index: word too long for a 64-bit index");
  std::int64_t k = 0;
  for (auto it = w.rbegin(); it != w.rend(); ++it) {
    if (*it < -1 || *it > 1) throw std::invalid_argument("word_to_index: letter outside {-1,0,1}");
    k = 3 * k + *it;
  }
  return k;
}

std::string word_to_string(const Word& w) {
  std::string s;
  s.reserve(w.size());
  for (int c : w) s.push_back(c < 0 ? '-' : (c > 0 ? '+' : '0'));
  return s;
}

Word word_from_string(const std::string& s) {
  Word w;
  w.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '-': w.push_back(-1); break;
      case '0': w.push_back(0); break;
      case '+': w.push_back(1); break;
      default: throw std::invalid_argument(std::string("bad word letter '") + c + "'");
    }
  }
  return w;
}

std::int64_t alpha(int n) {
  if (n < 0 || n > 39) throw std::invalid_argument("alpha: level out of range");
  std::int64_t p = 1;
  for (int i = 0; i < n; ++i) p *= 3;
  return (p - 1) / 2;
}

int level_of_index(std::int64_t k) {
  int n = 0;
  while (alpha(n) < std::abs(k)) ++n;
  return n;
}

const char* to_string(KickMode m) { return m == KickMode::Coherent ? "coherent" : "literal"; }

KickMode parse_kick_mode(const std::string& s) {
  if (s == "coherent") return KickMode::Coherent;
  if (s == "literal") return KickMode::Literal;
  throw std::invalid_argument("kick mode must be 'coherent' or 'literal', got '" + s + "'");
}

OffsetRule OffsetRule::zero() {
  OffsetRule r;
  r.offset = [](std::int64_t) { return std::int64_t{0}; };
  r.min_kicked_beyond = [](std::int64_t) { return std::numeric_limits<std::int64_t>::max(); };
  r.unkicked_beyond = [](std::int64_t) { return true; };
  r.description = "zero";
  return r;
}

OffsetRule OffsetRule::table(std::map<std::int64_t, std::int64_t> entries) {
  for (const auto& [k, m] : entries) {
    if (m < 0) throw std::invalid_argument("offset table: negative m_k at k=" + std::to_string(k));
  }
  auto shared = std::make_shared<const std::map<std::int64_t, std::int64_t>>(std::move(entries));
  OffsetRule r;
  r.offset = [shared](std::int64_t k) {
    auto it = shared->find(k);
    return it == shared->end() ? std::int64_t{0} : it->second;
  };
  r.min_kicked_beyond = [shared](std::int64_t K) {
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    for (const auto& [k, m] : *shared) {
      if (std::abs(k) > K && m >= 1) best = std::min(best, m);
    }
    return best;
  };
  r.unkicked_beyond = [](std::int64_t) { return true; };
  std::string d = "table{";
  bool first = true;
  for (const auto& [k, m] : *shared) {
    d += (first ? "" : ",") + std::to_string(k) + ":" + std::to_string(m);
    first = false;
  }
  r.description = d + "}";
  return r;
}

TreeMappingSpec TreeMappingSpec::canonical() { return TreeMappingSpec{}; }

TreeMappingSpec TreeMappingSpec::kicked(OffsetRule offsets, LatticeVec kick, KickMode mode) {
  if (kick.is_zero()) throw std::invalid_argument("kick digit must be nonzero");
  TreeMappingSpec s;
  s.canonical_ = false;
  s.offsets_ = std::move(offsets);
  s.kick_ = std::move(kick);
  s.mode_ = mode;
  return s;
}

std::int64_t TreeMappingSpec::offset(std::int64_t k) const {
  if (canonical_) return 0;
  std::int64_t m = offsets_.offset(k);
  if (m < 0) throw std::invalid_argument("offset rule produced negative m_k at k=" + std::to_string(k));
  return m;
}

std::string TreeMappingSpec::description() const {
  if (canonical_) return "canonical";
  return std::string("kicked(") + to_string(mode_) + ", kick=" + to_string(kick_) +
         ", offsets=" + offsets_.description + ")";
}

LatticeVec default_kick(const MatrixParams& p) {
  if (p.q1 % 4 != 0 || p.q2 % 4 != 0) {
    throw std::invalid_argument("default kick (q1/4, -q2/4) needs 4 | q1 and 4 | q2; pass an explicit kick "
                                "in E_q1 \\ {0} (for example --kick 0,1)");
  }
  LatticeVec k(p.q1 / 4, -(p.q2 / 4));
  check_kick(k, p);
  return k;
}

void check_kick(const LatticeVec& kick, const MatrixParams& p) {
  const bool in_e = in_gamma(kick, p) && kick.x * 2 >= -p.q1 && kick.x * 2 < p.q1;
  if (!in_e || kick.is_zero()) {
    throw std::invalid_argument("kick " + to_string(kick) + " is not in E_q1 \\ {0}; choose kick in E_q1 \\ {0}, "
                                "i.e. -q1/2 <= x < q1/2 and -floor(3q2/2) <= y <= 3q2-1-floor(3q2/2), not both 0");
  }
}

namespace {

// Digit for a node whose parent has `parent_len` letters, `nz_len` of which form the longest
// prefix J ending in a nonzero letter (index k_J); `letter` is the node's last letter.
LatticeVec node_digit(const TreeMappingSpec& spec, const MatrixParams& p, int letter, std::int64_t parent_len,
                      std::int64_t nz_len, std::int64_t nz_index) {
  LatticeVec d = static_cast<long>(letter) * ell_digit(p);
  if (spec.is_canonical() || nz_len == 0) return d;
  const std::int64_t m = spec.offset(nz_index);
  if (m < 1 || parent_len - nz_len != m - 1) return d;
  if (spec.mode() == KickMode::Coherent) return mod_a_reduce(spec.kick() + d, p);
  return letter == 0 ? spec.kick() : d;
}

}  // namespace

LatticeVec tau_eval(const TreeMappingSpec& spec, const Word& w, const MatrixParams& p) {
  if (w.empty()) throw std::invalid_argument("tau_eval: empty word");
  std::int64_t nz_len = 0, nz_index = 0, idx = 0, pow3 = 1;
  for (std::size_t j = 0; j + 1 < w.size(); ++j) {
    idx += w[j] * pow3;
    pow3 *= 3;
    if (w[j] != 0) {
      nz_len = static_cast<std::int64_t>(j) + 1;
      nz_index = idx;
    }
  }
  return node_digit(spec, p, w.back(), static_cast<std::int64_t>(w.size()) - 1, nz_len, nz_index);
}

SparseVec SpectrumPoint::lambda() const {
  std::vector<PowerTerm> t;
  t.push_back({0, base});
  if (kick) t.push_back({kick->position - 1, kick->digit});
  return SparseVec(std::move(t));
}

SpectrumPoint lambda_of_index(const TreeMappingSpec& spec, const MatrixParams& p, std::int64_t k) {
  SpectrumPoint pt;
  pt.k = k;
  pt.word = index_to_word(k);
  const auto n = static_cast<std::int64_t>(pt.word.size());
  BigInt px = 1, py = 1;
  std::int64_t nz_len = 0, nz_index = 0, idx = 0, pow3 = 1;
  for (std::int64_t j = 0; j < n; ++j) {
    const int letter = pt.word[j];
    LatticeVec d = node_digit(spec, p, letter, j, nz_len, nz_index);
    if (!d.is_zero()) {
      pt.base.x += px * d.x;
      pt.base.y += py * d.y;
    }
    px *= p.base_x();
    py *= p.base_y();
    idx += letter * pow3;
    pow3 *= 3;
    if (letter != 0) {
      nz_len = j + 1;
      nz_index = idx;
    }
  }
  if (!spec.is_canonical() && k != 0) {
    const std::int64_t m = spec.offset(k);
    if (m >= 1) pt.kick = TailKick{n + m, spec.kick()};
  }
  return pt;
}

std::int64_t SpectrumBound::max_index() const {
  if (kind == Kind::Level) return alpha(static_cast<int>(value));
  if (value < 0) throw std::invalid_argument("index range must be nonnegative");
  return value;
}

std::vector<LabeledPoint> SpectrumPrefix::labeled() const {
  std::vector<LabeledPoint> out;
  out.reserve(points.size());
  for (const auto& pt : points) out.push_back({pt.k, pt.lambda()});
  return out;
}

SpectrumPrefix enumerate_spectrum(const TreeMappingSpec& spec, const MatrixParams& p, SpectrumBound bound) {
  if (bound.kind == SpectrumBound::Kind::Level && (bound.value < 0 || bound.value > 15)) {
    throw std::invalid_argument("enumerate_spectrum: level " + std::to_string(bound.value) +
                                " exceeds the 1e7-point resource guard");
  }
  const std::int64_t K = bound.max_index();
  if (2 * K + 1 > static_cast<std::int64_t>(kMaxPrefixPoints)) {
    throw std::invalid_argument("enumerate_spectrum: bound implies " + std::to_string(2 * K + 1) +
                                " points, above the 1e7 resource guard");
  }
  SpectrumPrefix out{p, spec, bound, {}};
  out.points.resize(static_cast<std::size_t>(2 * K + 1));
#pragma omp parallel for schedule(dynamic, 1024)
  for (std::int64_t k = -K; k <= K; ++k) {
    out.points[static_cast<std::size_t>(k + K)] = lambda_of_index(spec, p, k);
  }
  return out;
}

namespace {

// log2 of sqrt(sum of squares) for (possibly huge) magnitudes given as log2 values;
// entries of -inf are ignored
double log2_norm(const std::vector<double>& logs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double l : logs) m = std::max(m, l);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double l : logs) {
    if (std::isfinite(l)) s += std::exp2(2.0 * (l - m));
  }
  return m + 0.5 * std::log2(s);
}

// log2(c * b^e - r) for c > r / b^e, returning -inf when nonpositive
double log2_lead_minus(double c, double b, double e, double r) {
  const double lead = std::log2(c) + e * std::log2(b);
  if (lead > 60.0) return lead + std::log2(1.0 - r * std::exp2(-lead));
  const double v = c * std::pow(b, e) - r;
  return v > 0.0 ? std::log2(v) : -std::numeric_limits<double>::infinity();
}

}  // namespace

double completeness_log2_radius(const TreeMappingSpec& spec, const MatrixParams& p, std::int64_t K,
                                bool include_unkicked, bool include_kicked) {
  const double inf = std::numeric_limits<double>::infinity();
  // all digits that can occur, and those that can sit at the last letter of an index word
  std::vector<LatticeVec> any{ell_digit(p), -ell_digit(p)};
  std::vector<LatticeVec> last{ell_digit(p), -ell_digit(p)};
  if (!spec.is_canonical()) {
    any.push_back(spec.kick());
    if (spec.mode() == KickMode::Coherent) {
      for (int j = -1; j <= 1; j += 2) {
        LatticeVec d = mod_a_reduce(spec.kick() + static_cast<long>(j) * ell_digit(p), p);
        any.push_back(d);
        last.push_back(d);
      }
    }
  }
  double M[2] = {0.0, 0.0};
  for (const auto& d : any) {
    for (int c = 0; c < 2; ++c) M[c] = std::max(M[c], std::abs(d[c].get_d()));
  }
  const double min_len = level_of_index(K + 1);
  double R = inf;
  const bool unkicked = spec.is_canonical() || spec.offsets().unkicked_beyond(K);
  if (include_unkicked && unkicked) {
    for (const auto& d : last) {
      // |lambda_c| >= |d_c| b^{n-1} - M_c (b^{n-1} - 1)/(b - 1), increasing in n when |d_c|(b-1) > M_c
      std::vector<double> logs;
      for (int c = 0; c < 2; ++c) {
        const double b = p.base(c), dc = std::abs(d[c].get_d());
        if (dc * (b - 1.0) <= M[c]) continue;
        const double c_eff = dc - M[c] / (b - 1.0);
        logs.push_back(log2_lead_minus(c_eff, b, min_len - 1.0, 0.0));
      }
      R = std::min(R, logs.empty() ? -inf : log2_norm(logs));
    }
  }
  if (include_kicked && !spec.is_canonical()) {
    const std::int64_t m_min = spec.offsets().min_kicked_beyond(K);
    if (m_min != std::numeric_limits<std::int64_t>::max()) {
      // |lambda_c| >= b^n (|kick_c| b^{m-1} - M_c/(b-1)) with n >= min_len, m >= m_min
      std::vector<double> logs;
      for (int c = 0; c < 2; ++c) {
        const double b = p.base(c), kc = std::abs(spec.kick()[c].get_d());
        if (kc == 0.0) continue;
        const double inner = log2_lead_minus(kc, b, static_cast<double>(m_min - 1), M[c] / (b - 1.0));
        logs.push_back(min_len * std::log2(b) + inner);
      }
      R = std::min(R, logs.empty() ? -inf : log2_norm(logs));
    }
  }
  return R;
}

TreeValidationReport validate_tree_mapping(const TreeMappingSpec& spec, const MatrixParams& p, int depth) {
  TreeValidationReport rep;
  if (depth < 1) return rep;
  const LatticeVec ell = ell_digit(p);
  // breadth-first over parents of length 0..depth-1
  std::vector<Word> level{Word{}};
  for (int len = 0; len < depth; ++len) {
    std::vector<Word> next;
    next.reserve(level.size() * 3);
    for (const auto& parent : level) {
      const bool spine = std::all_of(parent.begin(), parent.end(), [](int c) { return c == 0; });
      LatticeVec e[3];
      for (int j = -1; j <= 1; ++j) {
        Word child = parent;
        child.push_back(j);
        LatticeVec d = tau_eval(spec, child, p);
        ++rep.nodes_checked;
        if (!in_gamma(d, p)) {
          rep.violations.push_back({child, "gamma", "digit " + to_string(d) + " outside Gamma"});
        }
        LatticeVec expect = static_cast<long>(j) * ell;
        if (spine && !(d == expect)) {
          rep.violations.push_back({child, "i", "spine child carries " + to_string(d) + ", expected " +
                                                    to_string(expect)});
        }
        e[j + 1] = mod_a_reduce(d - expect, p);
        if (j != 0 && !spine && len + 1 <= 39) {
          // (iii): finite offset for the index word ending here
          try {
            (void)spec.offset(word_to_index(child));
          } catch (const std::invalid_argument& ex) {
            rep.violations.push_back({child, "iii", ex.what()});
          }
        }
        next.push_back(std::move(child));
      }
      if (!spine) {
        const bool same = e[0] == e[1] && e[1] == e[2];
        const bool in_e = e[1].x * 2 >= -p.q1 && e[1].x * 2 < p.q1;
        if (!same || !in_e) {
          rep.violations.push_back({parent, "ii",
                                    "children residues " + to_string(e[0]) + "," + to_string(e[1]) + "," +
                                        to_string(e[2]) + " fit no single e_I in E_q1"});
        }
      }
    }
    level = std::move(next);
  }
  rep.pass = rep.violations.empty();
  return rep;
}

EllStats ell_stats(const TreeMappingSpec& spec, const MatrixParams& p, std::int64_t K) {
  EllStats st;
  for (std::int64_t k = -K; k <= K; ++k) {
    if (k == 0) continue;
    int ell = 0;
    const std::int64_t m = spec.offset(k);
    if (m >= 1) {
      // the tail I0^l only meets a kick parent at l = m_k; other tail nodes carry 0
      Word w = index_to_word(k);
      const auto n = static_cast<std::int64_t>(w.size());
      LatticeVec d = node_digit(spec, p, 0, n + m - 1, n, k);
      ell = d.is_zero() ? 0 : 1;
    }
    st.per_k.emplace_back(k, ell);
    st.max = std::max(st.max, ell);
  }
  return st;
}

}  // namespace spectra
