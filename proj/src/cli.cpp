#include "spectra/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "spectra/dimension.hpp"
#include "spectra/fourier.hpp"
#include "spectra/verify.hpp"

namespace spectra::cli {

using ojson = nlohmann::ordered_json;

namespace {

bool is_decimal(const std::string& s) {
  const std::size_t start = (!s.empty() && s[0] == '-') ? 1 : 0;
  if (s.size() == start) return false;
  return std::all_of(s.begin() + static_cast<std::ptrdiff_t>(start), s.end(),
                     [](char c) { return c >= '0' && c <= '9'; });
}

BigInt parse_big(const std::string& s, const char* what) {
  if (!is_decimal(s)) throw InputError(std::string(what) + ": not a decimal integer: '" + s + "'");
  return BigInt(s, 10);
}

LatticeVec parse_pair(const std::string& s, const char* what) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw InputError(std::string(what) + " expects X,Y, got '" + s + "'");
  return LatticeVec(parse_big(s.substr(0, comma), what), parse_big(s.substr(comma + 1), what));
}

std::map<std::int64_t, std::int64_t> parse_offsets(const std::string& s) {
  std::map<std::int64_t, std::int64_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw InputError("--offsets expects k:m,k:m; got '" + item + "'");
    const std::string a = item.substr(0, colon), b = item.substr(colon + 1);
    if (!is_decimal(a) || !is_decimal(b)) throw InputError("--offsets: bad entry '" + item + "'");
    const std::int64_t m = std::stoll(b);
    if (m < 0) throw InputError("--offsets: m must be >= 0 in '" + item + "'");
    out[std::stoll(a)] = m;
  }
  return out;
}

ojson config_json(const GenerationConfig& c) {
  ojson j;
  j["q1"] = c.q1;
  j["q2"] = c.q2;
  j["level"] = c.level ? ojson(*c.level) : ojson(nullptr);
  j["range"] = c.range ? ojson(*c.range) : ojson(nullptr);
  j["t"] = c.t ? ojson(*c.t) : ojson(nullptr);
  j["kick"] = c.kick ? ojson::array({c.kick->x.get_str(), c.kick->y.get_str()}) : ojson(nullptr);
  j["mode"] = c.mode;
  j["offsets"] = c.offsets;
  j["variant"] = c.variant;
  j["seed"] = c.seed;
  return j;
}

GenerationConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("config record must be an object");
  GenerationConfig c;
  try {
    c.q1 = j.at("q1").get<int>();
    c.q2 = j.at("q2").get<int>();
    if (j.contains("level") && !j["level"].is_null()) c.level = j["level"].get<int>();
    if (j.contains("range") && !j["range"].is_null()) c.range = j["range"].get<std::int64_t>();
    if (j.contains("t") && !j["t"].is_null()) c.t = j["t"].get<double>();
    if (j.contains("kick") && !j["kick"].is_null()) {
      const auto& k = j["kick"];
      if (!k.is_array() || k.size() != 2) throw InputError("config kick must be [x,y]");
      c.kick = LatticeVec(parse_big(k[0].get<std::string>(), "kick"), parse_big(k[1].get<std::string>(), "kick"));
    }
    if (j.contains("mode")) c.mode = j["mode"].get<std::string>();
    if (j.contains("offsets")) c.offsets = j["offsets"].get<std::string>();
    if (j.contains("variant")) c.variant = j["variant"].get<std::uint64_t>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad config record: ") + e.what());
  }
  return c;
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  return s.substr(i);
}

PointRecord record_from_json(const nlohmann::json& j) {
  PointRecord r;
  try {
    if (!j.is_object()) throw InputError("record must be an object");
    const auto& k = j.at("k");
    if (!k.is_number_integer()) throw InputError("k must be an integer");
    r.k = k.get<std::int64_t>();
    r.word = j.contains("word") ? j["word"].get<std::string>() : std::string();
    const auto& l = j.at("lambda");
    if (!l.is_array() || l.size() != 2) throw InputError("lambda must be [x,y]");
    for (int a = 0; a < 2; ++a) {
      std::string v = l[a].is_string() ? l[a].get<std::string>()
                                       : (l[a].is_number_integer() ? l[a].dump() : std::string("?"));
      (a == 0 ? r.x : r.y) = v;
    }
    if (j.contains("kick_position") && !j["kick_position"].is_null()) {
      if (!j["kick_position"].is_number_integer()) throw InputError("kick_position must be an integer or null");
      r.kick_position = j["kick_position"].get<std::int64_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad record: ") + e.what());
  }
  return r;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> f;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) f.push_back(trim(item));
  if (!line.empty() && line.back() == ',') f.emplace_back();
  return f;
}

}  // namespace

MatrixParams GenerationConfig::params() const { return MatrixParams(q1, q2); }

SpectrumBound GenerationConfig::bound() const {
  if (level && range) throw InputError("give either --level or --range, not both");
  if (level) {
    if (*level < 0) throw InputError("--level must be >= 0");
    return SpectrumBound::level(*level);
  }
  if (range) {
    if (*range < 0) throw InputError("--range must be >= 0");
    return SpectrumBound::range(*range);
  }
  throw InputError("one of --level or --range is required");
}

std::optional<IntermediateSpec> GenerationConfig::intermediate() const {
  if (!t) return std::nullopt;
  auto v = family_variants(*t, params(), static_cast<std::size_t>(variant) + 1, seed, kick, parse_kick_mode(mode));
  return v.back();
}

TreeMappingSpec GenerationConfig::spec() const {
  const KickMode m = parse_kick_mode(mode);
  if (t) {
    if (!offsets.empty()) throw InputError("--offsets and --t are mutually exclusive");
    return intermediate()->tree();
  }
  if (!offsets.empty()) {
    const MatrixParams p = params();
    LatticeVec k = kick ? *kick : default_kick(p);
    if (kick) check_kick(k, p);
    return TreeMappingSpec::kicked(OffsetRule::table(parse_offsets(offsets)), k, m);
  }
  if (kick) throw InputError("--kick needs --t or --offsets");
  if (variant != 0) throw InputError("--variant needs --t");
  return TreeMappingSpec::canonical();
}

PointRecord to_record(const SpectrumPoint& pt, const MatrixParams& p) {
  PointRecord r;
  r.k = pt.k;
  r.word = word_to_string(pt.word);
  const LatticeVec v = pt.materialize(p);
  r.x = v.x.get_str();
  r.y = v.y.get_str();
  if (pt.kick) r.kick_position = pt.kick->position;
  return r;
}

LabeledPoint from_record(const PointRecord& r, const MatrixParams& p) {
  const std::string expect = word_to_string(index_to_word(r.k));
  if (!r.word.empty() && r.word != expect) {
    throw InputError("record k=" + std::to_string(r.k) + ": word '" + r.word + "' does not match '" + expect + "'");
  }
  const LatticeVec v(parse_big(r.x, "x"), parse_big(r.y, "y"));
  if (!r.kick_position) return {r.k, SparseVec(v)};
  const std::int64_t P = *r.kick_position;
  if (P < 1) throw InputError("record k=" + std::to_string(r.k) + ": kick_position must be >= 1");
  // base = the unique value with P-1 Gamma digits congruent to v mod A^{P-1}
  LatticeVec base, kick;
  for (int a = 0; a < 2; ++a) {
    const int b = p.base(a);
    const BigInt B = pow_base(b, P - 1);
    const BigInt lo = BigInt(digit_low(b)) * (B - 1) / (b - 1);
    BigInt r0 = v[a] - lo;
    BigInt m;
    mpz_fdiv_r(m.get_mpz_t(), r0.get_mpz_t(), B.get_mpz_t());
    base[a] = lo + m;
    kick[a] = (v[a] - base[a]) / B;
  }
  if (kick.is_zero() || !in_gamma(kick, p)) {
    throw InputError("record k=" + std::to_string(r.k) + ": kick digit " + to_string(kick) + " at position " +
                     std::to_string(P) + " is not a nonzero digit");
  }
  return {r.k, SparseVec(std::vector<PowerTerm>{{0, base}, {P - 1, kick}})};
}

PointFile read_point_file(std::istream& in) {
  PointFile f;
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) {
    line = trim(line);
    if (!line.empty()) lines.push_back(line);
  }
  if (lines.empty()) throw InputError("empty input");
  if (lines.front()[0] == '{') {
    for (const auto& l : lines) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(l);
      } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("bad JSON line: ") + e.what());
      }
      if (j.is_object() && j.contains("config")) {
        if (f.config) throw InputError("more than one config record");
        f.config = config_from_json(j["config"]);
        continue;
      }
      f.records.push_back(record_from_json(j));
    }
  } else {
    if (lines.front() != "k,word,x,y,kick_position") {
      throw InputError("CSV header must be 'k,word,x,y,kick_position'");
    }
    for (std::size_t i = 1; i < lines.size(); ++i) {
      if (lines[i][0] == '#') continue;
      const auto fl = split_csv(lines[i]);
      if (fl.size() != 5) throw InputError("CSV line " + std::to_string(i + 1) + ": expected 5 fields");
      PointRecord r;
      if (!is_decimal(fl[0])) throw InputError("CSV line " + std::to_string(i + 1) + ": bad k");
      r.k = std::stoll(fl[0]);
      r.word = fl[1];
      r.x = fl[2];
      r.y = fl[3];
      if (!fl[4].empty() && fl[4] != "null") {
        if (!is_decimal(fl[4])) throw InputError("CSV line " + std::to_string(i + 1) + ": bad kick_position");
        r.kick_position = std::stoll(fl[4]);
      }
      f.records.push_back(std::move(r));
    }
  }
  if (f.records.empty()) throw InputError("no point records");
  return f;
}

namespace {

struct Options {
  int q1 = 1, q2 = 1;
  std::optional<int> level;
  std::optional<std::int64_t> range;
  std::optional<double> t;
  std::string kick;
  std::string mode = "coherent";
  std::string offsets;
  std::uint64_t variant = 0;
  std::uint64_t seed = 0;
  std::optional<int> depth;
  std::string scales;
  std::string format = "jsonl";
  double tolerance = 1e-9;
  std::string input;
  std::string checks = "orthogonality";
  std::size_t samples = 16;
  std::string xi;
  std::size_t centers = 256;
  std::size_t variants = 4;
  std::size_t max_report = 100;
  bool closed_forms_only = false;

  CLI::Option* q1_opt = nullptr;
  CLI::Option* q2_opt = nullptr;
  CLI::Option* gen_opts[4] = {};  // level, range, t, offsets
};

void add_generation(CLI::App* app, Options& o) {
  o.q1_opt = app->add_option("--q1", o.q1, "A = diag(3 q1, 3 q2)");
  o.q2_opt = app->add_option("--q2", o.q2);
  o.gen_opts[0] = app->add_option("--level", o.level, "all words of length <= level");
  o.gen_opts[1] = app->add_option("--range", o.range, "indices |k| <= range");
  o.gen_opts[2] = app->add_option("--t,--construct-t", o.t, "intermediate construction at dimension t");
  app->add_option("--kick", o.kick, "kick digit X,Y");
  app->add_option("--mode", o.mode, "coherent|literal")->check(CLI::IsMember({"coherent", "literal"}));
  o.gen_opts[3] = app->add_option("--offsets", o.offsets, "kicked offsets table k:m,...");
  app->add_option("--variant", o.variant, "family variant index (with --t)");
  app->add_option("--seed", o.seed, "seed for every randomized choice");
}

GenerationConfig to_config(const Options& o) {
  GenerationConfig c;
  c.q1 = o.q1;
  c.q2 = o.q2;
  c.level = o.level;
  c.range = o.range;
  c.t = o.t;
  if (!o.kick.empty()) c.kick = parse_pair(o.kick, "--kick");
  c.mode = o.mode;
  c.offsets = o.offsets;
  c.variant = o.variant;
  c.seed = o.seed;
  return c;
}

bool generation_given(const Options& o) {
  for (auto* opt : o.gen_opts)
    if (opt && opt->count() > 0) return true;
  return false;
}

// Points plus whatever is known about how they were made.
struct Loaded {
  MatrixParams params;
  std::vector<LabeledPoint> points;
  std::optional<GenerationConfig> config;
  std::optional<SpectrumPrefix> prefix;
};

Loaded load_points(const Options& o) {
  Loaded L;
  if (!o.input.empty()) {
    std::ifstream in(o.input);
    if (!in) throw InputError("cannot open " + o.input);
    PointFile f = read_point_file(in);
    GenerationConfig c = to_config(o);
    if (f.config) {
      if ((o.q1_opt->count() && o.q1 != f.config->q1) || (o.q2_opt->count() && o.q2 != f.config->q2)) {
        throw InputError("--q1/--q2 disagree with the file's config record");
      }
      L.config = f.config;
      c = *f.config;
    } else if (generation_given(o)) {
      L.config = c;
    }
    L.params = c.params();
    L.points.reserve(f.records.size());
    for (const auto& r : f.records) L.points.push_back(from_record(r, L.params));
    return L;
  }
  const GenerationConfig c = to_config(o);
  L.params = c.params();
  L.config = c;
  L.prefix = enumerate_spectrum(c.spec(), L.params, c.bound());
  L.points = L.prefix->labeled();
  return L;
}

void echo_config(std::ostream& err, const char* command, const ojson& extra) {
  ojson j;
  j["command"] = command;
  j["config"] = extra;
  err << j.dump() << '\n';
}

ojson violation_json(const char* check, const PairViolation& v) {
  ojson j;
  j["check"] = check;
  j["k"] = v.k;
  j["k2"] = v.k2;
  j["difference"] = v.difference;
  j["reason"] = v.reason;
  return ojson{{"violation", j}};
}

std::set<std::string> parse_checks(const std::string& s) {
  static const std::set<std::string> known{"orthogonality", "lines", "projections", "unitarity", "qsum"};
  std::set<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item == "all") {
      out = known;
      continue;
    }
    if (!known.count(item)) throw InputError("unknown check '" + item + "'");
    out.insert(item);
  }
  if (out.empty()) throw InputError("--checks is empty");
  return out;
}

// n when the points are exactly the indices |k| <= alpha_n
std::optional<int> full_level(const std::vector<LabeledPoint>& pts) {
  for (int n = 0; n <= 12; ++n) {
    const std::int64_t a = alpha(n);
    if (static_cast<std::int64_t>(pts.size()) != 2 * a + 1) continue;
    std::set<std::int64_t> ks;
    for (const auto& p : pts) ks.insert(p.k);
    if (static_cast<std::int64_t>(ks.size()) == 2 * a + 1 && *ks.begin() == -a && *ks.rbegin() == a) return n;
    return std::nullopt;
  }
  return std::nullopt;
}

std::vector<Vec2> xi_samples(const Options& o, const MatrixParams& p) {
  if (!o.xi.empty()) {
    const auto c = o.xi.find(',');
    if (c == std::string::npos) throw InputError("--xi expects x,y");
    try {
      return {Vec2{std::stod(o.xi.substr(0, c)), std::stod(o.xi.substr(c + 1))}};
    } catch (const std::exception&) {
      throw InputError("--xi expects two numbers");
    }
  }
  std::mt19937_64 rng(o.seed);
  const SamplingBox box = sampling_box(p);
  std::vector<Vec2> out;
  for (std::size_t i = 0; i < o.samples; ++i) out.push_back(box.sample(rng));
  return out;
}

template <class Report>
std::size_t emit_pairs(std::ostream& out, const char* name, const Report& r, std::size_t max_report) {
  ojson j;
  j["check"] = name;
  j["pairs"] = r.pairs_checked;
  j["sampled"] = r.sampled;
  j["violations"] = r.violations.size();
  out << j.dump() << '\n';
  for (std::size_t i = 0; i < r.violations.size() && i < max_report; ++i)
    out << violation_json(name, r.violations[i]).dump() << '\n';
  return r.violations.size();
}

int cmd_gen(const Options& o, std::ostream& out, std::ostream& err) {
  const GenerationConfig c = to_config(o);
  const MatrixParams p = c.params();
  const SpectrumPrefix prefix = enumerate_spectrum(c.spec(), p, c.bound());
  if (o.format == "jsonl") {
    out << ojson{{"config", config_json(c)}}.dump() << '\n';
  } else {
    echo_config(err, "gen", config_json(c));
    out << "k,word,x,y,kick_position\n";
  }
  for (const auto& pt : prefix.points) {
    const PointRecord r = to_record(pt, p);
    if (o.format == "jsonl") {
      ojson j;
      j["k"] = r.k;
      j["word"] = r.word;
      j["lambda"] = ojson::array({r.x, r.y});
      j["kick_position"] = r.kick_position ? ojson(*r.kick_position) : ojson(nullptr);
      out << j.dump() << '\n';
    } else {
      out << r.k << ',' << r.word << ',' << r.x << ',' << r.y << ',';
      if (r.kick_position) out << *r.kick_position;
      out << '\n';
    }
  }
  return kPass;
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
  const auto checks = parse_checks(o.checks);
  Loaded L = load_points(o);
  {
    ojson e = L.config ? config_json(*L.config) : ojson{{"q1", L.params.q1}, {"q2", L.params.q2}};
    e["checks"] = o.checks;
    e["tolerance"] = o.tolerance;
    e["samples"] = o.samples;
    e["seed"] = o.seed;
    if (!o.input.empty()) e["input"] = o.input;
    echo_config(err, "verify", e);
  }
  const MatrixParams& p = L.params;
  PairwiseOptions po;
  po.seed = o.seed;
  std::size_t total = 0;
  if (checks.count("orthogonality"))
    total += emit_pairs(out, "orthogonality", check_orthogonality(L.points, p, po), o.max_report);
  if (checks.count("lines")) total += emit_pairs(out, "lines", check_distinct_lines(L.points, p, po), o.max_report);
  if (checks.count("projections"))
    total += emit_pairs(out, "projections", check_projection_orthogonality(L.points, p, po), o.max_report);
  if (checks.count("unitarity")) {
    ojson j;
    j["check"] = "unitarity";
    const auto n = full_level(L.points);
    if (!n || *n > 6) {
      j["skipped"] = "points are not a full level n <= 6";
    } else {
      const double g = gram_unitarity(*n, L.points, p);
      j["level"] = *n;
      j["max_deviation"] = g;
      j["violations"] = g < o.tolerance ? 0 : 1;
      if (g >= o.tolerance) ++total;
    }
    out << j.dump() << '\n';
  }
  if (checks.count("qsum")) {
    std::size_t bad = 0;
    double worst = -std::numeric_limits<double>::infinity();
    std::vector<ojson> details;
    for (const Vec2& x : xi_samples(o, p)) {
      const QSum q = q_sum(x, L.points, p, o.tolerance);
      worst = std::max(worst, q.value - 1.0);
      if (q.value - q.error > 1.0 + o.tolerance) {
        ++bad;
        ojson v;
        v["check"] = "qsum";
        v["xi"] = {x.x, x.y};
        v["value"] = q.value;
        v["error"] = q.error;
        details.push_back(ojson{{"violation", v}});
      }
    }
    ojson j;
    j["check"] = "qsum";
    j["samples"] = o.xi.empty() ? o.samples : 1;
    j["max_excess"] = worst;
    j["violations"] = bad;
    out << j.dump() << '\n';
    for (std::size_t i = 0; i < details.size() && i < o.max_report; ++i) out << details[i].dump() << '\n';
    total += bad;
  }
  out << ojson{{"summary", {{"points", L.points.size()}, {"violations", total}, {"pass", total == 0}}}}.dump()
      << '\n';
  return total == 0 ? kPass : kViolations;
}

std::optional<ScaleWindow> parse_scales(const std::string& s) {
  if (s.empty()) return std::nullopt;
  const auto c = s.find(':');
  if (c == std::string::npos) throw InputError("--scales expects jmin:jmax");
  const std::string a = s.substr(0, c), b = s.substr(c + 1);
  if (!is_decimal(a) || !is_decimal(b)) throw InputError("--scales expects integers jmin:jmax");
  return ScaleWindow{std::stoi(a), std::stoi(b)};
}

ojson num(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

ojson closed_forms(const MatrixParams& p) {
  const auto e = entropy_dim_closed_form(p);
  ojson j;
  j["beurling_upper"] = beurling_upper_bound(p);
  j["entropy_dim"] = e.dim;
  j["hausdorff_support"] = support_hausdorff_dim(p).value;
  return j;
}

void emit_row(std::ostream& out, bool csv, const ojson& row) {
  if (!csv) {
    out << row.dump() << '\n';
    return;
  }
  bool first = true;
  for (const auto& [k, v] : row.items()) {
    if (!first) out << ',';
    first = false;
    out << (v.is_string() ? v.get<std::string>() : v.dump());
  }
  out << '\n';
}

int cmd_dim(const Options& o, std::ostream& out, std::ostream& err) {
  const bool csv = o.format == "csv";
  if (o.closed_forms_only) {
    const MatrixParams p(o.q1, o.q2);
    echo_config(err, "dim", ojson{{"q1", p.q1}, {"q2", p.q2}, {"closed_forms_only", true}});
    const ojson cf = closed_forms(p);
    if (csv) out << "name,value\n";
    for (const auto& [k, v] : cf.items()) emit_row(out, csv, ojson{{"name", k}, {"value", v}});
    return kPass;
  }
  const auto window = parse_scales(o.scales);
  Loaded L = load_points(o);
  const MatrixParams& p = L.params;
  double radius = std::numeric_limits<double>::infinity();
  if (L.config) radius = completeness_log2_radius(L.config->spec(), p, L.config->bound().max_index());
  {
    ojson e = L.config ? config_json(*L.config) : ojson{{"q1", p.q1}, {"q2", p.q2}};
    e["scales"] = o.scales;
    e["centers"] = o.centers;
    e["seed"] = o.seed;
    if (!o.input.empty()) e["input"] = o.input;
    echo_config(err, "dim", e);
  }
  PointCloud cloud(L.points, p);
  CentersPolicy cp;
  cp.max_centers = o.centers;
  cp.seed = o.seed;
  const DimensionEstimate est = beurling_dim_estimate(cloud, window, cp, radius);
  if (csv) out << "j,h,count,log_h,log_count\n";
  for (std::size_t i = 0; i < est.exponents.size(); ++i) {
    const int jexp = est.exponents[i];
    ojson row;
    row["j"] = jexp;
    row["h"] = pow_base(p.base_y(), jexp).get_str();
    row["count"] = est.counts[i];
    row["log_h"] = jexp * std::log(static_cast<double>(p.base_y()));
    row["log_count"] = num(std::log(static_cast<double>(est.counts[i])));
    emit_row(out, csv, row);
  }
  ojson s;
  s["points"] = L.points.size();
  s["slope"] = est.slope;
  s["fit_residual"] = est.fit_residual;
  s["window"] = {est.window_lo, est.window_hi};
  s["centers"] = est.centers;
  s["radius_log2"] = num(radius);
  s["references"] = closed_forms(p);
  bool all_kicked = L.points.size() > 1;
  for (const auto& pt : L.points) {
    if (pt.k == 0) continue;
    bool kicked = false;
    for (const auto& t : pt.lambda.terms()) kicked = kicked || t.power > 0;
    all_kicked = all_kicked && kicked;
  }
  if (all_kicked) {
    const double b = std::pow(3.0 * p.q1, 2) / 4.0;
    const LacunaryReport lr = lacunary_check(L.points, p, b);
    s["references"]["lacunary"] = "dim 0";
    s["lacunary_check"] = {{"b", b}, {"pass", lr.pass}, {"leading_ok", lr.leading_ok}, {"min_ratio", num(lr.min_ratio)}};
  }
  if (csv) {
    out << "# " << ojson{{"summary", s}}.dump() << '\n';
  } else {
    out << ojson{{"summary", s}}.dump() << '\n';
  }
  return kPass;
}

// symbolic identity of a point: (base, kick power, kick digit)
std::set<std::tuple<std::string, std::int64_t, std::string>> point_keys(const std::vector<LabeledPoint>& pts) {
  std::set<std::tuple<std::string, std::int64_t, std::string>> keys;
  for (const auto& pt : pts) {
    std::string base = "(0,0)", kick;
    std::int64_t e = 0;
    for (const auto& t : pt.lambda.terms()) {
      if (t.power == 0) {
        base = to_string(t.coef);
      } else {
        e = t.power;
        kick = to_string(t.coef);
      }
    }
    keys.emplace(base, e, kick);
  }
  return keys;
}

ojson estimate_json(const std::vector<LabeledPoint>& pts, const MatrixParams& p, double radius,
                    const CentersPolicy& cp, std::optional<double>* slope_out) {
  ojson j;
  j["points"] = pts.size();
  try {
    PointCloud cloud(pts, p);
    const auto est = beurling_dim_estimate(cloud, std::nullopt, cp, radius);
    j["estimate"] = est.slope;
    j["window"] = {est.window_lo, est.window_hi};
    if (slope_out) *slope_out = est.slope;
  } catch (const std::invalid_argument& e) {
    j["estimate"] = nullptr;
    j["note"] = e.what();
  }
  return j;
}

int cmd_construct(const Options& o, std::ostream& out, std::ostream& err) {
  if (!o.t) throw InputError("construct needs --t");
  const MatrixParams p(o.q1, o.q2);
  const std::int64_t K = o.range.value_or(364);
  const int depth = o.depth.value_or(12);
  std::optional<LatticeVec> kick;
  if (!o.kick.empty()) kick = parse_pair(o.kick, "--kick");
  const KickMode mode = parse_kick_mode(o.mode);
  ojson e{{"q1", p.q1}, {"q2", p.q2}, {"t", *o.t}, {"range", K}, {"depth", depth}, {"mode", o.mode},
          {"variants", o.variants}, {"seed", o.seed}, {"centers", o.centers}};
  e["kick"] = kick ? ojson::array({kick->x.get_str(), kick->y.get_str()}) : ojson(nullptr);
  echo_config(err, "construct", e);

  const auto variants = family_variants(*o.t, p, o.variants, o.seed, kick, mode, K);
  CentersPolicy cp;
  cp.max_centers = o.centers;
  cp.seed = o.seed;
  bool pass = true;
  std::vector<double> estimates;
  std::vector<std::set<std::tuple<std::string, std::int64_t, std::string>>> keys;
  for (std::size_t i = 0; i < variants.size(); ++i) {
    const auto& spec = variants[i];
    const auto prefix = build_intermediate_spectrum(spec, SpectrumBound::range(K));
    const auto pts = prefix.labeled();
    keys.push_back(point_keys(pts));
    ojson j;
    j["variant"] = i;
    j["variant_seed"] = spec.variant_seed;
    j["d"] = static_cast<double>(spec.gamma_t.d);
    j["points"] = pts.size();
    PairwiseOptions po;
    po.seed = o.seed;
    const auto orth = check_orthogonality(pts, p, po);
    j["orthogonality"] = {{"pairs", orth.pairs_checked}, {"violations", orth.violations.size()}};
    pass = pass && orth.pass();
    const auto tv = validate_tree_mapping(spec.tree(), p, 8);
    j["tree_validation"] = {{"depth", 8}, {"nodes", tv.nodes_checked}, {"violations", tv.violations.size()}};
    pass = pass && tv.pass;
    const auto split = split_prefix(prefix, spec);
    if (split.lambda_prime.size() > 1) {
      j["lambda_prime"] = estimate_json(split.lambda_prime, p, lambda_prime_log2_radius(spec, K), cp, nullptr);
    } else {
      j["lambda_prime"] = {{"points", split.lambda_prime.size()}, {"estimate", nullptr}};
    }
    std::optional<double> slope;
    j["lambda_t"] =
        estimate_json(pts, p, completeness_log2_radius(spec.tree(), p, K), cp, &slope);
    if (slope) estimates.push_back(*slope);
    const std::size_t pert = f_t_perturbation_count(prefix, spec);
    j["f_t_perturbations"] = pert;
    pass = pass && pert == 0;
    out << j.dump() << '\n';
  }
  // F_t words never carry kicks, so every variant shares the same F_t
  ojson ft;
  if (!variants.empty()) {
    ft = estimate_json(f_t_points(variants[0], depth), p, f_t_log2_radius(variants[0], depth), cp, nullptr);
    ft["depth"] = depth;
    ft["target"] = *o.t;
  }
  bool distinct = true;
  for (std::size_t a = 0; a < keys.size(); ++a)
    for (std::size_t b = a + 1; b < keys.size(); ++b) distinct = distinct && keys[a] != keys[b];
  double spread = 0.0;
  if (!estimates.empty()) {
    const auto [mn, mx] = std::minmax_element(estimates.begin(), estimates.end());
    spread = *mx - *mn;
  }
  if (variants.size() > 1) pass = pass && distinct;
  ojson s;
  s["t"] = *o.t;
  s["t_max"] = t_max(p);
  s["variants"] = variants.size();
  s["f_t"] = ft;
  s["distinct"] = distinct;
  s["estimate_spread"] = spread;
  s["pass"] = pass;
  out << ojson{{"summary", s}}.dump() << '\n';
  return pass ? kPass : kViolations;
}

int cmd_qsum(const Options& o, std::ostream& out, std::ostream& err) {
  std::vector<std::vector<LabeledPoint>> sets;
  std::vector<std::string> labels;
  MatrixParams p;
  ojson e;
  if (!o.input.empty()) {
    Loaded L = load_points(o);
    p = L.params;
    sets.push_back(L.points);
    labels.push_back("input");
    e = L.config ? config_json(*L.config) : ojson{{"q1", p.q1}, {"q2", p.q2}};
    e["input"] = o.input;
  } else {
    GenerationConfig c = to_config(o);
    if (!c.level) throw InputError("qsum needs --level (or --input)");
    const int n = *c.level;
    p = c.params();
    const auto prefix = enumerate_spectrum(c.spec(), p, SpectrumBound::level(n));
    const auto all = prefix.labeled();
    for (int j = 0; j <= n; ++j) {
      std::vector<LabeledPoint> sub;
      for (const auto& pt : all)
        if (std::llabs(pt.k) <= alpha(j)) sub.push_back(pt);
      sets.push_back(std::move(sub));
      labels.push_back(std::to_string(j));
    }
    e = config_json(c);
  }
  e["samples"] = o.xi.empty() ? o.samples : 1;
  e["seed"] = o.seed;
  e["tolerance"] = o.tolerance;
  echo_config(err, "qsum", e);
  std::size_t bad = 0;
  double max_gap = 0.0;
  for (const Vec2& x : xi_samples(o, p)) {
    ojson j;
    j["xi"] = {x.x, x.y};
    ojson qs = ojson::array(), errs = ojson::array();
    bool bounded = true, monotone = true;
    double prev_hi = -1.0, prev_lo = -1.0;
    for (const auto& s : sets) {
      const QSum q = q_sum(x, s, p, o.tolerance);
      qs.push_back(q.value);
      errs.push_back(q.error);
      bounded = bounded && q.value - q.error <= 1.0 + o.tolerance;
      // certified decrease: the new upper end sits below the previous lower end
      if (prev_lo >= 0.0 && q.value + q.error < prev_lo) monotone = false;
      prev_hi = q.value + q.error;
      prev_lo = q.value - q.error;
      (void)prev_hi;
    }
    max_gap = std::max(max_gap, 1.0 - qs.back().get<double>());
    j["levels"] = labels;
    j["q"] = qs;
    j["error"] = errs;
    j["gap"] = 1.0 - qs.back().get<double>();
    j["bounded"] = bounded;
    j["monotone"] = monotone;
    if (!bounded || !monotone) ++bad;
    out << j.dump() << '\n';
  }
  out << ojson{{"summary", {{"violations", bad}, {"max_gap", max_gap}, {"pass", bad == 0}}}}.dump() << '\n';
  return bad == 0 ? kPass : kViolations;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"spectra: spectra of a self-affine measure with digits {(0,0),(1,0),(0,1)}"};
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("gen", "emit spectrum points");
  add_generation(gen, o);
  gen->add_option("--format", o.format)->check(CLI::IsMember({"jsonl", "csv"}));

  auto* ver = app.add_subcommand("verify", "check a point set");
  add_generation(ver, o);
  ver->add_option("--input", o.input, "jsonl or csv point file");
  ver->add_option("--checks", o.checks, "comma list of orthogonality,lines,projections,unitarity,qsum or all");
  ver->add_option("--tolerance", o.tolerance);
  ver->add_option("--samples", o.samples, "xi samples for qsum");
  ver->add_option("--xi", o.xi, "single xi x,y for qsum");
  ver->add_option("--max-report", o.max_report, "violations detailed per check");

  auto* dim = app.add_subcommand("dim", "Beurling dimension table");
  add_generation(dim, o);
  dim->add_option("--input", o.input);
  dim->add_option("--scales", o.scales, "jmin:jmax, h = (3 q2)^j");
  dim->add_option("--centers", o.centers, "ball centers sampled beyond the origin");
  dim->add_option("--format", o.format)->check(CLI::IsMember({"jsonl", "csv"}));
  dim->add_flag("--closed-forms-only", o.closed_forms_only);

  auto* con = app.add_subcommand("construct", "intermediate-dimension spectra and their checks");
  add_generation(con, o);
  con->add_option("--depth", o.depth, "word length for the F_t estimate (default 12)");
  con->add_option("--variants", o.variants, "family variants (default 4)");
  con->add_option("--centers", o.centers);

  auto* qs = app.add_subcommand("qsum", "partial sums of |mu_hat(xi + lambda)|^2");
  add_generation(qs, o);
  qs->add_option("--input", o.input);
  qs->add_option("--tolerance", o.tolerance);
  qs->add_option("--samples", o.samples);
  qs->add_option("--xi", o.xi);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kPass : kUsage;
  }
  try {
    if (gen->parsed()) return cmd_gen(o, out, err);
    if (ver->parsed()) return cmd_verify(o, out, err);
    if (dim->parsed()) return cmd_dim(o, out, err);
    if (con->parsed()) return cmd_construct(o, out, err);
    return cmd_qsum(o, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace spectra::cli
