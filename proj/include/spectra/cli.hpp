#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spectra/construct.hpp"
#include "spectra/treemap.hpp"

namespace spectra::cli {

enum ExitCode { kPass = 0, kViolations = 1, kUsage = 2 };

// Malformed input file or inconsistent record.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Everything needed to regenerate a point set.
struct GenerationConfig {
  int q1 = 1;
  int q2 = 1;
  std::optional<int> level;
  std::optional<std::int64_t> range;
  std::optional<double> t;
  std::optional<LatticeVec> kick;
  std::string mode = "coherent";
  std::string offsets;  // "k:m,k:m" table for kicked mappings without --t
  std::uint64_t variant = 0;  // index into family_variants(t, ..., seed)
  std::uint64_t seed = 0;

  MatrixParams params() const;
  SpectrumBound bound() const;
  TreeMappingSpec spec() const;
  std::optional<IntermediateSpec> intermediate() const;
};

struct PointRecord {
  std::int64_t k = 0;
  std::string word;
  std::string x, y;
  std::optional<std::int64_t> kick_position;
};

PointRecord to_record(const SpectrumPoint& pt, const MatrixParams& p);
// Rebuilds base + A^{P-1} kick from the plain coordinates and kick_position P.
LabeledPoint from_record(const PointRecord& r, const MatrixParams& p);

struct PointFile {
  std::vector<PointRecord> records;
  std::optional<GenerationConfig> config;  // from a leading jsonl config record
};

// jsonl or csv, detected from the first non-blank character
PointFile read_point_file(std::istream& in);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace spectra::cli
