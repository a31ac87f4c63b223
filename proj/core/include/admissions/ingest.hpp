#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "admissions/inverse.hpp"

namespace admissions {

/// Score statistics tracked per college: three SAT section scores and the
/// ACT composite, each at the 25th and 75th percentile of admits.
enum class TestId { kSatReading = 0, kSatMath, kSatWriting, kActComposite };
inline constexpr std::size_t kNumTests = 4;
inline constexpr double kPercentileRanks[2] = {0.25, 0.75};

const char* test_id_name(TestId id);

/// One college's raw statistics. Score cells are missing when the source
/// row left them blank; such colleges are excluded from the observation.
struct CollegeRecord {
  std::string name;
  long enrolled = 0;
  std::optional<double> reported_yield;
  /// [test][0] = 25th percentile raw score, [test][1] = 75th.
  std::array<std::array<std::optional<double>, 2>, kNumTests> scores;
  std::optional<double> sat_share;  ///< share of applicants submitting SAT
  std::optional<double> act_share;

  bool complete() const;
};

/// Map from raw test score to population percentile, one curve per test.
/// Lookups interpolate linearly between table rows; a raw score outside the
/// published range is a data error.
class PercentileTable {
 public:
  void add_point(TestId test, double raw_score, double percentile);

  /// Throws DataError if the curve for `test` is absent, non-monotone, or
  /// does not cover `raw_score`.
  double population_percentile(TestId test, double raw_score) const;

  bool has(TestId test) const;

  /// Validates monotonicity and range of every curve. Throws DataError.
  void validate() const;

  std::string version;  ///< provenance note from the table file

 private:
  std::map<TestId, std::vector<std::pair<double, double>>> curves_;
};

/// Minimum admitted percentile implied by "the p_rel-quantile of admits
/// sits at population percentile p_abs", cropped at zero. Requires
/// p_rel < 1 (throws std::invalid_argument).
double implied_cutoff(double p_rel, double p_abs);

/// Outcome of converting raw college records into a market observation.
struct IngestResult {
  MarketObservation observation;
  long total_enrolled = 0;
  std::size_t records_read = 0;
  /// (college name, reason) for every record dropped.
  std::vector<std::pair<std::string, std::string>> exclusions;
  std::string table_version;
};

/// Builds the observation: per college, average the implied cutoffs within
/// each test family, combine the two family means weighted by submission
/// shares, and set demand to enrollment over total enrollment of the
/// retained set. Colleges missing any required datum are excluded and
/// reported. Throws DataError when nothing survives.
IngestResult build_observation(const std::vector<CollegeRecord>& records,
                               const PercentileTable& table);

/// Readers for the documented CSV schemas. Malformed rows raise DataError
/// with the 1-based line number.
std::vector<CollegeRecord> load_college_records(const std::string& path);
PercentileTable load_percentile_table(const std::string& path);

}  // namespace admissions
