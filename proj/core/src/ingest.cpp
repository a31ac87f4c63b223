#include "admissions/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "admissions/errors.hpp"
#include "admissions/io.hpp"

namespace admissions {

namespace {

constexpr TestId kSatTests[] = {TestId::kSatReading, TestId::kSatMath,
                                TestId::kSatWriting};

double parse_number(const std::string& field, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double value = std::stod(field, &used);
    if (used != field.size()) throw std::invalid_argument(field);
    return value;
  } catch (const std::exception&) {
    throw DataError("line " + std::to_string(line_no) +
                    ": cannot parse number '" + field + "'");
  }
}

std::optional<double> parse_optional(const std::string& field,
                                     std::size_t line_no) {
  if (field.empty()) return std::nullopt;
  return parse_number(field, line_no);
}

}  // namespace

const char* test_id_name(TestId id) {
  switch (id) {
    case TestId::kSatReading: return "sat_reading";
    case TestId::kSatMath: return "sat_math";
    case TestId::kSatWriting: return "sat_writing";
    case TestId::kActComposite: return "act_composite";
  }
  return "unknown";
}

bool CollegeRecord::complete() const {
  if (name.empty() || enrolled <= 0) return false;
  for (const auto& per_test : scores) {
    for (const auto& cell : per_test) {
      if (!cell) return false;
    }
  }
  return sat_share.has_value() && act_share.has_value();
}

void PercentileTable::add_point(TestId test, double raw_score,
                                double percentile) {
  curves_[test].emplace_back(raw_score, percentile);
}

bool PercentileTable::has(TestId test) const { return curves_.count(test) > 0; }

void PercentileTable::validate() const {
  for (const auto& [test, curve] : curves_) {
    if (curve.size() < 2) {
      throw DataError(std::string("percentile curve for ") +
                      test_id_name(test) + " needs at least two rows");
    }
    for (std::size_t i = 0; i < curve.size(); ++i) {
      if (curve[i].second < 0.0 || curve[i].second > 1.0) {
        throw DataError(std::string("percentile outside [0,1] in ") +
                        test_id_name(test));
      }
      if (i > 0 && (curve[i].first <= curve[i - 1].first ||
                    curve[i].second < curve[i - 1].second)) {
        throw DataError(std::string("percentile curve for ") +
                        test_id_name(test) + " is not monotone");
      }
    }
  }
}

double PercentileTable::population_percentile(TestId test,
                                              double raw_score) const {
  const auto it = curves_.find(test);
  if (it == curves_.end()) {
    throw DataError(std::string("no percentile curve for ") +
                    test_id_name(test));
  }
  const auto& curve = it->second;
  if (raw_score < curve.front().first || raw_score > curve.back().first) {
    throw DataError(std::string(test_id_name(test)) + " score " +
                    std::to_string(raw_score) +
                    " outside the table's published range");
  }
  const auto hi = std::lower_bound(
      curve.begin(), curve.end(), raw_score,
      [](const std::pair<double, double>& row, double x) {
        return row.first < x;
      });
  if (hi->first == raw_score) return hi->second;
  const auto lo = hi - 1;
  const double t = (raw_score - lo->first) / (hi->first - lo->first);
  return lo->second + t * (hi->second - lo->second);
}

double implied_cutoff(double p_rel, double p_abs) {
  if (!(p_rel >= 0.0 && p_rel < 1.0)) {
    throw std::invalid_argument("within-school percentile must lie in [0,1)");
  }
  if (!(p_abs >= 0.0 && p_abs <= 1.0)) {
    throw std::invalid_argument("population percentile must lie in [0,1]");
  }
  return std::max(0.0, 1.0 - (1.0 - p_abs) / (1.0 - p_rel));
}

IngestResult build_observation(const std::vector<CollegeRecord>& records,
                               const PercentileTable& table) {
  table.validate();
  IngestResult result;
  result.records_read = records.size();
  result.table_version = table.version;

  struct Retained {
    const CollegeRecord* record;
    double cutoff;
  };
  std::vector<Retained> retained;

  for (const auto& record : records) {
    if (!record.complete()) {
      result.exclusions.emplace_back(record.name, "missing required field");
      continue;
    }
    if (*record.sat_share < 0.0 || *record.sat_share > 1.0 ||
        *record.act_share < 0.0 || *record.act_share > 1.0) {
      result.exclusions.emplace_back(record.name, "submission share outside [0,1]");
      continue;
    }
    const double share_total = *record.sat_share + *record.act_share;
    if (share_total <= 0.0) {
      result.exclusions.emplace_back(record.name, "no submission shares");
      continue;
    }

    bool dropped = false;
    double sat_sum = 0.0;
    double act_sum = 0.0;
    for (std::size_t t = 0; t < kNumTests && !dropped; ++t) {
      const auto test = static_cast<TestId>(t);
      for (std::size_t r = 0; r < 2 && !dropped; ++r) {
        double cutoff = 0.0;
        try {
          const double p_abs =
              table.population_percentile(test, *record.scores[t][r]);
          cutoff = implied_cutoff(kPercentileRanks[r], p_abs);
        } catch (const DataError& e) {
          result.exclusions.emplace_back(record.name, e.what());
          dropped = true;
          break;
        }
        if (test == TestId::kActComposite) {
          act_sum += cutoff;
        } else {
          sat_sum += cutoff;
        }
      }
    }
    if (dropped) continue;

    const double sat_mean = sat_sum / (2.0 * std::size(kSatTests));
    const double act_mean = act_sum / 2.0;
    const double cutoff =
        (*record.sat_share * sat_mean + *record.act_share * act_mean) /
        share_total;
    if (cutoff >= 1.0) {
      result.exclusions.emplace_back(record.name, "implied cutoff reaches 1");
      continue;
    }
    retained.push_back({&record, cutoff});
  }

  if (retained.empty()) {
    throw DataError("no college records survive ingestion");
  }
  for (const auto& r : retained) result.total_enrolled += r.record->enrolled;

  auto& obs = result.observation;
  for (const auto& r : retained) {
    obs.labels.push_back(r.record->name);
    obs.cutoffs.push_back(r.cutoff);
    obs.demands.push_back(static_cast<double>(r.record->enrolled) /
                          static_cast<double>(result.total_enrolled));
    obs.yields.push_back(r.record->reported_yield);
  }
  obs.validate();
  return result;
}

std::vector<CollegeRecord> load_college_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw DataError(path + " is empty");
  ++line_no;

  static const std::vector<std::string> kColumns = {
      "name",           "enrolled",        "yield",
      "sat_reading_p25", "sat_reading_p75", "sat_math_p25",
      "sat_math_p75",    "sat_writing_p25", "sat_writing_p75",
      "act_composite_p25", "act_composite_p75", "sat_share",
      "act_share"};
  const auto header = split_csv_line(line);
  std::vector<std::size_t> where(kColumns.size());
  for (std::size_t k = 0; k < kColumns.size(); ++k) {
    const auto it = std::find(header.begin(), header.end(), kColumns[k]);
    if (it == header.end()) {
      throw DataError(path + ": header is missing column '" + kColumns[k] + "'");
    }
    where[k] = static_cast<std::size_t>(std::distance(header.begin(), it));
  }

  std::vector<CollegeRecord> records;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " fields, got " +
                      std::to_string(fields.size()));
    }
    CollegeRecord record;
    record.name = fields[where[0]];
    if (!fields[where[1]].empty()) {
      record.enrolled = static_cast<long>(parse_number(fields[where[1]], line_no));
    }
    record.reported_yield = parse_optional(fields[where[2]], line_no);
    for (std::size_t t = 0; t < kNumTests; ++t) {
      for (std::size_t r = 0; r < 2; ++r) {
        record.scores[t][r] =
            parse_optional(fields[where[3 + 2 * t + r]], line_no);
      }
    }
    record.sat_share = parse_optional(fields[where[11]], line_no);
    record.act_share = parse_optional(fields[where[12]], line_no);
    records.push_back(std::move(record));
  }
  return records;
}

PercentileTable load_percentile_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);

  PercentileTable table;
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string kVersionKey = "#version=";
      if (line.rfind(kVersionKey, 0) == 0) {
        table.version = line.substr(kVersionKey.size());
      }
      continue;
    }
    const auto fields = split_csv_line(line);
    if (!saw_header) {
      if (fields != std::vector<std::string>{"test", "raw_score", "percentile"}) {
        throw DataError(path + ": expected header test,raw_score,percentile");
      }
      saw_header = true;
      continue;
    }
    if (fields.size() != 3) {
      throw DataError("line " + std::to_string(line_no) +
                      ": expected 3 fields");
    }
    std::optional<TestId> test;
    for (std::size_t t = 0; t < kNumTests; ++t) {
      if (fields[0] == test_id_name(static_cast<TestId>(t))) {
        test = static_cast<TestId>(t);
      }
    }
    if (!test) {
      throw DataError("line " + std::to_string(line_no) + ": unknown test '" +
                      fields[0] + "'");
    }
    table.add_point(*test, parse_number(fields[1], line_no),
                    parse_number(fields[2], line_no));
  }
  table.validate();
  return table;
}

}  // namespace admissions
