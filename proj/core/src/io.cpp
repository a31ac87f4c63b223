#include "admissions/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "admissions/errors.hpp"
#include "admissions/ingest.hpp"

namespace admissions {

namespace {

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

std::string quote_if_needed(const std::string& field) {
  if (field.find_first_of(",\"") == std::string::npos) return field;
  std::string quoted = "\"";
  for (char ch : field) {
    quoted += ch;
    if (ch == '"') quoted += '"';
  }
  quoted += '"';
  return quoted;
}

}  // namespace

std::string format_double(double x) {
  std::array<char, 32> buffer{};
  const auto [end, ec] =
      std::to_chars(buffer.data(), buffer.data() + buffer.size(), x);
  if (ec != std::errc{}) throw NumericError("cannot format double");
  return std::string(buffer.data(), end);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current += ch;
      }
    } else if (ch == '"' && current.empty()) {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else if (ch != '\r') {
      current += ch;
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

NamedMarket load_market(const std::string& path, bool log_weights) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw DataError(path + " is empty");
  ++line_no;
  if (split_csv_line(line) !=
      std::vector<std::string>{"school", "gamma_or_delta", "q"}) {
    throw DataError(path + ": expected header school,gamma_or_delta,q");
  }

  NamedMarket market;
  std::vector<double> weights;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 3) {
      throw DataError("line " + std::to_string(line_no) +
                      ": expected 3 fields");
    }
    market.names.push_back(fields[0]);
    weights.push_back(parse_number(fields[1], line_no));
    market.params.capacity.push_back(parse_number(fields[2], line_no));
  }
  if (log_weights) {
    for (double& w : weights) w = std::exp(w);
  }
  market.params.gamma = std::move(weights);
  try {
    market.params.validate();
  } catch (const std::invalid_argument& e) {
    throw DataError(path + ": " + e.what());
  }
  return market;
}

void save_market(std::ostream& out, const NamedMarket& market) {
  out << "school,gamma_or_delta,q\n";
  for (std::size_t c = 0; c < market.params.size(); ++c) {
    out << quote_if_needed(market.names[c]) << ','
        << format_double(market.params.gamma[c]) << ','
        << format_double(market.params.capacity[c]) << '\n';
  }
}

MarketObservation load_observation(const std::string& path,
                                    double* population) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw DataError(path + " is empty");
  ++line_no;
  const auto header = split_csv_line(line);
  const std::vector<std::string> base = {"name", "cutoff", "demand_fraction",
                                         "demand_count"};
  const bool with_yield = header.size() == 5 && header[4] == "yield";
  if (!(header.size() >= base.size() &&
        std::equal(base.begin(), base.end(), header.begin()) &&
        (header.size() == 4 || with_yield))) {
    throw DataError(path +
                    ": expected header name,cutoff,demand_fraction,"
                    "demand_count[,yield]");
  }

  MarketObservation obs;
  double total_count = 0.0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " fields");
    }
    obs.labels.push_back(fields[0]);
    obs.cutoffs.push_back(parse_number(fields[1], line_no));
    obs.demands.push_back(parse_number(fields[2], line_no));
    if (!fields[3].empty()) total_count += parse_number(fields[3], line_no);
    if (with_yield && !fields[4].empty()) {
      obs.yields.push_back(parse_number(fields[4], line_no));
    } else {
      obs.yields.push_back(std::nullopt);
    }
  }
  obs.validate();
  if (population != nullptr) {
    *population = total_count > 0.0 ? total_count : 1.0;
  }
  return obs;
}

void save_observation(std::ostream& out, const MarketObservation& obs,
                      double population) {
  out << "name,cutoff,demand_fraction,demand_count,yield\n";
  for (std::size_t c = 0; c < obs.size(); ++c) {
    out << quote_if_needed(obs.labels[c]) << ','
        << format_double(obs.cutoffs[c]) << ','
        << format_double(obs.demands[c]) << ','
        << format_double(obs.demands[c] * population) << ',';
    if (c < obs.yields.size() && obs.yields[c]) {
      out << format_double(*obs.yields[c]);
    }
    out << '\n';
  }
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory,
                          const std::vector<std::string>& names) {
  out << "iter,school_id,p,Z\n";
  for (const auto& point : trajectory.iterates) {
    for (std::size_t c = 0; c < point.p.size(); ++c) {
      out << point.iter << ',' << quote_if_needed(names[c]) << ','
          << format_double(point.p[c]) << ',' << format_double(point.excess[c])
          << '\n';
    }
  }
}

void write_jacobian_csv(std::ostream& out, const std::string& matrix_name,
                        const Eigen::MatrixXd& m,
                        const std::vector<std::string>& names) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      out << matrix_name << ','
          << quote_if_needed(names[static_cast<std::size_t>(r)]) << ','
          << quote_if_needed(names[static_cast<std::size_t>(c)]) << ','
          << format_double(m(r, c)) << '\n';
    }
  }
}

void write_equilibrium_csv(std::ostream& out, const NamedMarket& market,
                           const EquilibriumSolution& solution) {
  out << "school,gamma,q,ratio,p_star,D_star\n";
  for (std::size_t c = 0; c < market.params.size(); ++c) {
    out << quote_if_needed(market.names[c]) << ','
        << format_double(market.params.gamma[c]) << ','
        << format_double(market.params.capacity[c]) << ','
        << format_double(market.params.gamma[c] / market.params.capacity[c])
        << ',' << format_double(solution.cutoffs.p[c]) << ','
        << format_double(solution.demand_at_solution.enrollment[c]) << '\n';
  }
}

void write_certificate_csv(std::ostream& out,
                           const EquilibriumCertificate& cert) {
  out << "max_capacity_violation,max_stability_violation,ncp_residual,"
         "clearing_gap\n";
  out << format_double(cert.max_capacity_violation) << ','
      << format_double(cert.max_stability_violation) << ','
      << format_double(cert.ncp_residual) << ','
      << format_double(cert.clearing_gap) << '\n';
}

void write_sample_csv(std::ostream& out, const StudentSample& sample,
                      const MatchingResult& matching) {
  out << "student_id,score,pref_list,assigned_school\n";
  for (std::size_t s = 0; s < sample.n_students(); ++s) {
    out << s << ',' << format_double(sample.scores[s]) << ',';
    for (std::size_t r = 0; r < sample.pref_lists[s].size(); ++r) {
      if (r > 0) out << '|';
      out << sample.pref_lists[s][r];
    }
    out << ',';
    if (matching.assignment[s] == kUnassigned) {
      out << "none";
    } else {
      out << matching.assignment[s];
    }
    out << '\n';
  }
}

void write_estimate_csv(std::ostream& out, const MarketObservation& obs,
                        const PreferabilityEstimate& estimate,
                        double population) {
  std::vector<std::size_t> by_gamma(obs.size());
  for (std::size_t c = 0; c < obs.size(); ++c) by_gamma[c] = c;
  std::stable_sort(by_gamma.begin(), by_gamma.end(),
                   [&](std::size_t a, std::size_t b) {
                     return estimate.gamma[a] > estimate.gamma[b];
                   });

  out << "rank,name,demand_count,cutoff,yield,true_yield,gamma\n";
  for (std::size_t rank = 0; rank < by_gamma.size(); ++rank) {
    const std::size_t c = by_gamma[rank];
    out << (rank + 1) << ',' << quote_if_needed(obs.labels[c]) << ','
        << format_double(obs.demands[c] * population) << ','
        << format_double(obs.cutoffs[c]) << ',';
    if (c < obs.yields.size() && obs.yields[c]) {
      out << format_double(*obs.yields[c]);
    }
    out << ',' << format_double(estimate.true_yield[c]) << ','
        << format_double(estimate.gamma[c]) << '\n';
  }
}

void write_curve_csv(std::ostream& out,
                     const std::vector<std::pair<double, double>>& curve,
                     double population) {
  out << "p,demand_fraction,demand_count\n";
  for (const auto& [p, d] : curve) {
    out << format_double(p) << ',' << format_double(d) << ','
        << format_double(d * population) << '\n';
  }
}

}  // namespace admissions
