#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "admissions/discrete.hpp"
#include "admissions/equilibrium.hpp"
#include "admissions/inverse.hpp"
#include "admissions/market.hpp"
#include "admissions/statics.hpp"
#include "admissions/tatonnement.hpp"

namespace admissions {

/// Shortest decimal string that round-trips the double (via to_chars), so
/// rewriting identical results yields identical bytes.
std::string format_double(double x);

/// Splits one CSV record; handles double-quoted fields with embedded commas
/// and doubled quotes. No multi-line fields.
std::vector<std::string> split_csv_line(const std::string& line);

/// Market file: header `school,gamma_or_delta,q`. The middle column holds
/// preferability weights, or their logs when `log_weights` is set.
struct NamedMarket {
  MarketParams params;
  std::vector<std::string> names;
};
NamedMarket load_market(const std::string& path, bool log_weights);
void save_market(std::ostream& out, const NamedMarket& market);

/// Observation file: header `name,cutoff,demand_fraction,demand_count` with
/// an optional trailing `yield` column. demand_count is redundant with the
/// fraction (count = fraction * population) and is carried for readability.
/// When `population` is non-null it receives the sum of the count column
/// (1 when counts are absent).
MarketObservation load_observation(const std::string& path,
                                   double* population = nullptr);
void save_observation(std::ostream& out, const MarketObservation& obs,
                      double population);

/// Long-format writers for figure-reproduction data.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory,
                          const std::vector<std::string>& names);
void write_jacobian_csv(std::ostream& out, const std::string& matrix_name,
                        const Eigen::MatrixXd& m,
                        const std::vector<std::string>& names);
void write_equilibrium_csv(std::ostream& out, const NamedMarket& market,
                           const EquilibriumSolution& solution);
void write_certificate_csv(std::ostream& out,
                           const EquilibriumCertificate& cert);
void write_sample_csv(std::ostream& out, const StudentSample& sample,
                      const MatchingResult& matching);
void write_estimate_csv(std::ostream& out, const MarketObservation& obs,
                        const PreferabilityEstimate& estimate,
                        double population);
void write_curve_csv(std::ostream& out,
                     const std::vector<std::pair<double, double>>& curve,
                     double population);

}  // namespace admissions
