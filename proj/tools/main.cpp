// Command-line front end: equilibrium solving, iterative dynamics, finite
// simulation, comparative statics, preferability inversion, data ingestion,
// and demand-curve prediction, all emitting plot-ready CSV.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "admissions/demand.hpp"
#include "admissions/discrete.hpp"
#include "admissions/equilibrium.hpp"
#include "admissions/errors.hpp"
#include "admissions/ingest.hpp"
#include "admissions/inverse.hpp"
#include "admissions/io.hpp"
#include "admissions/statics.hpp"
#include "admissions/tatonnement.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::ofstream open_output(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream out(dir / name);
  if (!out) {
    throw admissions::DataError("cannot write " + (dir / name).string());
  }
  return out;
}

struct CommonOpts {
  std::string market_path;
  std::string obs_path;
  std::string out_dir = ".";
  bool log_weights = false;
};

void cmd_solve(const CommonOpts& opts) {
  const auto market = admissions::load_market(opts.market_path, opts.log_weights);
  const auto solution = admissions::solve(market.params);
  const auto cert =
      admissions::verify_equilibrium(market.params, solution.cutoffs.p, 1e-10);

  auto eq_out = open_output(opts.out_dir, "equilibrium.csv");
  admissions::write_equilibrium_csv(eq_out, market, solution);
  auto cert_out = open_output(opts.out_dir, "certificate.csv");
  admissions::write_certificate_csv(cert_out, cert);
}

void cmd_iterate(const CommonOpts& opts, const admissions::TatonnementConfig& base,
                 const std::vector<double>& p0) {
  const auto market = admissions::load_market(opts.market_path, opts.log_weights);
  admissions::TatonnementConfig config = base;
  if (p0.size() == 1) {
    config.p0.assign(market.params.size(), p0.front());
  } else {
    config.p0 = p0;
  }
  const auto trajectory = admissions::simultaneous_tatonnement(market.params, config);

  auto traj_out = open_output(opts.out_dir, "trajectory.csv");
  admissions::write_trajectory_csv(traj_out, trajectory, market.names);
  auto final_out = open_output(opts.out_dir, "final.csv");
  final_out << "school,p_final,converged\n";
  for (std::size_t c = 0; c < market.params.size(); ++c) {
    final_out << market.names[c] << ','
              << admissions::format_double(trajectory.final_p[c]) << ','
              << (trajectory.converged ? 1 : 0) << '\n';
  }
  if (!trajectory.converged) {
    std::cerr << "note: iteration cap reached before the cutoffs settled\n";
  }
}

void cmd_simulate(const CommonOpts& opts, std::uint64_t seed,
                  std::vector<std::size_t> sizes) {
  const auto market = admissions::load_market(opts.market_path, opts.log_weights);
  const auto solution = admissions::solve(market.params);

  auto summary = open_output(opts.out_dir, "summary.csv");
  summary << "n,school,p_star,scaled_capacity,choice_fill,da_student_fill,"
             "da_student_cutoff,da_school_fill,da_school_cutoff,"
             "blocking_student,blocking_school\n";
  for (const std::size_t n : sizes) {
    const auto sample = admissions::sample_students(market.params, n, seed);
    const auto caps = admissions::scaled_capacities(market.params, n);
    const auto choice =
        admissions::decentralized_choice(sample, solution.cutoffs.p);
    const auto students = admissions::student_proposing_da(sample, caps);
    const auto schools = admissions::school_proposing_da(sample, caps);
    const auto blocking_student =
        admissions::count_blocking_pairs(sample, caps, students.assignment);
    const auto blocking_school =
        admissions::count_blocking_pairs(sample, caps, schools.assignment);

    const std::string suffix = "_n" + std::to_string(n) + ".csv";
    auto choice_out = open_output(opts.out_dir, "choice" + suffix);
    admissions::write_sample_csv(choice_out, sample, choice);
    auto student_out = open_output(opts.out_dir, "da_students" + suffix);
    admissions::write_sample_csv(student_out, sample, students);
    auto school_out = open_output(opts.out_dir, "da_schools" + suffix);
    admissions::write_sample_csv(school_out, sample, schools);

    for (std::size_t c = 0; c < market.params.size(); ++c) {
      summary << n << ',' << market.names[c] << ','
              << admissions::format_double(solution.cutoffs.p[c]) << ','
              << caps[c] << ',' << choice.fill_counts[c] << ','
              << students.fill_counts[c] << ','
              << admissions::format_double(students.implied_cutoffs[c]) << ','
              << schools.fill_counts[c] << ','
              << admissions::format_double(schools.implied_cutoffs[c]) << ','
              << blocking_student << ',' << blocking_school << '\n';
    }
  }
}

void cmd_statics(const CommonOpts& opts) {
  const auto market = admissions::load_market(opts.market_path, opts.log_weights);
  const auto solution = admissions::solve(market.params);
  const auto local =
      admissions::unconstrained_jacobians(market.params, solution.cutoffs.p);
  const auto at_eq = admissions::equilibrium_jacobians(market.params);
  if (local.tie_detected) {
    std::cerr << "note: tied cutoffs; local derivatives describe the "
                 "stable-sort piece\n";
  }

  auto out = open_output(opts.out_dir, "jacobians.csv");
  out << "matrix,row_school,col_school,value\n";
  admissions::write_jacobian_csv(out, "demand_by_cutoff",
                                 local.demand_by_cutoff, market.names);
  admissions::write_jacobian_csv(out, "appeal_by_cutoff",
                                 local.appeal_by_cutoff, market.names);
  admissions::write_jacobian_csv(out, "demand_by_weight",
                                 local.demand_by_weight, market.names);
  admissions::write_jacobian_csv(out, "appeal_by_weight",
                                 local.appeal_by_weight, market.names);
  admissions::write_jacobian_csv(out, "eq_cutoff_by_weight",
                                 at_eq.cutoff_by_weight, market.names);
  admissions::write_jacobian_csv(out, "eq_demand_by_weight",
                                 at_eq.demand_by_weight, market.names);
  admissions::write_jacobian_csv(out, "eq_cutoff_by_capacity",
                                 at_eq.cutoff_by_capacity, market.names);
  admissions::write_jacobian_csv(out, "eq_demand_by_capacity",
                                 at_eq.demand_by_capacity, market.names);
}

void cmd_invert(const CommonOpts& opts, double population_flag,
                const std::string& method) {
  double population = 1.0;
  const auto obs = admissions::load_observation(opts.obs_path, &population);
  if (population_flag > 0.0) population = population_flag;

  const auto estimate = method == "recursion"
                            ? admissions::invert_recursion(obs)
                            : admissions::invert_rootfind(obs);
  auto out = open_output(opts.out_dir, "estimates.csv");
  admissions::write_estimate_csv(out, obs, estimate, population);

  json meta;
  meta["method"] = method;
  meta["residual"] = estimate.residual;
  meta["converged"] = estimate.converged;
  meta["ties_perturbed"] = estimate.ties_perturbed;
  meta["population"] = population;
  auto meta_out = open_output(opts.out_dir, "invert_meta.json");
  meta_out << meta.dump(2) << '\n';
  if (!estimate.converged) {
    std::cerr << "note: root finder stopped at residual "
              << estimate.residual << '\n';
  }
}

void cmd_ingest(const CommonOpts& opts, const std::string& data_path,
                const std::string& tables_path) {
  const auto records = admissions::load_college_records(data_path);
  const auto table = admissions::load_percentile_table(tables_path);
  const auto result = admissions::build_observation(records, table);

  auto out = open_output(opts.out_dir, "observation.csv");
  admissions::save_observation(out, result.observation,
                               static_cast<double>(result.total_enrolled));

  json meta;
  meta["records_read"] = result.records_read;
  meta["records_retained"] = result.observation.size();
  meta["total_enrolled"] = result.total_enrolled;
  meta["table_version"] = result.table_version;
  meta["score_interpolation"] = "linear between table rows";
  json excl = json::array();
  for (const auto& [name, reason] : result.exclusions) {
    excl.push_back({{"name", name}, {"reason", reason}});
  }
  meta["exclusions"] = excl;
  auto meta_out = open_output(opts.out_dir, "ingest_meta.json");
  meta_out << meta.dump(2) << '\n';
}

void cmd_curve(const CommonOpts& opts, const std::string& school_name,
               std::size_t grid_points, double target_count,
               double population_flag) {
  double population = 1.0;
  const auto obs = admissions::load_observation(opts.obs_path, &population);
  if (population_flag > 0.0) population = population_flag;

  std::size_t school = obs.size();
  for (std::size_t c = 0; c < obs.size(); ++c) {
    if (obs.labels[c] == school_name) {
      school = c;
      break;
    }
  }
  if (school == obs.size()) {
    throw admissions::DataError("no school named '" + school_name + "'");
  }

  const auto estimate = admissions::invert_rootfind(obs);
  std::vector<double> grid(grid_points);
  for (std::size_t i = 0; i < grid_points; ++i) {
    grid[i] = static_cast<double>(i) / static_cast<double>(grid_points - 1);
  }
  const auto curve =
      admissions::demand_curve(estimate.gamma, obs.cutoffs, school, grid);
  auto out = open_output(opts.out_dir, "curve.csv");
  admissions::write_curve_csv(out, curve, population);

  if (target_count > 0.0) {
    const double target = target_count / population;
    const double recommended =
        admissions::target_cutoff(estimate.gamma, obs.cutoffs, school, target);
    // Chord through the current observation and (1, 0): the fixed-yield rule.
    const double linear =
        1.0 - target / obs.demands[school] * (1.0 - obs.cutoffs[school]);
    auto tgt = open_output(opts.out_dir, "target.csv");
    tgt << "school,target_count,target_fraction,model_cutoff,linear_cutoff\n";
    tgt << school_name << ',' << admissions::format_double(target_count) << ','
        << admissions::format_double(target) << ','
        << admissions::format_double(recommended) << ','
        << admissions::format_double(linear) << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-score admissions market toolkit"};
  app.require_subcommand(1);

  CommonOpts opts;
  admissions::TatonnementConfig tat;
  std::vector<double> p0 = {0.0};
  std::uint64_t seed = 1;
  std::vector<std::size_t> sizes = {20, 200, 2000};
  double population = 0.0;
  double target = 0.0;
  std::size_t grid_points = 201;
  std::string method = "rootfind";
  std::string school_name;
  std::string data_path;
  std::string tables_path;

  auto add_market = [&](CLI::App* cmd) {
    cmd->add_option("--market", opts.market_path, "market CSV file")
        ->required();
    cmd->add_flag("--delta", opts.log_weights,
                  "interpret the weight column as log-preferabilities");
  };
  auto add_out = [&](CLI::App* cmd) {
    cmd->add_option("--out", opts.out_dir, "output directory");
  };

  auto* solve_cmd = app.add_subcommand("solve", "closed-form equilibrium");
  add_market(solve_cmd);
  add_out(solve_cmd);

  auto* iterate_cmd =
      app.add_subcommand("iterate", "simultaneous cutoff adjustment");
  add_market(iterate_cmd);
  add_out(iterate_cmd);
  iterate_cmd->add_option("--alpha", tat.alpha, "step scale");
  iterate_cmd->add_option("--beta", tat.beta, "step decay exponent");
  iterate_cmd->add_option("--epsilon", tat.epsilon, "termination tolerance");
  iterate_cmd->add_option("--max-iters", tat.max_iters, "iteration cap");
  iterate_cmd->add_option("--p0", p0, "initial cutoffs (single value or list)")
      ->delimiter(',');

  auto* simulate_cmd =
      app.add_subcommand("simulate", "finite-sample choice and matching");
  add_market(simulate_cmd);
  add_out(simulate_cmd);
  simulate_cmd->add_option("--seed", seed, "sample seed");
  simulate_cmd->add_option("--n-students", sizes, "roster sizes")
      ->delimiter(',');

  auto* statics_cmd =
      app.add_subcommand("statics", "analytic sensitivity matrices");
  add_market(statics_cmd);
  add_out(statics_cmd);

  auto* invert_cmd =
      app.add_subcommand("invert", "recover preferability weights");
  invert_cmd->add_option("--obs", opts.obs_path, "observation CSV file")
      ->required();
  add_out(invert_cmd);
  invert_cmd->add_option("--population", population,
                         "student count behind the demand fractions");
  invert_cmd->add_option("--method", method, "recursion or rootfind")
      ->check(CLI::IsMember({"recursion", "rootfind"}));

  auto* ingest_cmd =
      app.add_subcommand("ingest", "college statistics to observation");
  ingest_cmd->add_option("--data", data_path, "college records CSV")
      ->required();
  ingest_cmd->add_option("--tables", tables_path, "percentile tables CSV")
      ->required();
  add_out(ingest_cmd);

  auto* curve_cmd =
      app.add_subcommand("curve", "predicted demand curve for one school");
  curve_cmd->add_option("--obs", opts.obs_path, "observation CSV file")
      ->required();
  add_out(curve_cmd);
  curve_cmd->add_option("--school", school_name, "school label")->required();
  curve_cmd->add_option("--grid-points", grid_points, "curve resolution");
  curve_cmd->add_option("--target", target, "target class size in students");
  curve_cmd->add_option("--population", population,
                        "student count behind the demand fractions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (solve_cmd->parsed()) {
      cmd_solve(opts);
    } else if (iterate_cmd->parsed()) {
      cmd_iterate(opts, tat, p0);
    } else if (simulate_cmd->parsed()) {
      cmd_simulate(opts, seed, sizes);
    } else if (statics_cmd->parsed()) {
      cmd_statics(opts);
    } else if (invert_cmd->parsed()) {
      cmd_invert(opts, population, method);
    } else if (ingest_cmd->parsed()) {
      cmd_ingest(opts, data_path, tables_path);
    } else if (curve_cmd->parsed()) {
      cmd_curve(opts, school_name, grid_points, target, population);
    }
  } catch (const admissions::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 4;
  } catch (const admissions::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const std::domain_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
