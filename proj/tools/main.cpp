#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sectorcert/certify.hpp"
#include "sectorcert/lure_sim.hpp"
#include "sectorcert/rng.hpp"
#include "sectorcert/serialization.hpp"

namespace {

using namespace sectorcert;

constexpr const char* kVersion = "0.1.0";

constexpr int kExitSuccess = 0;
constexpr int kExitNotCertified = 1;
constexpr int kExitInputError = 2;
constexpr int kExitNumericalError = 3;

struct RunConfig {
  std::string command;
  std::string system_path;
  std::string sector_path;
  std::string nonlinearity_path;
  std::string u1_path;
  std::string u2_path;
  std::string out_path;
  std::string witness_path = "witness.json";
  std::string traj_path;
  int horizon = 64;
  double rho = 1.0;
  double gamma_target = 0.0;
  double rho_lo = 0.5;
  double rho_hi = 1.0;
  double tol = 1e-3;
  int grid = 0;
  int samples = 0;
  std::uint64_t seed = 0;
  int steps = 200;
  std::vector<std::string> x0_entries;
};

struct LoadedInputs {
  std::optional<StateSpace> system;
  std::optional<SectorInput> sector;
  std::optional<Nonlinearity> phi;
  std::optional<Signal> u1;
  std::optional<Signal> u2;
  Json input_meta = Json::object();
};

std::string fnv1a_digest(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a:") + buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json parse_json_file(const std::string& path, std::vector<std::string>& diagnostics) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    diagnostics.push_back(path + ": " + e.what());
  } catch (const Error& e) {
    diagnostics.push_back(e.what());
  }
  return j;
}

/// Loads and checks everything the command needs; returns all violations of
/// file schemas and parameter ranges.  Empty iff the run may proceed.
std::vector<std::string> validate_inputs(const RunConfig& cfg, LoadedInputs& in) {
  std::vector<std::string> diagnostics;
  const bool needs_system = cfg.command != "presets" &&
                            !(cfg.command == "gamma" && cfg.samples == 0);
  const bool needs_sector =
      cfg.command == "certify" || cfg.command == "rate" || cfg.command == "gamma" ||
      cfg.command == "violate";
  const bool needs_phi = cfg.command == "simulate" || cfg.command == "decay";

  if (needs_system) {
    if (cfg.system_path.empty()) {
      diagnostics.push_back(cfg.command + ": --system is required");
    } else {
      const Json j = parse_json_file(cfg.system_path, diagnostics);
      if (!j.is_null()) {
        try {
          in.system = statespace_from_json(j);
          in.input_meta["system"] = {{"path", cfg.system_path},
                                     {"digest", fnv1a_digest(read_file(cfg.system_path))}};
        } catch (const Error& e) {
          diagnostics.push_back(cfg.system_path + ": " + e.what());
        }
      }
    }
  }
  if (needs_sector) {
    if (cfg.sector_path.empty()) {
      diagnostics.push_back(cfg.command + ": --sector is required");
    } else {
      const Json j = parse_json_file(cfg.sector_path, diagnostics);
      if (!j.is_null()) {
        try {
          in.sector = sector_from_json(j);
          in.input_meta["sector"] = {{"path", cfg.sector_path},
                                     {"digest", fnv1a_digest(read_file(cfg.sector_path))}};
        } catch (const Error& e) {
          diagnostics.push_back(cfg.sector_path + ": " + e.what());
        }
      }
    }
  }
  if (needs_phi) {
    if (cfg.nonlinearity_path.empty()) {
      diagnostics.push_back(cfg.command + ": --nonlinearity is required");
    } else {
      const Json j = parse_json_file(cfg.nonlinearity_path, diagnostics);
      if (!j.is_null()) {
        try {
          in.phi = nonlinearity_from_json(j);
          in.input_meta["nonlinearity"] = {
              {"path", cfg.nonlinearity_path},
              {"digest", fnv1a_digest(read_file(cfg.nonlinearity_path))}};
        } catch (const Error& e) {
          diagnostics.push_back(cfg.nonlinearity_path + ": " + e.what());
        }
      }
    }
  }
  for (const auto& [path, slot, name] :
       {std::tuple<const std::string&, std::optional<Signal>&, const char*>{cfg.u1_path, in.u1,
                                                                            "u1"},
        {cfg.u2_path, in.u2, "u2"}}) {
    if (path.empty()) continue;
    try {
      std::istringstream ss(read_file(path));
      slot = signal_from_csv(ss);
      in.input_meta[name] = {{"path", path}, {"digest", fnv1a_digest(read_file(path))}};
    } catch (const Error& e) {
      diagnostics.push_back(path + ": " + e.what());
    }
  }

  if (!(cfg.rho > 0.0) || cfg.rho > 1.0) {
    diagnostics.push_back("--rho must lie in (0, 1], got " + std::to_string(cfg.rho));
  }
  if (cfg.horizon < 0) diagnostics.push_back("--horizon must be >= 0");
  if (cfg.grid < 0) diagnostics.push_back("--grid must be >= 0");
  if (cfg.command == "violate" && !(cfg.gamma_target > 0.0)) {
    diagnostics.push_back("violate: --gamma must be positive");
  }
  if (cfg.command == "rate") {
    if (!(cfg.rho_lo > 0.0) || !(cfg.rho_lo < cfg.rho_hi) || cfg.rho_hi > 1.0) {
      diagnostics.push_back("rate: need 0 < --rho-lo < --rho-hi <= 1");
    }
    if (!(cfg.tol > 0.0)) diagnostics.push_back("rate: --tol must be positive");
  }
  if (cfg.command == "decay") {
    if (cfg.steps < 1) diagnostics.push_back("decay: --steps must be >= 1");
    if (cfg.x0_entries.empty()) diagnostics.push_back("decay: at least one --x0 is required");
  }
  if (cfg.command == "gamma" && in.sector && !in.sector->N) {
    diagnostics.push_back("gamma: sector file must name a preset or give an explicit N");
  }

  // Cross-input dimension checks.
  if (in.system) {
    const bool loop_command = cfg.command == "certify" || cfg.command == "rate" ||
                              cfg.command == "violate" || cfg.command == "simulate" ||
                              cfg.command == "decay" || cfg.command == "gamma";
    if (loop_command && in.system->input_dim() != in.system->output_dim()) {
      diagnostics.push_back("system: G must be square (p = m) for loop analysis");
    }
    if (in.u1 && in.u1->dim() != in.system->input_dim()) {
      diagnostics.push_back("u1: dimension does not match the system input");
    }
    if (in.u2 && in.u2->dim() != in.system->input_dim()) {
      diagnostics.push_back("u2: dimension does not match the system input");
    }
    if (in.phi && in.phi->kind() == Nonlinearity::Kind::pair_relation &&
        in.phi->recorded_e2().dim() != in.system->output_dim()) {
      diagnostics.push_back("nonlinearity: recorded pair dimension does not match G");
    }
  }
  return diagnostics;
}

void write_report(const RunConfig& cfg, const Json& report) {
  const std::string text = dump_json(report);
  if (cfg.out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(cfg.out_path, std::ios::binary);
    if (!out) throw InputError("cannot write report to '" + cfg.out_path + "'");
    out << text;
  }
}

Json report_header(const RunConfig& cfg, const LoadedInputs& in) {
  Json report;
  report["tool"] = "sectorcert";
  report["version"] = kVersion;
  report["command"] = cfg.command;
  report["inputs"] = in.input_meta;
  return report;
}

Json failure_to_json(const HardConditionFailure& failure) {
  Json j;
  j["T_fail"] = failure.T_fail;
  j["quad_value"] = failure.quad_value;
  j["xi"] = signal_to_json(failure.xi);
  return j;
}

int run_presets(const RunConfig& cfg) {
  Json report;
  report["tool"] = "sectorcert";
  report["version"] = kVersion;
  report["command"] = "presets";
  Json rows = Json::array();
  rows.push_back({{"name", "conic"},
                  {"params", {"a", "b", "delta", "Delta"}},
                  {"valid_when", "a < b, and either delta = 0, Delta > 0 or delta > 0, Delta = 0"}});
  rows.push_back({{"name", "extended_conic"},
                  {"params", {"a", "b", "delta", "Delta"}},
                  {"valid_when", "a < b, and either delta = 0, Delta > 0 or delta > 0, Delta = 0"}});
  rows.push_back({{"name", "passivity"},
                  {"params", {"eps1", "delta1", "eps2", "delta2"}},
                  {"valid_when", "delta1 + eps2 > 0 and delta2 + eps1 > 0"}});
  rows.push_back({{"name", "small_gain"},
                  {"params", {"gamma1", "gamma2"}},
                  {"valid_when", "gamma1 gamma2 < 1"}});
  report["presets"] = std::move(rows);
  write_report(cfg, report);
  return kExitSuccess;
}

int run_certify(const RunConfig& cfg, const LoadedInputs& in) {
  const Weight weight(cfg.rho);
  const auto result = certify(*in.system, in.sector->M, cfg.horizon, weight);

  Json report = report_header(cfg, in);
  report["options"] = {{"horizon", cfg.horizon}, {"rho", cfg.rho}, {"grid", cfg.grid}};
  report["sector"] = {{"M", quadspec_to_json(in.sector->M)["matrix"]}};
  Json res;
  res["feasible"] = result.feasible();
  res["degenerate_M"] = result.degenerate_M;
  if (result.certificate) {
    res["certificate"] = certificate_to_json(*result.certificate);
    report["sector"]["N"] = certificate_to_json(*result.certificate)["N"];
    if (cfg.grid > 0) {
      // Informational screen only; the certificate stands on the Toeplitz check.
      Json screen;
      screen["grid"] = cfg.grid;
      try {
        screen["pass"] =
            check_frequency_condition(*in.system, result.certificate->N, cfg.grid, weight);
      } catch (const FrequencyDomainError&) {
        screen["pass"] = nullptr;
        screen["note"] = "rho-scaled system is not Schur stable";
      }
      res["frequency_screen"] = std::move(screen);
    }
  } else if (result.failure) {
    res["failure"] = failure_to_json(*result.failure);
  }
  report["result"] = std::move(res);
  write_report(cfg, report);
  return result.feasible() ? kExitSuccess : kExitNotCertified;
}

int run_rate(const RunConfig& cfg, const LoadedInputs& in) {
  const auto rho_star =
      best_rate(*in.system, in.sector->M, cfg.rho_lo, cfg.rho_hi, cfg.tol, cfg.horizon);

  Json report = report_header(cfg, in);
  report["options"] = {{"horizon", cfg.horizon},
                       {"rho_lo", cfg.rho_lo},
                       {"rho_hi", cfg.rho_hi},
                       {"tol", cfg.tol}};
  report["sector"] = {{"M", quadspec_to_json(in.sector->M)["matrix"]}};
  Json res;
  res["certified"] = rho_star.has_value();
  if (rho_star) {
    res["rho_star"] = *rho_star;
    const auto cert = certify(*in.system, in.sector->M, cfg.horizon, Weight(*rho_star));
    if (cert.certificate) {
      res["certificate"] = certificate_to_json(*cert.certificate);
    }
  }
  report["result"] = std::move(res);
  write_report(cfg, report);
  return rho_star ? kExitSuccess : kExitNotCertified;
}

int run_gamma(const RunConfig& cfg, const LoadedInputs& in) {
  const auto gb = gamma_bound(in.sector->M, *in.sector->N);

  Json report = report_header(cfg, in);
  report["options"] = {{"horizon", cfg.horizon},
                       {"rho", cfg.rho},
                       {"samples", cfg.samples},
                       {"seed", cfg.seed}};
  report["sector"] = {{"M", quadspec_to_json(in.sector->M)["matrix"]},
                      {"N", quadspec_to_json(*in.sector->N)["matrix"]}};
  Json res;
  res["eta"] = gb.eta;
  res["r"] = gb.r;
  res["q"] = gb.q;
  res["gamma"] = gb.gamma;

  if (cfg.samples > 0) {
    // Empirical comparison: random sector gains against random inputs.
    const Weight weight(cfg.rho);
    Rng rng(cfg.seed);
    const int m = in.system->input_dim();
    double worst = 0.0;
    for (int s = 0; s < cfg.samples; ++s) {
      const Nonlinearity phi = random_sector_gain(in.sector->M, cfg.horizon, rng);
      Eigen::MatrixXd u1(m, cfg.horizon + 1), u2(m, cfg.horizon + 1);
      for (int k = 0; k <= cfg.horizon; ++k) {
        for (int i = 0; i < m; ++i) {
          u1(i, k) = rng.normal();
          u2(i, k) = rng.normal();
        }
      }
      worst = std::max(worst, empirical_gain(*in.system, phi,
                                             {{Signal(u1), Signal(u2)}}, cfg.horizon, weight));
    }
    res["empirical"] = {{"max_ratio", worst},
                        {"samples", cfg.samples},
                        {"within_bound", worst <= gb.gamma}};
  }
  report["result"] = std::move(res);
  write_report(cfg, report);
  return kExitSuccess;
}

int run_violate(const RunConfig& cfg, const LoadedInputs& in) {
  const Weight weight(cfg.rho);
  const auto witness =
      find_violation(*in.system, in.sector->M, cfg.gamma_target, cfg.horizon, weight);

  Json report = report_header(cfg, in);
  report["options"] = {{"horizon", cfg.horizon},
                       {"rho", cfg.rho},
                       {"gamma_target", cfg.gamma_target}};
  report["sector"] = {{"M", quadspec_to_json(in.sector->M)["matrix"]}};
  Json res;
  res["violation_found"] = witness.has_value();
  if (witness) {
    res["witness"] = witness_to_json(*witness);
    std::ofstream wout(cfg.witness_path, std::ios::binary);
    if (!wout) throw InputError("cannot write witness to '" + cfg.witness_path + "'");
    wout << dump_json(witness_to_json(*witness));
    res["witness_file"] = cfg.witness_path;
  }
  report["result"] = std::move(res);
  write_report(cfg, report);
  return witness ? kExitNotCertified : kExitSuccess;
}

int run_simulate(const RunConfig& cfg, const LoadedInputs& in) {
  const Weight weight(cfg.rho);
  const int m = in.system->input_dim();
  const Signal u1 = in.u1 ? *in.u1 : Signal::zero(m, cfg.horizon);
  const Signal u2 = in.u2 ? *in.u2 : Signal::zero(m, cfg.horizon);
  if (u1.horizon() < cfg.horizon || u2.horizon() < cfg.horizon) {
    throw InputError("simulate: inputs shorter than --horizon");
  }
  const auto run = interconnect(*in.system, *in.phi, u1, u2, cfg.horizon);

  if (!cfg.traj_path.empty()) {
    std::ofstream tout(cfg.traj_path, std::ios::binary);
    if (!tout) throw InputError("cannot write trajectory to '" + cfg.traj_path + "'");
    trajectory_to_csv(run, tout);
  }

  const SipConfig sip_cfg(cfg.horizon, weight);
  const double nu = seminorm(stack2(u1, u2), sip_cfg);
  const double ny = seminorm(run.y, sip_cfg);

  Json report = report_header(cfg, in);
  report["options"] = {{"horizon", cfg.horizon}, {"rho", cfg.rho}};
  Json res;
  res["seminorm_u"] = nu;
  res["seminorm_y"] = ny;
  if (nu > 0.0) res["ratio"] = ny / nu;
  if (!cfg.traj_path.empty()) res["trajectory_file"] = cfg.traj_path;
  report["result"] = std::move(res);
  write_report(cfg, report);
  return kExitSuccess;
}

int run_decay(const RunConfig& cfg, const LoadedInputs& in) {
  std::vector<Eigen::VectorXd> x0_set;
  for (const auto& entry : cfg.x0_entries) {
    std::vector<double> values;
    std::stringstream ss(entry);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw InputError("decay: non-numeric --x0 component '" + cell + "'");
      }
    }
    Eigen::VectorXd x0(static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) x0(static_cast<Eigen::Index>(i)) = values[i];
    if (x0.size() != in.system->state_dim()) {
      throw InputError("decay: --x0 dimension does not match the system state");
    }
    x0_set.push_back(std::move(x0));
  }

  const auto result =
      verify_exponential_decay(*in.system, *in.phi, Weight(cfg.rho), x0_set, cfg.steps);

  Json report = report_header(cfg, in);
  report["options"] = {{"rho", cfg.rho}, {"steps", cfg.steps}};
  Json res;
  res["c_fit"] = result.c_fit;
  res["pass"] = result.pass;
  report["result"] = std::move(res);
  write_report(cfg, report);
  return result.pass ? kExitSuccess : kExitNotCertified;
}

int run(const RunConfig& cfg, const LoadedInputs& in) {
  if (cfg.command == "presets") return run_presets(cfg);
  if (cfg.command == "certify") return run_certify(cfg, in);
  if (cfg.command == "rate") return run_rate(cfg, in);
  if (cfg.command == "gamma") return run_gamma(cfg, in);
  if (cfg.command == "violate") return run_violate(cfg, in);
  if (cfg.command == "simulate") return run_simulate(cfg, in);
  if (cfg.command == "decay") return run_decay(cfg, in);
  return kExitInputError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-horizon certification and simulation for sector-bounded feedback loops"};
  app.require_subcommand(1);

  RunConfig cfg;

  auto* presets_cmd = app.add_subcommand("presets", "List the sector preset library");
  presets_cmd->add_option("--out", cfg.out_path, "Report path (default: stdout)");

  const auto add_common = [&](CLI::App* cmd, bool with_sector) {
    cmd->add_option("--system", cfg.system_path, "State-space JSON file");
    if (with_sector) cmd->add_option("--sector", cfg.sector_path, "Sector JSON file");
    cmd->add_option("--horizon", cfg.horizon, "Finite horizon T_max");
    cmd->add_option("--rho", cfg.rho, "Exponential weight in (0, 1]");
    cmd->add_option("--out", cfg.out_path, "Report path (default: stdout)");
  };

  auto* certify_cmd = app.add_subcommand("certify", "Search the N(tau) certificate family");
  add_common(certify_cmd, true);
  certify_cmd->add_option("--grid", cfg.grid,
                          "Frequency-screen grid size (0 = skip the screen)");

  auto* rate_cmd = app.add_subcommand("rate", "Bisection for the best certified decay rate");
  add_common(rate_cmd, true);
  rate_cmd->add_option("--rho-lo", cfg.rho_lo, "Lower end of the rate bracket");
  rate_cmd->add_option("--rho-hi", cfg.rho_hi, "Upper end of the rate bracket");
  rate_cmd->add_option("--tol", cfg.tol, "Bisection tolerance on rho");

  auto* gamma_cmd = app.add_subcommand("gamma", "Gain bound of a sector pair");
  add_common(gamma_cmd, true);
  gamma_cmd->add_option("--samples", cfg.samples, "Random empirical-gain samples (0 = skip)");
  gamma_cmd->add_option("--seed", cfg.seed, "Seed for the random suites");

  auto* violate_cmd = app.add_subcommand("violate", "Synthesize a gain-bound counterexample");
  add_common(violate_cmd, true);
  violate_cmd->add_option("--gamma", cfg.gamma_target, "Gain bound to violate");
  violate_cmd->add_option("--witness", cfg.witness_path, "Witness output path");

  auto* sim_cmd = app.add_subcommand("simulate", "Simulate the feedback interconnection");
  add_common(sim_cmd, false);
  sim_cmd->add_option("--nonlinearity", cfg.nonlinearity_path, "Nonlinearity JSON file");
  sim_cmd->add_option("--u1", cfg.u1_path, "Channel-1 input CSV");
  sim_cmd->add_option("--u2", cfg.u2_path, "Channel-2 input CSV");
  sim_cmd->add_option("--traj", cfg.traj_path, "Trajectory CSV output path");

  auto* decay_cmd = app.add_subcommand("decay", "Check exponential state decay at rate rho");
  decay_cmd->add_option("--system", cfg.system_path, "State-space JSON file");
  decay_cmd->add_option("--nonlinearity", cfg.nonlinearity_path, "Nonlinearity JSON file");
  decay_cmd->add_option("--rho", cfg.rho, "Decay rate in (0, 1]");
  decay_cmd->add_option("--steps", cfg.steps, "Number of simulated steps");
  decay_cmd->add_option("--x0", cfg.x0_entries, "Initial state, comma-separated (repeatable)");
  decay_cmd->add_option("--out", cfg.out_path, "Report path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitSuccess : kExitInputError;
  }

  cfg.command = app.get_subcommands().front()->get_name();

  LoadedInputs inputs;
  const auto diagnostics = validate_inputs(cfg, inputs);
  if (!diagnostics.empty()) {
    for (const auto& d : diagnostics) std::cerr << "error: " << d << "\n";
    return kExitInputError;
  }

  try {
    return run(cfg, inputs);
  } catch (const NumericsError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumericalError;
  } catch (const WellPosednessError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumericalError;
  } catch (const SingularityError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumericalError;
  } catch (const FrequencyDomainError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumericalError;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitNumericalError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}
