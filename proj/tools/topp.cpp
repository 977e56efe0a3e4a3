// topp: command-line front end.
#include "topp/oracle.hpp"
#include "topp/pipeline.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kInputError = 4;

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw topp::InputError("cannot write '" + path.string() + "'");
  out << text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw topp::InputError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_summary(const topp::TrajectoryOutput& out) {
  std::cout << "scenario: " << out.scenario << "\nstatus: " << topp::to_string(out.status) << "\nK: " << out.grid.K
            << "\nfree scalars: " << out.free_scalars << "\niterations: " << out.iterations << "\nsolve time: "
            << out.solve_seconds << " s\n";
  if (out.status == topp::RunStatus::Optimal) {
    std::cout << "T: " << out.time.T << " s\n";
  } else if (!out.message.empty()) {
    std::cout << "reason: " << out.message << "\n";
  }
}

int solve_command(const std::string& scenario_path, int grid, const std::string& out_dir, bool dump, double tol) {
  const topp::Scenario sc = topp::load_scenario(scenario_path);
  topp::RunSettings settings;
  settings.grid = grid;
  if (tol > 0.0) {
    settings.solver.tol_feas = tol;
    settings.solver.tol_gap = tol;
  }
  if (!out_dir.empty()) fs::create_directories(out_dir);
  if (dump) {
    const topp::ConicProgram program = topp::assemble(sc, topp::build_grid(grid > 0 ? grid : sc.grid));
    const fs::path target = fs::path(out_dir.empty() ? "." : out_dir) / (sc.name + ".program.json");
    write_file(target, program.dump());
    std::cout << "program: " << target.string() << "\n";
  }
  const topp::TrajectoryOutput out = topp::run(sc, settings);
  print_summary(out);
  if (!out_dir.empty()) {
    write_file(fs::path(out_dir) / (sc.name + ".json"), topp::trajectory_json(out));
    if (out.status == topp::RunStatus::Optimal) write_file(fs::path(out_dir) / (sc.name + ".csv"), topp::trajectory_csv(out));
  }
  return topp::exit_code(out.status);
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw topp::InputError("--values: '" + item + "' is not a number");
    }
  }
  if (values.empty()) throw topp::InputError("--values: no values given");
  return values;
}

unsigned sweep_threads(std::size_t jobs) {
  unsigned cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("TOPP_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) cap = static_cast<unsigned>(v);
  }
  return static_cast<unsigned>(std::min<std::size_t>(cap, jobs));
}

// Every --param path receives the same value, so coupled parameters (both
// edges of a pivot, say) can be swept together.
int sweep_command(const std::string& scenario_path, const std::vector<std::string>& params, const std::string& values_text,
                  int grid, const std::string& out_dir) {
  const std::vector<double> values = parse_values(values_text);
  std::vector<topp::Scenario> scenarios;
  for (double v : values) {
    std::vector<topp::ParamOverride> overrides;
    for (const auto& p : params) overrides.push_back({p, v});
    scenarios.push_back(topp::load_scenario(scenario_path, overrides));
  }
  std::string param;
  for (const auto& p : params) param += (param.empty() ? "" : "+") + p;

  std::vector<topp::TrajectoryOutput> results(values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      topp::RunSettings settings;
      settings.grid = grid;
      results[i] = topp::run(scenarios[i], settings);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < sweep_threads(values.size()); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  json report = json::array();
  std::cout << param << ",status,T,iterations\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto& r = results[i];
    const bool ok = r.status == topp::RunStatus::Optimal;
    std::cout << values[i] << ',' << topp::to_string(r.status) << ',' << (ok ? std::to_string(r.time.T) : "") << ','
              << r.iterations << "\n";
    report.push_back({{"value", values[i]}, {"status", topp::to_string(r.status)}, {"T", ok ? json(r.time.T) : json(nullptr)},
                      {"iterations", r.iterations}});
  }
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "sweep.json", json({{"params", params}, {"runs", report}}).dump(1));
  }
  return 0;
}

int verify_command(const std::string& scenario_path, const std::string& output_path) {
  const topp::Scenario sc = topp::load_scenario(scenario_path);
  const topp::StoredSolution stored = topp::parse_trajectory_json(read_file(output_path));
  const topp::FdLedger fd = topp::fd_suite(sc);
  json j;
  j["fd_suite"] = json::parse(fd.to_json());
  bool ok = fd.pass();
  if (stored.status == "Optimal") {
    const topp::AuditReport report = topp::audit(sc, stored.grid, stored.solution);
    j["audit"] = json::parse(report.to_json());
    ok = ok && report.pass();
  } else {
    j["audit"] = nullptr;
  }
  j["pass"] = ok;
  std::cout << j.dump(1) << "\n";
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-optimal path parameterization with contact constraints"};
  app.require_subcommand(1);

  std::string scenario, out_dir, values, output;
  std::vector<std::string> params;
  int grid = 0;
  bool dump = false;
  double tol = 0.0;

  CLI::App* solve = app.add_subcommand("solve", "Solve one scenario");
  solve->add_option("scenario", scenario, "Scenario JSON file")->required();
  solve->add_option("--grid", grid, "Number of grid intervals K")->check(CLI::PositiveNumber);
  solve->add_option("--out", out_dir, "Output directory for JSON and CSV");
  solve->add_flag("--dump-program", dump, "Write the assembled conic program");
  solve->add_option("--tol", tol, "Solver feasibility and gap tolerance");

  CLI::App* sweep = app.add_subcommand("sweep", "Solve a scenario over a parameter sweep");
  sweep->add_option("scenario", scenario, "Scenario JSON file")->required();
  sweep->add_option("--param", params, "Dotted path of the parameter, e.g. objects.0.mass (repeatable)")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required();
  sweep->add_option("--grid", grid, "Number of grid intervals K")->check(CLI::PositiveNumber);
  sweep->add_option("--out", out_dir, "Output directory for sweep.json");

  CLI::App* verify = app.add_subcommand("verify", "Audit a solution and run the finite-difference checks");
  verify->add_option("scenario", scenario, "Scenario JSON file")->required();
  verify->add_option("output", output, "Trajectory JSON written by solve")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  try {
    if (*solve) return solve_command(scenario, grid, out_dir, dump, tol);
    if (*sweep) return sweep_command(scenario, params, values, grid, out_dir);
    if (*verify) return verify_command(scenario, output);
  } catch (const topp::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return kInputError;
}
