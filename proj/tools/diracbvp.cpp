// Command-line front end: diracbvp --job FILE [--out FILE] [--dump-grid FILE]

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "diracbvp/job.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Dirac boundary value problem checks"};
  app.set_version_flag("--version", diracbvp::kVersion);
  std::string job_path, out_path, grid_path;
  unsigned threads = 1;
  long seed = 0;
  bool timing = false;
  app.add_option("--job", job_path, "JSON job file")->required();
  app.add_option("--out", out_path, "write the JSON report here instead of stdout");
  app.add_option("--dump-grid", grid_path, "CSV dump of every (point, covector) node (check-ls)");
  app.add_option("--threads", threads, "parallelism hint")->check(CLI::Range(1u, 1024u));
  auto* seed_opt = app.add_option("--seed", seed, "reserved; recorded in the report");
  app.add_flag("--timing", timing, "add wall-clock time to the report (breaks byte-identical output)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  std::ifstream in(job_path);
  if (!in) {
    std::cerr << "error: cannot open job file " << job_path << "\n";
    return 2;
  }
  std::stringstream text;
  text << in.rdbuf();

  diracbvp::RunOptions ro;
  if (!grid_path.empty()) ro.dump_grid = grid_path;
  ro.threads = threads;
  if (seed_opt->count()) ro.seed = seed;
  ro.base_dir = std::filesystem::path(job_path).parent_path();
  if (ro.base_dir.empty()) ro.base_dir = ".";

  const auto t0 = std::chrono::steady_clock::now();
  auto res = diracbvp::run_job(text.str(), ro, &std::cerr);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (timing) res.report["wall_clock_s"] = secs;

  if (res.exit_code == 2 && res.report.contains("error")) {
    const auto& e = res.report["error"];
    std::cerr << "error";
    if (e["field"].is_string()) std::cerr << " at " << e["field"].get<std::string>();
    std::cerr << ": " << e["message"].get<std::string>() << "\n";
  }
  const std::string dumped = res.report.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << dumped;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out || !(out << dumped)) {
      std::cerr << "error: cannot write report to " << out_path << "\n";
      return 2;
    }
  }
  return res.exit_code;
}
