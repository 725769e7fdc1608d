#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "topo/manifest.hpp"
#include "topo/scenario.hpp"

#ifndef TOPO_SCENARIO_DIR
#define TOPO_SCENARIO_DIR "scenarios"
#endif

namespace fs = std::filesystem;

namespace {

void write_json(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw topo::ValidationError("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

std::string format_order(const topo::CheckRecord& r) {
  if (!r.observed_order) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *r.observed_order);
  return buf;
}

void print_report(const topo::VerificationReport& rep) {
  std::printf("%s (%s), order %d, %d refinement(s)\n", rep.scenario.c_str(), rep.config.c_str(), rep.order,
              rep.refinements);
  for (const auto& r : rep.records) {
    const char* status = r.error ? "ERROR" : r.passed ? "pass" : "FAIL";
    const double linf = r.levels.empty() ? 0.0 : r.levels.back().linf;
    std::printf("  %-5s %-16s %-11s Linf %-10.3e order %-5s%s\n", status, r.check.c_str(),
                r.gating ? "" : "(diagnostic)", linf, format_order(r).c_str(),
                r.error ? ("  " + *r.error).c_str() : "");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-difference verification of spinor polar-form identities and topological currents"};
  app.require_subcommand(1);

  std::string scenario, report_path, fields_dir;
  std::size_t grid = 0;
  int order = 0, refinements = -1, workers = 1;
  bool timings = false;
  auto* verify = app.add_subcommand("verify", "Run the checks of one scenario");
  verify->add_option("--scenario", scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  verify->add_option("--grid", grid, "Points per axis on the coarsest level (overrides the file)");
  verify->add_option("--order", order, "Finite-difference order")->check(CLI::IsMember({2, 4}));
  verify->add_option("--refinements", refinements, "Number of grid halvings")->check(CLI::Range(0, 3));
  verify->add_option("--report", report_path, "Write the JSON report here");
  verify->add_option("--fields-dir", fields_dir, "Export finest-level residual fields (CSV and binary)");
  verify->add_option("--workers", workers, "Worker threads for point loops")->check(CLI::Range(1, 256));
  verify->add_flag("--timings", timings, "Include wall-clock runtimes in the report");

  std::string manifest_out;
  auto* conv = app.add_subcommand("conventions", "Write the conventions manifest");
  conv->add_option("--out", manifest_out, "Output file")->required();

  std::string dir = TOPO_SCENARIO_DIR;
  auto* list = app.add_subcommand("list-scenarios", "List the built-in scenarios");
  list->add_option("--dir", dir, "Scenario directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*verify) {
      const topo::ScenarioSpec spec = topo::load_scenario(scenario);
      topo::RunOptions opts;
      if (grid) opts.grid = grid;
      if (order) opts.order = order;
      if (refinements >= 0) opts.refinements = refinements;
      if (!fields_dir.empty()) opts.fields_dir = fields_dir;
      opts.exec.workers = workers;
      opts.timings = timings;
      const topo::VerificationReport rep = topo::run_suite(spec, opts);
      print_report(rep);
      if (!report_path.empty()) write_json(topo::report_to_json(rep, timings), report_path);
      return rep.passed() ? 0 : 1;
    }
    if (*conv) {
      write_json(topo::manifest(), manifest_out);
      std::printf("%s\n", topo::manifest_hash().c_str());
      return 0;
    }
    if (*list) {
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".json") files.push_back(e.path());
      std::sort(files.begin(), files.end());
      for (const auto& f : files) {
        const topo::ScenarioSpec spec = topo::load_scenario(f.string());
        std::printf("%-20s %-7s %s\n", spec.name.c_str(), std::string(spec.config.name).c_str(),
                    spec.description.c_str());
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
