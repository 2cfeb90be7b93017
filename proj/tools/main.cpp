#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "macosim/harness.hpp"
#include "macosim/parallel.hpp"

namespace fs = std::filesystem;
using namespace macosim;

namespace {

void write_reports(const ResultTable& table, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  std::ofstream text(out_dir / "report.txt");
  std::ofstream data(out_dir / "report.dat");
  if (!text || !data)
    throw ValidationError("cannot write report files under " + out_dir.string());
  emit_report(table, text, data);
}

int cmd_run(const std::string& scenario_path, int workers,
            const std::string& out_dir) {
  Scenario scenario = load_scenario_file(scenario_path);
  // Relative network paths resolve against the scenario file.
  if (!scenario.network_path.empty() &&
      fs::path(scenario.network_path).is_relative()) {
    scenario.network_path =
        (fs::path(scenario_path).parent_path() / scenario.network_path).string();
  }
  RoadNetwork net = load_scenario_network(scenario);
  std::cout << "network: " << net.node_count() << " nodes, " << net.edge_count()
            << " edges\n";

  ResultTable table = run_matrix(scenario, net, workers, &std::cout);
  for (const std::string& f : table.failures())
    std::cerr << "cell failed: " << f << "\n";

  fs::path dir(out_dir);
  fs::create_directories(dir);
  fs::path csv_path = dir / scenario.output_csv;
  write_results_csv_file(table, csv_path.string());
  write_reports(table, dir);

  std::cout << "\n";
  std::ofstream devnull("/dev/null");
  emit_report(table, std::cout, devnull);
  std::cout << "\nwrote " << csv_path.string() << "\n";
  return table.failures().empty() ? 0 : 2;
}

int cmd_summarize(const std::string& results_path, const std::string& baseline,
                  const std::string& target, int count) {
  ResultTable table = read_results_csv_file(results_path);
  double pct = summarize(table, baseline, target, count);
  std::cout.setf(std::ios::fixed);
  std::cout.precision(2);
  std::cout << pct << "\n";
  return 0;
}

int cmd_gen_network(const std::string& preset, int rows, int cols,
                    double edge_length, int lanes, bool signalized_interior,
                    std::uint64_t seed, const std::string& out_path) {
  RoadNetwork net = [&] {
    if (!preset.empty()) {
      if (preset != "delhi52")
        throw ValidationError("unknown preset \"" + preset + "\"");
      return generate_city(52, 64, 3, kCitySeed);
    }
    return generate_grid(rows, cols, edge_length, lanes, signalized_interior,
                         seed);
  }();
  write_network_file(net, out_path);
  int signal_count = 0;
  for (const RoadNode& n : net.nodes()) signal_count += n.signalized ? 1 : 0;
  std::cout << "wrote " << out_path << " (" << net.node_count() << " nodes, "
            << net.edge_count() << " edges, " << signal_count << " signalized)\n";
  return 0;
}

int cmd_import(const std::string& csv_path, const std::string& out_dir) {
  ResultTable table = read_results_csv_file(csv_path);
  write_reports(table, out_dir);
  std::ofstream devnull("/dev/null");
  emit_report(table, std::cout, devnull);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"macosim: congestion-avoiding routing and preemptive signal "
               "traffic simulator"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir = ".";
  int workers = 0;
  auto* run_cmd = app.add_subcommand("run", "execute a scenario run matrix");
  run_cmd->add_option("--scenario", scenario_path, "scenario JSON file")
      ->required();
  run_cmd->add_option("--workers", workers,
                      "parallel executor workers (0 = hardware threads)");
  run_cmd->add_option("--out", out_dir, "output directory");

  std::string results_path, baseline, target;
  int count = 0;
  auto* sum_cmd = app.add_subcommand("summarize",
                                     "percent travel-time reduction between "
                                     "two algorithms at one vehicle count");
  sum_cmd->add_option("--results", results_path, "results CSV")->required();
  sum_cmd->add_option("--baseline", baseline, "baseline algorithm")->required();
  sum_cmd->add_option("--target", target, "target algorithm")->required();
  sum_cmd->add_option("--count", count, "vehicle count")->required();

  std::string preset, net_out = "network.json";
  int rows = 5, cols = 5, lanes = 3;
  double edge_length = 200.0;
  bool signalized_interior = false;
  std::uint64_t gen_seed = 0;
  auto* gen_cmd = app.add_subcommand("gen-network", "write a synthetic network");
  gen_cmd->add_option("--preset", preset, "named network (delhi52)");
  gen_cmd->add_option("--rows", rows, "grid rows");
  gen_cmd->add_option("--cols", cols, "grid cols");
  gen_cmd->add_option("--edge-length", edge_length, "grid edge length (m)");
  gen_cmd->add_option("--lanes", lanes, "lanes per edge");
  gen_cmd->add_flag("--signalized-interior", signalized_interior,
                    "signalize interior grid nodes");
  gen_cmd->add_option("--seed", gen_seed, "generator seed");
  gen_cmd->add_option("--out", net_out, "output path")->required();

  std::string import_csv, import_out = ".";
  auto* imp_cmd = app.add_subcommand(
      "import-results", "load an external results CSV and emit its report");
  imp_cmd->add_option("--csv", import_csv, "results CSV to import")->required();
  imp_cmd->add_option("--out", import_out, "output directory");

  try {
    app.parse(argc, argv);
    if (run_cmd->parsed()) return cmd_run(scenario_path, workers, out_dir);
    if (sum_cmd->parsed())
      return cmd_summarize(results_path, baseline, target, count);
    if (gen_cmd->parsed())
      return cmd_gen_network(preset, rows, cols, edge_length, lanes,
                             signalized_interior, gen_seed, net_out);
    if (imp_cmd->parsed()) return cmd_import(import_csv, import_out);
    return 1;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
