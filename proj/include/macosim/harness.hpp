#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "macosim/engine.hpp"

namespace macosim {

struct GridSpec {
  int rows = 5;
  int cols = 5;
  double edge_length_m = 200.0;
  int lanes = 3;
  bool signalized_interior = true;
  std::uint64_t seed = 0;
};

// One experiment: a run matrix over algorithm x executor x vehicle count x
// seed on a single network.
struct Scenario {
  std::string network_path;      // exclusive with grid
  std::optional<GridSpec> grid;
  std::vector<Algorithm> algorithms;
  std::vector<std::string> executors{"sequential"};
  std::map<std::string, ControllerKind> controller_overrides;
  std::vector<int> vehicle_counts;
  std::vector<std::uint64_t> seeds;  // explicit, or 1..runs_per_cell
  SimConfig base;                    // param blocks; network filled per run
  std::string output_csv = "results.csv";
};

Scenario load_scenario(const std::string& json_text);
Scenario load_scenario_file(const std::string& path);
RoadNetwork load_scenario_network(const Scenario& scenario);

Algorithm parse_algorithm(const std::string& name);
ControllerKind parse_controller(const std::string& name);
// maco-p pairs with the preemptive controller; the baselines default to
// fixed-time signals.
ControllerKind default_controller(Algorithm a);
ControllerKind controller_for(const Scenario& s, Algorithm a);

struct ResultRow {
  std::string algorithm;
  std::string executor;
  int vehicle_count = 0;
  std::uint64_t seed = 0;
  double mean_travel_s = 0.0;
  double mean_wait_s = 0.0;
  std::int64_t wall_clock_ms = 0;
};

class ResultTable {
 public:
  void add(ResultRow row) { rows_.push_back(std::move(row)); }
  void add_failure(std::string what) { failures_.push_back(std::move(what)); }

  const std::vector<ResultRow>& rows() const { return rows_; }
  const std::vector<std::string>& failures() const { return failures_; }

  // Aggregate view: mean over seeds, keyed by (algorithm, vehicle_count).
  std::optional<double> aggregate_mean_travel(const std::string& algorithm,
                                              int vehicle_count) const;
  std::optional<double> aggregate_mean_wait(const std::string& algorithm,
                                            int vehicle_count) const;

  std::vector<int> vehicle_counts() const;          // ascending, unique
  std::vector<std::string> algorithms() const;      // first-appearance order

 private:
  std::vector<ResultRow> rows_;
  std::vector<std::string> failures_;
};

// Executes every cell of the matrix; per-cell failures are recorded in the
// table, not thrown. Deterministic apart from the wall-clock column.
ResultTable run_matrix(const Scenario& scenario, const RoadNetwork& net,
                       int workers, std::ostream* progress = nullptr);

// percent_reduction between two aggregate cells at one vehicle count.
double summarize(const ResultTable& table, const std::string& baseline,
                 const std::string& target, int vehicle_count);

// Results CSV, columns exactly:
// algorithm,executor,vehicle_count,seed,mean_travel_s,mean_wait_s,wall_clock_ms
void write_results_csv(const ResultTable& table, std::ostream& out);
ResultTable read_results_csv(std::istream& in);
void write_results_csv_file(const ResultTable& table, const std::string& path);
ResultTable read_results_csv_file(const std::string& path);

// Aligned text table (vehicle counts as rows, algorithms as columns; empty
// cells as NA) plus a whitespace-separated data file for plotting ("-" marks
// a missing point so plotting tools can skip it).
void emit_report(const ResultTable& table, std::ostream& text_out,
                 std::ostream& data_out);

}  // namespace macosim
