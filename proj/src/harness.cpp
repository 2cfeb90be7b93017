#include "macosim/harness.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "macosim/parallel.hpp"

namespace macosim {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ValidationError(msg); }

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) known = true;
    if (!known) fail("scenario: unknown key \"" + path + "." + it.key() + "\"");
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  return obj[key].get<T>();
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) fail("cannot format double");
  return {buf, end};
}

}  // namespace

Algorithm parse_algorithm(const std::string& name) {
  if (name == "dijkstra") return Algorithm::Dijkstra;
  if (name == "aco") return Algorithm::Aco;
  if (name == "maco") return Algorithm::Maco;
  if (name == "maco-p") return Algorithm::MacoP;
  fail("unknown algorithm \"" + name +
       "\" (expected dijkstra, aco, maco or maco-p)");
}

ControllerKind parse_controller(const std::string& name) {
  if (name == "fixed") return ControllerKind::Fixed;
  if (name == "adaptive") return ControllerKind::Adaptive;
  if (name == "preemptive") return ControllerKind::Preemptive;
  fail("unknown controller \"" + name +
       "\" (expected fixed, adaptive or preemptive)");
}

ControllerKind default_controller(Algorithm a) {
  return a == Algorithm::MacoP ? ControllerKind::Preemptive
                               : ControllerKind::Fixed;
}

ControllerKind controller_for(const Scenario& s, Algorithm a) {
  auto it = s.controller_overrides.find(algorithm_name(a));
  if (it != s.controller_overrides.end()) return it->second;
  return default_controller(a);
}

Scenario load_scenario(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(std::string("scenario parse error: ") + e.what());
  }
  if (!doc.is_object()) fail("scenario must be a JSON object");
  check_keys(doc,
             {"network", "algorithms", "executors", "controllers",
              "vehicle_counts", "seeds", "runs_per_cell", "engine", "pheromone",
              "signal", "routing", "output"},
             "");

  Scenario s;

  if (!doc.contains("network")) fail("scenario: missing \"network\"");
  const json& jnet = doc["network"];
  check_keys(jnet, {"path", "grid"}, "network");
  if (jnet.contains("path") == jnet.contains("grid"))
    fail("scenario: network needs exactly one of \"path\" or \"grid\"");
  if (jnet.contains("path")) {
    s.network_path = jnet["path"].get<std::string>();
  } else {
    const json& jg = jnet["grid"];
    check_keys(jg,
               {"rows", "cols", "edge_length_m", "lanes", "signalized_interior",
                "seed"},
               "network.grid");
    GridSpec g;
    g.rows = get_or(jg, "rows", g.rows);
    g.cols = get_or(jg, "cols", g.cols);
    g.edge_length_m = get_or(jg, "edge_length_m", g.edge_length_m);
    g.lanes = get_or(jg, "lanes", g.lanes);
    g.signalized_interior = get_or(jg, "signalized_interior", g.signalized_interior);
    g.seed = get_or<std::uint64_t>(jg, "seed", g.seed);
    s.grid = g;
  }

  if (!doc.contains("algorithms") || doc["algorithms"].empty())
    fail("scenario: \"algorithms\" must be a non-empty list");
  for (const json& ja : doc["algorithms"])
    s.algorithms.push_back(parse_algorithm(ja.get<std::string>()));

  if (doc.contains("executors")) {
    s.executors.clear();
    for (const json& je : doc["executors"]) {
      std::string e = je.get<std::string>();
      if (e != "sequential" && e != "parallel")
        fail("scenario: executor must be \"sequential\" or \"parallel\"");
      s.executors.push_back(e);
    }
    if (s.executors.empty()) fail("scenario: \"executors\" must be non-empty");
  }

  if (doc.contains("controllers")) {
    for (auto it = doc["controllers"].begin(); it != doc["controllers"].end(); ++it) {
      parse_algorithm(it.key());  // validates the key
      s.controller_overrides[it.key()] = parse_controller(it->get<std::string>());
    }
  }

  if (!doc.contains("vehicle_counts") || doc["vehicle_counts"].empty())
    fail("scenario: \"vehicle_counts\" must be a non-empty list");
  for (const json& jc : doc["vehicle_counts"]) {
    int c = jc.get<int>();
    if (c < 1) fail("scenario: vehicle_counts entries must be >= 1");
    s.vehicle_counts.push_back(c);
  }

  if (doc.contains("seeds")) {
    for (const json& js : doc["seeds"])
      s.seeds.push_back(js.get<std::uint64_t>());
    if (s.seeds.empty()) fail("scenario: \"seeds\" must be non-empty when given");
  } else {
    int runs = get_or(doc, "runs_per_cell", 20);
    if (runs < 1) fail("scenario: runs_per_cell must be >= 1");
    for (int i = 1; i <= runs; ++i) s.seeds.push_back(i);
  }

  if (doc.contains("engine")) {
    const json& je = doc["engine"];
    check_keys(je,
               {"dt_s", "max_steps", "decision_latency_s", "speed_min_mps",
                "speed_max_mps", "spawn", "od"},
               "engine");
    s.base.dt_s = get_or(je, "dt_s", s.base.dt_s);
    s.base.max_steps = get_or<std::int64_t>(je, "max_steps", s.base.max_steps);
    s.base.decision_latency_s =
        get_or(je, "decision_latency_s", s.base.decision_latency_s);
    s.base.speed_min_mps = get_or(je, "speed_min_mps", s.base.speed_min_mps);
    s.base.speed_max_mps = get_or(je, "speed_max_mps", s.base.speed_max_mps);
    if (je.contains("spawn")) {
      const json& js = je["spawn"];
      check_keys(js, {"mode", "window_steps"}, "engine.spawn");
      std::string mode = get_or<std::string>(js, "mode", "all_at_start");
      if (mode == "all_at_start") {
        s.base.spawn = SpawnMode::AllAtStart;
      } else if (mode == "uniform") {
        s.base.spawn = SpawnMode::UniformWindow;
        s.base.spawn_window_steps = get_or(js, "window_steps", 60);
      } else {
        fail("scenario: engine.spawn.mode must be \"all_at_start\" or \"uniform\"");
      }
    }
    if (je.contains("od")) {
      const json& jo = je["od"];
      check_keys(jo, {"pattern", "bias", "a", "b"}, "engine.od");
      std::string pattern = get_or<std::string>(jo, "pattern", "uniform");
      if (pattern == "uniform") {
        s.base.od.pattern = OdPattern::UniformPairs;
      } else if (pattern == "blocks") {
        s.base.od.pattern = OdPattern::Blocks;
        s.base.od.bias = get_or(jo, "bias", s.base.od.bias);
        for (const json& jn : jo.value("a", json::array()))
          s.base.od.block_a.push_back(jn.get<NodeId>());
        for (const json& jn : jo.value("b", json::array()))
          s.base.od.block_b.push_back(jn.get<NodeId>());
      } else {
        fail("scenario: engine.od.pattern must be \"uniform\" or \"blocks\"");
      }
    }
  }

  if (doc.contains("pheromone")) {
    const json& jp = doc["pheromone"];
    check_keys(jp,
               {"tau_init_lo", "tau_init_hi", "delta_inc", "delta_dec", "rho",
                "tau_min", "tau_max", "aco_deposit_q", "decrement_siblings_only"},
               "pheromone");
    PheromoneParams& p = s.base.pheromone;
    p.tau_init_lo = get_or(jp, "tau_init_lo", p.tau_init_lo);
    p.tau_init_hi = get_or(jp, "tau_init_hi", p.tau_init_hi);
    p.delta_inc = get_or(jp, "delta_inc", p.delta_inc);
    p.delta_dec = get_or(jp, "delta_dec", p.delta_dec);
    p.rho = get_or(jp, "rho", p.rho);
    p.tau_min = get_or(jp, "tau_min", p.tau_min);
    p.tau_max = get_or(jp, "tau_max", p.tau_max);
    p.aco_deposit_q = get_or(jp, "aco_deposit_q", p.aco_deposit_q);
    p.decrement_siblings_only =
        get_or(jp, "decrement_siblings_only", p.decrement_siblings_only);
  }

  if (doc.contains("signal")) {
    const json& jsig = doc["signal"];
    check_keys(jsig,
               {"th_max", "t_max", "green_duration_s", "saturation_flow",
                "fixed_cycle_order"},
               "signal");
    SignalParams& p = s.base.signal;
    p.th_max = get_or(jsig, "th_max", p.th_max);
    p.t_max = get_or(jsig, "t_max", p.t_max);
    p.green_duration_s = get_or(jsig, "green_duration_s", p.green_duration_s);
    p.saturation_flow = get_or(jsig, "saturation_flow", p.saturation_flow);
    if (jsig.contains("fixed_cycle_order")) {
      const json& jo = jsig["fixed_cycle_order"];
      if (jo.size() != kPhaseCount)
        fail("scenario: signal.fixed_cycle_order needs 8 entries");
      for (int i = 0; i < kPhaseCount; ++i)
        p.fixed_cycle_order[i] = jo[i].get<int>();
    }
  }

  if (doc.contains("routing")) {
    const json& jr = doc["routing"];
    check_keys(jr,
               {"deviation_threshold", "deviation_mode", "progress_filter",
                "aco_alpha", "aco_beta"},
               "routing");
    RoutingParams& p = s.base.routing;
    p.deviation_threshold =
        get_or<std::int64_t>(jr, "deviation_threshold", p.deviation_threshold);
    if (jr.contains("deviation_mode")) {
      std::string m = jr["deviation_mode"].get<std::string>();
      if (m == "global")
        p.deviation_mode = DeviationMode::Global;
      else if (m == "edge-occupancy")
        p.deviation_mode = DeviationMode::EdgeOccupancy;
      else
        fail("scenario: routing.deviation_mode must be \"global\" or "
             "\"edge-occupancy\"");
    }
    p.progress_filter = get_or(jr, "progress_filter", p.progress_filter);
    p.aco_alpha = get_or(jr, "aco_alpha", p.aco_alpha);
    p.aco_beta = get_or(jr, "aco_beta", p.aco_beta);
  }

  s.output_csv = get_or<std::string>(doc, "output", s.output_csv);
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open scenario file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_scenario(ss.str());
}

RoadNetwork load_scenario_network(const Scenario& scenario) {
  if (scenario.grid) {
    const GridSpec& g = *scenario.grid;
    return generate_grid(g.rows, g.cols, g.edge_length_m, g.lanes,
                         g.signalized_interior, g.seed);
  }
  return load_network_file(scenario.network_path);
}

std::optional<double> ResultTable::aggregate_mean_travel(
    const std::string& algorithm, int vehicle_count) const {
  double sum = 0.0;
  int n = 0;
  for (const ResultRow& r : rows_) {
    if (r.algorithm == algorithm && r.vehicle_count == vehicle_count) {
      sum += r.mean_travel_s;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

std::optional<double> ResultTable::aggregate_mean_wait(
    const std::string& algorithm, int vehicle_count) const {
  double sum = 0.0;
  int n = 0;
  for (const ResultRow& r : rows_) {
    if (r.algorithm == algorithm && r.vehicle_count == vehicle_count) {
      sum += r.mean_wait_s;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

std::vector<int> ResultTable::vehicle_counts() const {
  std::vector<int> counts;
  for (const ResultRow& r : rows_) counts.push_back(r.vehicle_count);
  std::sort(counts.begin(), counts.end());
  counts.erase(std::unique(counts.begin(), counts.end()), counts.end());
  return counts;
}

std::vector<std::string> ResultTable::algorithms() const {
  std::vector<std::string> names;
  for (const ResultRow& r : rows_)
    if (std::find(names.begin(), names.end(), r.algorithm) == names.end())
      names.push_back(r.algorithm);
  return names;
}

ResultTable run_matrix(const Scenario& scenario, const RoadNetwork& net,
                       int workers, std::ostream* progress) {
  if (scenario.algorithms.empty() || scenario.vehicle_counts.empty() ||
      scenario.seeds.empty())
    fail("scenario: empty run matrix");

  DistanceTable dist = all_pairs_distances(net);
  ResultTable table;
  for (Algorithm alg : scenario.algorithms) {
    for (const std::string& executor : scenario.executors) {
      for (int count : scenario.vehicle_counts) {
        for (std::uint64_t seed : scenario.seeds) {
          SimConfig cfg = scenario.base;
          cfg.network = &net;
          cfg.algorithm = alg;
          cfg.controller = controller_for(scenario, alg);
          cfg.vehicle_count = count;
          cfg.seed = seed;
          try {
            RunResult r = executor == "parallel" ? parallel_run(cfg, dist, workers)
                                                 : run(cfg, dist);
            table.add(ResultRow{algorithm_name(alg), executor, count, seed,
                                r.mean_travel_s, r.mean_wait_s, r.wall_clock_ms});
            if (progress) {
              *progress << algorithm_name(alg) << "/" << executor << " count="
                        << count << " seed=" << seed
                        << " mean_travel_s=" << r.mean_travel_s
                        << " completed=" << r.completed_count << "\n";
            }
          } catch (const std::exception& e) {
            table.add_failure(std::string(algorithm_name(alg)) + "/" + executor +
                              " count=" + std::to_string(count) + " seed=" +
                              std::to_string(seed) + ": " + e.what());
          }
        }
      }
    }
  }
  return table;
}

double summarize(const ResultTable& table, const std::string& baseline,
                 const std::string& target, int vehicle_count) {
  auto base = table.aggregate_mean_travel(baseline, vehicle_count);
  if (!base)
    fail("summarize: no rows for algorithm \"" + baseline + "\" at count " +
         std::to_string(vehicle_count));
  auto tgt = table.aggregate_mean_travel(target, vehicle_count);
  if (!tgt)
    fail("summarize: no rows for algorithm \"" + target + "\" at count " +
         std::to_string(vehicle_count));
  return percent_reduction(*base, *tgt);
}

namespace {
constexpr const char* kCsvHeader =
    "algorithm,executor,vehicle_count,seed,mean_travel_s,mean_wait_s,"
    "wall_clock_ms";
}

void write_results_csv(const ResultTable& table, std::ostream& out) {
  out << kCsvHeader << "\n";
  for (const ResultRow& r : table.rows()) {
    out << r.algorithm << "," << r.executor << "," << r.vehicle_count << ","
        << r.seed << "," << format_double(r.mean_travel_s) << ","
        << format_double(r.mean_wait_s) << "," << r.wall_clock_ms << "\n";
  }
}

ResultTable read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail("results csv: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader)
    fail("results csv: bad header, expected \"" + std::string(kCsvHeader) + "\"");

  ResultTable table;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    if (fields.size() != 7)
      fail("results csv line " + std::to_string(lineno) + ": expected 7 fields");
    ResultRow r;
    r.algorithm = fields[0];
    r.executor = fields[1];
    auto parse_int = [&](const std::string& s, auto& out_v) {
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out_v);
      if (ec != std::errc() || p != s.data() + s.size())
        fail("results csv line " + std::to_string(lineno) + ": bad number \"" +
             s + "\"");
    };
    auto parse_dbl = [&](const std::string& s, double& out_v) {
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out_v);
      if (ec != std::errc() || p != s.data() + s.size())
        fail("results csv line " + std::to_string(lineno) + ": bad number \"" +
             s + "\"");
    };
    parse_int(fields[2], r.vehicle_count);
    parse_int(fields[3], r.seed);
    parse_dbl(fields[4], r.mean_travel_s);
    parse_dbl(fields[5], r.mean_wait_s);
    parse_int(fields[6], r.wall_clock_ms);
    table.add(std::move(r));
  }
  return table;
}

void write_results_csv_file(const ResultTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("cannot write results csv: " + path);
  write_results_csv(table, out);
}

ResultTable read_results_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open results csv: " + path);
  return read_results_csv(in);
}

void emit_report(const ResultTable& table, std::ostream& text_out,
                 std::ostream& data_out) {
  if (table.rows().empty()) fail("emit_report: table is empty");
  const std::vector<std::string> algs = table.algorithms();
  const std::vector<int> counts = table.vehicle_counts();

  // Text table: counts as rows, algorithms as columns.
  std::size_t width = 10;
  for (const std::string& a : algs) width = std::max(width, a.size() + 2);
  text_out << std::left << std::setw(10) << "vehicles";
  for (const std::string& a : algs) text_out << std::setw(static_cast<int>(width)) << a;
  text_out << "\n";
  for (int c : counts) {
    text_out << std::left << std::setw(10) << c;
    for (const std::string& a : algs) {
      auto v = table.aggregate_mean_travel(a, c);
      std::ostringstream cell;
      if (v)
        cell << std::fixed << std::setprecision(2) << *v;
      else
        cell << "NA";
      text_out << std::setw(static_cast<int>(width)) << cell.str();
    }
    text_out << "\n";
  }

  // Plot data: one row per count, "-" where a point is missing.
  data_out << "# vehicle_count";
  for (const std::string& a : algs) data_out << " " << a;
  data_out << "\n";
  for (int c : counts) {
    data_out << c;
    for (const std::string& a : algs) {
      auto v = table.aggregate_mean_travel(a, c);
      if (v)
        data_out << " " << format_double(*v);
      else
        data_out << " -";
    }
    data_out << "\n";
  }
}

}  // namespace macosim
