#include "metromap/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "metromap/build_config.hpp"
#include "metromap/errors.hpp"
#include "metromap/lp_format.hpp"

namespace metromap {

namespace fs = std::filesystem;

std::string default_solver_command() { return METROMAP_DEFAULT_SOLVER; }

void RunConfig::validate() const {
  if (input.empty()) throw Error(ErrorCode::kInvalidParams, "no input file given");
  if (k < 2) throw Error(ErrorCode::kInvalidParams, "k must be at least 2");
  if (s < 1 || s >= k) throw Error(ErrorCode::kInvalidParams, "s must satisfy 1 <= s < k");
  if (!(min_edge_length > 0) || !(min_separation > 0)) {
    throw Error(ErrorCode::kInvalidParams, "L_min and d_min must be positive");
  }
  if (!(time_limit > 0)) throw Error(ErrorCode::kInvalidParams, "time limit must be positive");
  if (weights.bends < 0 || weights.topo < 0 || weights.length < 0 ||
      weights.bends + weights.topo + weights.length <= 0) {
    throw Error(ErrorCode::kInvalidParams, "weights must be nonnegative and not all zero");
  }
  if (system_kind == SystemKind::kCustom) {
    if (angles.empty()) throw Error(ErrorCode::kInvalidOrientation, "custom system needs --angles");
    if (static_cast<int>(angles.size()) != k) {
      throw Error(ErrorCode::kInvalidOrientation, "number of angles differs from k");
    }
  }
}

namespace {

std::string weight_tag(double w) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", w);
  return buf;
}

std::string kind_letter(SystemKind kind) {
  switch (kind) {
    case SystemKind::kAligned: return "A";
    case SystemKind::kRegular: return "R";
    case SystemKind::kIrregular: return "I";
    case SystemKind::kCustom: return "C";
  }
  return "C";
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string failure_row(const RunConfig& c, const std::string& status) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s,%d,%s,%g,%g,%g,,,,,,,,%s", c.network().c_str(), c.k,
                std::string(to_string(c.system_kind)).c_str(), c.weights.bends, c.weights.topo,
                c.weights.length, status.c_str());
  return buf;
}

double degrees(double rad) { return rad * 180.0 / kPi; }

}  // namespace

std::string RunConfig::instance_name() const {
  return network() + "_k" + std::to_string(k) + "_" + kind_letter(system_kind) + "_" +
         weight_tag(weights.bends) + "-" + weight_tag(weights.topo) + "-" + weight_tag(weights.length);
}

OrientationSystem derive_system(const MetroGraph& graph, const RunConfig& config) {
  switch (config.system_kind) {
    case SystemKind::kAligned: return aligned_system(config.k);
    case SystemKind::kRegular: return best_regular_rotation(graph, config.k);
    case SystemKind::kIrregular: return best_irregular(graph, config.k);
    case SystemKind::kCustom: return OrientationSystem::custom(config.angles);
  }
  return aligned_system(config.k);
}

// _____________________________________________________________________________
LayoutRun run_layout(const RunConfig& config, std::stop_token stop) {
  LayoutRun run;
  try {
    config.validate();
    run.graph = prepare_graph(load_graph(config.input));
    const OrientationSystem system = derive_system(run.graph, config);
    ModelParams params = ModelParams::defaults(run.graph, config.k, config.s, config.min_edge_length,
                                               config.min_separation, config.weights);

    const std::string command =
        config.solver_command.empty() ? default_solver_command() : config.solver_command;
    if (command.empty()) throw Error(ErrorCode::kSolverNotFound, "no MILP solver configured");
    SolveOptions options;
    options.time_limit = config.time_limit;
    options.mip_gap = config.mip_gap;
    options.threads = config.threads;
    options.solver_command = command;
    MipSolveFn solve = [&](const ModelBuild& model) {
      if (command == kExactSolverCommand) return solve_exact_tiny(model.problem, model.registry);
      return solve_external(model.problem, options, stop);
    };
    LazyOptions lazy;
    lazy.lazy = config.lazy_planarity;
    run.result = solve_with_lazy_planarity(run.graph, system, params, solve, lazy);

    fs::create_directories(config.out_dir);
    const std::string stem = config.instance_name();
    const fs::path lp = config.out_dir / (stem + ".lp");
    const fs::path json = config.out_dir / (stem + ".layout.json");
    const fs::path csv = config.out_dir / (stem + ".csv");
    write_lp_file(run.result->model.problem, lp);
    write_text(json, layout_to_json(run.result->layout, &run.result->metrics).dump(1) + "\n");
    run.csv_row = metrics_csv_row(config.network(), run.result->layout, run.result->metrics);
    write_text(csv, metrics_csv_header() + "\n" + run.csv_row + "\n");
    run.files = {lp, json, csv};
  } catch (const Error& e) {
    run.error = std::string(to_string(e.code())) + ": " + e.what();
    std::string status = "error";
    if (e.code() == ErrorCode::kNotSolved) {
      status = run.error.find("timeout") != std::string::npos ? "timeout" : "infeasible";
    }
    run.csv_row = failure_row(config, status);
  } catch (const std::exception& e) {
    run.error = e.what();
    run.csv_row = failure_row(config, "error");
  }
  return run;
}

// _____________________________________________________________________________
int cmd_orient(const RunConfig& config, bool csv, std::ostream& out, std::ostream& err) {
  MetroGraph graph;
  try {
    if (config.k < 2) throw Error(ErrorCode::kInvalidParams, "k must be at least 2");
    graph = prepare_graph(load_graph(config.input));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  struct Row {
    SystemKind kind;
    std::optional<OrientationSystem> system;
    std::optional<DistortionReport> report;
    std::string error;
  };
  std::vector<Row> rows;
  const std::vector<double> slopes = edge_slopes(graph);
  for (SystemKind kind : {SystemKind::kAligned, SystemKind::kRegular, SystemKind::kIrregular}) {
    Row row{kind, {}, {}, {}};
    try {
      RunConfig c = config;
      c.system_kind = kind;
      row.system = derive_system(graph, c);
      row.report = distortion(slopes, *row.system);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }

  int status = 0;
  if (csv) {
    out << "network,k,system,distortion_rad,distortion_deg_per_edge,angles_deg\n";
  } else {
    out << config.network() << ": n=" << graph.vertex_count() << " m=" << graph.edge_count()
        << " k=" << config.k << "\n";
    out << std::left << std::setw(11) << "system" << std::setw(16) << "distortion[rad]"
        << std::setw(14) << "deg/edge" << "angles[deg]\n";
  }
  nlohmann::json doc = nlohmann::json::object();
  for (const Row& row : rows) {
    const std::string name(to_string(row.kind));
    if (!row.system) {
      status = 1;
      err << name << ": " << row.error << "\n";
      if (csv) out << config.network() << "," << config.k << "," << name << ",,,\n";
      continue;
    }
    std::ostringstream angles;
    angles << std::fixed << std::setprecision(3);
    for (int i = 0; i < row.system->k(); ++i) {
      angles << (i ? (csv ? ";" : " ") : "") << degrees(row.system->angle(i));
    }
    char total[32], per_edge[32];
    std::snprintf(total, sizeof total, "%.6f", row.report->total);
    std::snprintf(per_edge, sizeof per_edge, "%.4f", degrees(row.report->mean()));
    if (csv) {
      out << config.network() << "," << config.k << "," << name << "," << total << "," << per_edge
          << "," << angles.str() << "\n";
    } else {
      out << std::left << std::setw(11) << name << std::setw(16) << total << std::setw(14)
          << per_edge << angles.str() << "\n";
    }
    nlohmann::json entry = system_to_json(*row.system);
    entry["distortion"] = row.report->total;
    doc[name] = entry;
  }

  try {
    fs::create_directories(config.out_dir);
    const fs::path path = config.out_dir / (config.network() + "_k" + std::to_string(config.k) + "_systems.json");
    write_text(path, doc.dump(1) + "\n");
    if (!csv) out << "wrote " << path.string() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return status;
}

int cmd_layout(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const LayoutRun run = run_layout(config);
  if (!run.error.empty()) {
    err << "error: " << run.error << "\n";
    return 2;
  }
  const LazyResult& r = *run.result;
  out << config.instance_name() << ": status " << to_string(r.layout.provenance.status)
      << ", objective " << r.layout.provenance.objective << ", rounds " << r.rounds.size()
      << ", planarity pairs " << r.pairs.size() << "\n";
  out << "  bends " << r.metrics.bend_cost << " (" << r.metrics.bend_count << " turns), sector deviation "
      << r.metrics.sector_deviation_total << ", distortion " << r.metrics.distortion_per_edge
      << " deg/edge, length " << r.metrics.total_length << "\n";
  std::istringstream checks(r.verification.summary());
  for (std::string line; std::getline(checks, line);) out << "  " << line << "\n";
  for (const fs::path& f : run.files) out << "  wrote " << f.string() << "\n";
  if (!r.verification.ok()) {
    err << "verification failed\n";
    return 1;
  }
  return 0;
}

int cmd_render(const fs::path& input, const fs::path& layout_json, const fs::path& out_dir,
               const RenderStyle& style, std::ostream& out, std::ostream& err) {
  try {
    const MetroGraph graph = prepare_graph(load_graph(input));
    const Layout layout = layout_from_json(nlohmann::json::parse(read_text(layout_json)));

    std::vector<Point> in_pos, out_pos;
    for (VertexIndex v = 0; v < graph.vertex_count(); ++v) {
      in_pos.push_back(graph.vertex(v).pos);
      out_pos.push_back(layout.position(graph, v));
    }
    RenderStyle in_style = style;
    RenderStyle out_style = style;
    in_style.scale = fit_scale(in_pos);
    out_style.scale = fit_scale(out_pos);

    fs::create_directories(out_dir);
    std::string stem = layout_json.filename().string();
    if (const auto pos = stem.find(".layout.json"); pos != std::string::npos) {
      stem.resize(pos);
    } else {
      stem = layout_json.stem().string();
    }
    const fs::path in_svg = out_dir / (stem + ".input.svg");
    const fs::path out_svg = out_dir / (stem + ".svg");
    write_text(in_svg, render_svg(graph, in_pos, in_style));
    write_text(out_svg, render_svg(graph, out_pos, out_style));
    out << "wrote " << in_svg.string() << "\nwrote " << out_svg.string() << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

// _____________________________________________________________________________
std::vector<RunConfig> expand_batch(const BatchPlan& plan, const RunConfig& base) {
  std::vector<fs::path> inputs = plan.inputs;
  std::sort(inputs.begin(), inputs.end(),
            [](const fs::path& a, const fs::path& b) { return a.stem().string() < b.stem().string(); });
  std::vector<RunConfig> out;
  for (const fs::path& in : inputs) {
    for (int k : plan.ks) {
      for (SystemKind kind : plan.kinds) {
        for (const ObjectiveWeights& w : plan.weights) {
          RunConfig c = base;
          c.input = in;
          c.k = k;
          c.system_kind = kind;
          c.weights = w;
          out.push_back(std::move(c));
        }
      }
    }
  }
  return out;
}

int cmd_batch(const BatchPlan& plan, const RunConfig& base, std::ostream& out, std::ostream& err) {
  if (plan.jobs < 1) {
    err << "error: --jobs must be positive\n";
    return 2;
  }
  const std::vector<RunConfig> configs = expand_batch(plan, base);
  std::vector<std::string> rows(configs.size());
  std::vector<char> good(configs.size(), 0);
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;

  auto worker = [&](std::stop_token stop) {
    for (std::size_t i = next++; i < configs.size() && !stop.stop_requested(); i = next++) {
      const LayoutRun run = run_layout(configs[i], stop);
      rows[i] = run.csv_row;
      good[i] = run.ok();
      std::lock_guard lock(log_mutex);
      err << "[" << i + 1 << "/" << configs.size() << "] " << configs[i].instance_name() << ": "
          << (run.error.empty() ? (run.ok() ? "ok" : "verification failed") : run.error) << "\n";
    }
  };
  {
    std::vector<std::jthread> pool;
    const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(plan.jobs), configs.size());
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::string csv = metrics_csv_header() + "\n";
  for (const std::string& row : rows) csv += row + "\n";
  try {
    fs::create_directories(base.out_dir);
    write_text(base.out_dir / "batch.csv", csv);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  out << csv;
  return std::all_of(good.begin(), good.end(), [](char b) { return b != 0; }) ? 0 : 1;
}

}  // namespace metromap
