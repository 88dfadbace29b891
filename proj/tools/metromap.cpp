#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "metromap/cli.hpp"
#include "metromap/errors.hpp"

namespace {

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw CLI::ValidationError("not a number: " + item);
    out.push_back(v);
  }
  return out;
}

struct Flags {
  metromap::RunConfig config;
  std::string system = "aligned";
  std::string angles;
  std::string weights = "3,2,1";
  std::string out = ".";

  void add_model(CLI::App* app) {
    app->add_option("--k", config.k, "number of orientations")->default_val(4);
    app->add_option("--system", system, "aligned | regular | irregular | custom (or A/R/I/C)")
        ->default_val("aligned");
    app->add_option("--angles", angles, "custom orientations in degrees, comma separated");
    app->add_option("--weights", weights, "objective weights f1,f2,f3 (bends, topography, length)")
        ->default_val("3,2,1");
    app->add_option("--s", config.s, "admissible neighboring sectors per side")->default_val(1);
    app->add_option("--lmin", config.min_edge_length, "minimum edge length")->default_val(1.0);
    app->add_option("--dmin", config.min_separation, "minimum separation of non-adjacent edges")
        ->default_val(1.0);
  }
  void add_solver(CLI::App* app) {
    app->add_option("--time-limit", config.time_limit, "solver time limit per round in seconds")
        ->default_val(300.0);
    app->add_option("--gap", config.mip_gap, "relative MIP gap")->default_val(1e-6);
    app->add_option("--threads", config.threads, "solver threads")->default_val(1);
    app->add_option("--solver-cmd", config.solver_command,
                    "solver command template with {lp} {sol} {timelimit} {gap} {threads}, "
                    "or 'exact' for the built-in enumeration (tiny inputs only)");
    app->add_flag("--no-lazy-planarity", [this](std::int64_t) { config.lazy_planarity = false; },
                  "add separation rows for all non-adjacent edge pairs up front");
  }
  void add_out(CLI::App* app) { app->add_option("--out", out, "output directory")->default_val("."); }

  void finish() {
    config.system_kind = metromap::parse_system_kind(system);
    if (!angles.empty()) {
      config.angles.clear();
      for (double deg : parse_list(angles)) config.angles.push_back(deg * metromap::kPi / 180.0);
      if (system == "aligned") config.system_kind = metromap::SystemKind::kCustom;
    }
    const std::vector<double> w = parse_list(weights);
    if (w.size() != 3) throw CLI::ValidationError("--weights needs three values");
    config.weights = {w[0], w[1], w[2]};
    config.out_dir = out;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Metro map layout with mixed-integer programming over k orientations"};
  app.require_subcommand(1);

  Flags orient_flags;
  bool csv = false;
  auto* orient = app.add_subcommand("orient", "derive aligned, regular and irregular systems");
  orient->add_option("input", orient_flags.config.input, "network JSON")->required()->check(CLI::ExistingFile);
  orient->add_option("--k", orient_flags.config.k, "number of orientations")->default_val(4);
  orient->add_flag("--csv", csv, "print CSV instead of a table");
  orient_flags.add_out(orient);

  Flags layout_flags;
  auto* layout = app.add_subcommand("layout", "compute, verify and store a schematic layout");
  layout->add_option("input", layout_flags.config.input, "network JSON")->required()->check(CLI::ExistingFile);
  layout_flags.add_model(layout);
  layout_flags.add_solver(layout);
  layout_flags.add_out(layout);

  std::string render_input, render_layout, render_out = ".";
  metromap::RenderStyle style;
  auto* render = app.add_subcommand("render", "draw input map and layout as SVG");
  render->add_option("input", render_input, "network JSON")->required()->check(CLI::ExistingFile);
  render->add_option("layout", render_layout, "layout JSON")->required();
  render->add_option("--out", render_out, "output directory")->default_val(".");
  render->add_option("--line-offset", style.line_offset, "distance between parallel lines in px")
      ->default_val(5.0);
  render->add_option("--stroke", style.stroke_width, "line width in px")->default_val(4.0);
  render->add_flag("--stations", style.show_stations, "draw ordinary stations too");

  Flags batch_flags;
  metromap::BatchPlan plan;
  std::vector<std::string> batch_inputs;
  auto* batch = app.add_subcommand("batch", "k x system x weights experiment matrix");
  batch->add_option("inputs", batch_inputs, "network JSON files")->required()->check(CLI::ExistingFile);
  batch->add_option("--jobs", plan.jobs, "parallel instances")->default_val(1);
  batch->add_option("--s", batch_flags.config.s, "admissible neighboring sectors per side")->default_val(1);
  batch->add_option("--lmin", batch_flags.config.min_edge_length, "minimum edge length")->default_val(1.0);
  batch->add_option("--dmin", batch_flags.config.min_separation, "minimum separation")->default_val(1.0);
  batch_flags.add_solver(batch);
  batch_flags.add_out(batch);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*orient) {
      orient_flags.finish();
      return metromap::cmd_orient(orient_flags.config, csv, std::cout, std::cerr);
    }
    if (*layout) {
      layout_flags.finish();
      return metromap::cmd_layout(layout_flags.config, std::cout, std::cerr);
    }
    if (*render) {
      return metromap::cmd_render(render_input, render_layout, render_out, style, std::cout, std::cerr);
    }
    if (*batch) {
      batch_flags.finish();
      for (const std::string& in : batch_inputs) plan.inputs.emplace_back(in);
      return metromap::cmd_batch(plan, batch_flags.config, std::cout, std::cerr);
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
