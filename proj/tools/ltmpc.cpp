// Command-line front end: run a scenario, sweep DC', compute the
// nonlinearity index, or redraw plots from a saved log.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <system_error>

#include "CLI11.hpp"
#include "ltmpc/analysis.hpp"
#include "ltmpc/plot.hpp"

namespace fs = std::filesystem;
using namespace ltmpc;

namespace {

enum ExitCode { kOk = 0, kSchema = 2, kInfeasible = 3, kIo = 4 };

struct CommonOptions {
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string format = "csv";
};

// --out-dir beats LTMPC_OUT_DIR beats the scenario's own setting.
fs::path output_dir(const CommonOptions& opt, const std::string& fallback) {
  if (!opt.out_dir.empty()) return opt.out_dir;
  if (const char* env = std::getenv("LTMPC_OUT_DIR"); env && *env) return env;
  return fallback;
}

ScenarioFile load(const std::string& path, const CommonOptions& opt) {
  ScenarioFile f = load_scenario(path);
  if (opt.seed) f.scenario.guidance.errors.seed = *opt.seed;
  return f;
}

void print_summary(const GuidanceLog& log) {
  const TerminalSummary& s = log.summary;
  std::printf("scenario        %s (seed %llu)\n", log.scenario.c_str(), static_cast<unsigned long long>(log.seed));
  std::printf("reference       dv %.3f m/s, TOF %.3f d\n", log.reference_dv, log.reference_tof);
  std::printf("flown           dv %.3f m/s, TOF %.3f d, final mass %.3f kg\n", s.dv, s.tof, s.m_final);
  std::printf("terminal error  da %.4f km, di %.5f deg, dRAAN %.5f deg, dv' %.4f m/s\n", s.da, s.di, s.draan,
              s.dv_prime);
  std::printf("segments        %zu, recomputations %d\n", log.segments.size(), log.recomputations);
}

int cmd_run(const std::string& path, const CommonOptions& opt, bool quiet) {
  const ScenarioFile file = load(path, opt);
  const fs::path dir = output_dir(opt, file.output.dir);

  ReferenceTrajectory ref;
  GuidanceLog log;
  int code = kOk;
  auto observer = [&](const SegmentRecord& r) {
    if (quiet) return;
    std::fprintf(stderr, "segment %4d  t %8.3f d  %-10s dv' %7.3f m/s  dv %7.3f m/s%s%s\n", r.index,
                 r.tf / kSecondsPerDay, r.status.c_str(), r.dv_prime, r.dv, r.misthrust ? "  misthrust" : "",
                 r.recompute ? "  recompute" : "");
  };
  try {
    log = run_guidance(file.scenario, &ref, observer);
  } catch (const GuidanceFailure& e) {
    std::fprintf(stderr, "guidance aborted: %s\n", e.what());
    log = e.log;
    code = kInfeasible;
  } catch (const InfeasibleTransfer& e) {
    std::fprintf(stderr, "no feasible transfer: %s\n", e.what());
    return kInfeasible;
  }

  write_text(dir / file.output.log, log_to_json(log).dump(1) + "\n");
  if (opt.format == "csv") write_text(dir / file.output.csv, nodes_to_csv(log.nodes));
  if (!ref.t.empty()) write_text(dir / "reference.json", reference_to_json(ref).dump() + "\n");
  if (file.output.plots) {
    if (log.segments.empty()) {
      std::fprintf(stderr, "no segments flown; plots skipped\n");
    } else {
      emit_plots(log, ref.t.empty() ? nullptr : &ref, dir);
    }
  }
  print_summary(log);
  std::printf("outputs         %s\n", dir.string().c_str());
  return code;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw SchemaError("--values", "not a number: " + item);
    out.push_back(v);
  }
  if (out.empty()) throw SchemaError("--values", "no values given");
  return out;
}

int cmd_sweep(const std::string& path, const std::string& values, const CommonOptions& opt) {
  const ScenarioFile file = load(path, opt);
  const std::vector<double> dcs = parse_values(values);
  for (double v : dcs)
    if (!(v > 0.0 && v <= file.scenario.sc.duty_cycle)) throw SchemaError("--values", "DC' must lie in (0, DC]");
  const fs::path dir = output_dir(opt, file.output.dir);
  const auto points = dcprime_sweep(file.scenario, dcs);
  if (opt.format == "json")
    write_text(dir / "sweep.json", sweep_to_json(points).dump(1) + "\n");
  else
    write_text(dir / "sweep.csv", sweep_to_csv(points));
  write_text(dir / "sweep.svg", sweep_svg(points));
  std::printf("%6s %10s %10s %10s %10s %7s\n", "DC'", "refTOF_d", "TOF_d", "refdv_ms", "dv_ms", "recomp");
  for (const SweepPoint& p : points) {
    if (p.ok)
      std::printf("%6.3f %10.3f %10.3f %10.3f %10.3f %7d\n", p.dc_ref, p.ref_tof, p.tof, p.ref_dv, p.dv,
                  p.recomputations);
    else
      std::printf("%6.3f failed: %s\n", p.dc_ref, p.error.c_str());
  }
  return kOk;
}

int cmd_nonlinearity(const std::string& path, int orbits, int samples, const CommonOptions& opt) {
  const ScenarioFile file = load(path, opt);
  NonlinearityOptions o;
  o.orbits = orbits;
  o.samples = samples;
  o.seed = file.scenario.guidance.errors.seed;
  const Gravity grav;
  const CartesianState x0 = kep_to_cart(file.scenario.initial, grav.mu);
  const NonlinearityReport rep = nonlinearity_index(x0, o, grav);
  const fs::path dir = output_dir(opt, file.output.dir);
  if (opt.format == "json")
    write_text(dir / "nonlinearity.json", nonlinearity_to_json(rep).dump(1) + "\n");
  else
    write_text(dir / "nonlinearity.csv", nonlinearity_to_csv(rep));
  write_text(dir / "nonlinearity.svg", nonlinearity_svg(rep));
  std::fputs(nonlinearity_to_csv(rep).c_str(), stdout);
  return kOk;
}

int cmd_plot(const std::string& log_path, std::string ref_path, const CommonOptions& opt) {
  Json j;
  try {
    j = Json::parse(read_text(log_path));
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(log_path, e.what());
  }
  const GuidanceLog log = log_from_json(j);
  if (log.segments.empty()) {
    std::fprintf(stderr, "log has no segments; nothing to plot\n");
    return kOk;
  }
  const fs::path log_dir = fs::path(log_path).parent_path();
  if (ref_path.empty() && fs::exists(log_dir / "reference.json")) ref_path = (log_dir / "reference.json").string();
  std::optional<ReferenceTrajectory> ref;
  if (!ref_path.empty()) ref = reference_from_json(Json::parse(read_text(ref_path)));
  const fs::path dir = output_dir(opt, log_dir.empty() ? "." : log_dir.string());
  for (const auto& f : emit_plots(log, ref ? &*ref : nullptr, dir)) std::printf("%s\n", f.string().c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-thrust MPC guidance: scenario runner and analysis tools"};
  app.require_subcommand(1);
  CommonOptions opt;
  std::string scenario_path, log_path, ref_path, values = "0.3,0.35,0.4,0.45,0.5";
  int orbits = 15, samples = 16;
  bool quiet = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", opt.seed, "Override the thrust-error seed");
    sub->add_option("--out-dir", opt.out_dir, "Output directory (env LTMPC_OUT_DIR)");
    sub->add_option("--format", opt.format, "Tabular output format")->check(CLI::IsMember({"csv", "json"}));
  };

  auto* run = app.add_subcommand("run", "Fly a scenario");
  run->add_option("scenario", scenario_path, "Scenario JSON")->required();
  run->add_flag("-q,--quiet", quiet, "No per-segment progress");
  add_common(run);

  auto* sweep = app.add_subcommand("sweep-dc", "Error-free runs over a list of DC' values");
  sweep->add_option("scenario", scenario_path, "Scenario JSON")->required();
  sweep->add_option("--values", values, "Comma-separated DC' values");
  add_common(sweep);

  auto* nl = app.add_subcommand("nonlinearity", "Nonlinearity index of five state representations");
  nl->add_option("scenario", scenario_path, "Scenario JSON (initial orbit)")->required();
  nl->add_option("--orbits", orbits, "Orbits to propagate")->check(CLI::Range(1, 200));
  nl->add_option("--samples", samples, "Perturbed samples")->check(CLI::Range(8, 10000));
  add_common(nl);

  auto* plot = app.add_subcommand("plot", "Redraw plots from a saved log");
  plot->add_option("log", log_path, "Log JSON")->required();
  plot->add_option("--reference", ref_path, "Reference JSON (default: reference.json next to the log)");
  add_common(plot);

  auto* schema = app.add_subcommand("schema", "Print the scenario JSON schema");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kSchema;
  }

  try {
    if (*run) return cmd_run(scenario_path, opt, quiet);
    if (*sweep) return cmd_sweep(scenario_path, values, opt);
    if (*nl) return cmd_nonlinearity(scenario_path, orbits, samples, opt);
    if (*plot) return cmd_plot(log_path, ref_path, opt);
    if (*schema) {
      std::cout << scenario_schema().dump(2) << "\n";
      return kOk;
    }
  } catch (const SchemaError& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kSchema;
  } catch (const std::system_error& e) {  // includes filesystem_error
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return kIo;
  } catch (const InfeasibleTransfer& e) {
    std::fprintf(stderr, "no feasible transfer: %s\n", e.what());
    return kInfeasible;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kSchema;
  }
  return kOk;
}
