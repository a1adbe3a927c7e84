// Command-line front end: test, estimate, sample, bench, self-check.

#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "csd/bench.hpp"
#include "csd/io.hpp"
#include "csd/sampling.hpp"
#include "csd/self_check.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitConfig = 2;
constexpr int kExitReject = 3;
constexpr int kExitSelfCheck = 4;

struct Options {
  std::string model;
  std::string input;
  std::string output;
  std::string bandwidth = "median";
  std::string kernel = "weighted_rbf";
  bool pseudo_obs = false;
  int bootstrap = 1000;
  double alpha = 0.05;
  std::size_t block = 0;
  std::size_t rf_features = 0;
  std::uint64_t rf_seed = 1;
  std::uint64_t seed = 42;
  int threads = 0;
  bool deterministic = true;
  bool u_statistic = false;
  std::string bootstrap_csv;
  std::size_t n = 1000;
  std::string results_dir = "bench_results";
  std::vector<std::size_t> n_values{200, 400, 800, 1600};
  std::vector<std::size_t> d_values{2, 4, 8, 16, 32};
  std::vector<std::size_t> m_values{64, 256, 1024};
  int replicates = 3;
  bool power = false;
  int power_replicates = 50;
  bool parallel_cells = false;
  std::string inject_fault;
};

void emit(const csd::Json& j, const std::string& path) {
  if (path.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw csd::InputError("cannot open output file '" + path + "'");
  out << j.dump(2) << '\n';
}

csd::PseudoSample load_sample(const Options& o) {
  if (o.input.empty()) throw csd::ConfigError("--input is required");
  const csd::PointMatrix raw = csd::read_csv_file(o.input);
  if (!o.pseudo_obs) return csd::pseudo_observations(raw);
  for (double x : raw.data()) {
    if (!(x >= 0.0 && x <= 1.0)) throw csd::InputError("--pseudo-obs input must lie in [0,1]");
  }
  return csd::direct_sample(raw);
}

csd::CopulaModel load_model(const Options& o) {
  if (o.model.empty()) throw csd::ConfigError("--model is required");
  return csd::model_from_json(csd::load_json_arg(o.model));
}

csd::Json config_json(const Options& o, const csd::CopulaModel& model, double bandwidth) {
  csd::Json c{{"model", csd::to_json(model)},
              {"input", o.input},
              {"pseudo_obs", o.pseudo_obs},
              {"bandwidth_flag", o.bandwidth},
              {"bandwidth", bandwidth},
              {"kernel", o.kernel},
              {"seed", o.seed},
              {"threads", csd::resolve_threads(o.threads)},
              {"deterministic", o.deterministic}};
  if (o.block) c["block"] = o.block;
  if (o.rf_features) {
    c["rf_features"] = o.rf_features;
    c["rf_seed"] = o.rf_seed;
  }
  return c;
}

int cmd_test(const Options& o) {
  if (o.rf_features) {
    throw csd::ConfigError("--rf-features cannot be combined with hypothesis testing; use 'estimate'");
  }
  const csd::CopulaModel model = load_model(o);
  const csd::PseudoSample s = load_sample(o);
  const csd::BaseKernelSpec kernel = csd::kernel_from_flag(o.bandwidth, o.kernel).resolve(s.points);
  const csd::SteinKernelEvaluator eval(model, kernel);
  const csd::ExecutionPolicy policy{o.threads, o.deterministic};
  const csd::TestReport report =
      csd::wild_bootstrap_test(s, eval, csd::BootstrapOptions{o.bootstrap, o.alpha, o.seed}, policy);
  csd::Json j = csd::to_json(report);
  j["config"] = config_json(o, model, kernel.bandwidth);
  j["clamped_coordinates"] = s.clamp_count;
  if (!o.bootstrap_csv.empty()) {
    std::ofstream out(o.bootstrap_csv);
    if (!out) throw csd::InputError("cannot open '" + o.bootstrap_csv + "'");
    out << "t_star\n";
    out.precision(17);
    for (double t : report.bootstrap_stats) out << t << '\n';
  }
  emit(j, o.output);
  return report.reject ? kExitReject : kExitOk;
}

int cmd_estimate(const Options& o) {
  const csd::CopulaModel model = load_model(o);
  const csd::PseudoSample s = load_sample(o);
  const csd::ExecutionPolicy policy{o.threads, o.deterministic};
  const auto start = std::chrono::steady_clock::now();
  double bandwidth = 0.0;
  csd::CsdEstimate e;
  std::optional<double> u_stat;
  if (o.rf_features) {
    const csd::BaseKernelSpec kernel =
        s.size() >= 2 ? csd::kernel_from_flag(o.bandwidth, o.kernel).resolve(s.points)
                      : csd::kernel_from_flag(o.bandwidth == "median" ? "1" : o.bandwidth, o.kernel).resolve(s.points);
    bandwidth = kernel.bandwidth;
    e = csd::rf_csd(s, model, csd::draw_basis(o.rf_features, s.dim(), bandwidth, o.rf_seed, kernel.kind), policy);
  } else {
    if (s.size() < 2 && o.bandwidth == "median") {
      throw csd::ConfigError("the median bandwidth needs two or more points; pass --bandwidth");
    }
    const csd::BaseKernelSpec kernel = csd::kernel_from_flag(o.bandwidth, o.kernel).resolve(s.points);
    bandwidth = kernel.bandwidth;
    const csd::SteinKernelEvaluator eval(model, kernel);
    const csd::ScoredSample scored = eval.prepare(s.points, policy.threads);
    e = o.block ? csd::csd_streaming(scored, eval, o.block, policy) : csd::csd_v_statistic(scored, eval, policy);
    if (o.u_statistic && s.size() >= 2) u_stat = csd::csd_u_statistic(scored, eval, policy);
  }
  csd::Json j{{"estimate", csd::to_json(e)}};
  if (u_stat) j["u_statistic"] = *u_stat;
  j["timing_ms"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  j["config"] = config_json(o, model, bandwidth);
  j["clamped_coordinates"] = s.clamp_count;
  emit(j, o.output);
  return kExitOk;
}

int cmd_sample(const Options& o) {
  const csd::CopulaModel model = load_model(o);
  const csd::PseudoSample s = csd::sample({model, o.n, o.seed});
  if (o.output.empty()) {
    csd::write_csv(std::cout, s.points);
    return kExitOk;
  }
  csd::write_csv_file(o.output, s.points);
  emit(csd::Json{{"model", csd::to_json(model)}, {"n", o.n}, {"seed", o.seed}, {"csv", o.output}},
       o.output + ".json");
  return kExitOk;
}

int cmd_bench(const Options& o) {
  namespace fs = std::filesystem;
  fs::create_directories(o.results_dir);
  csd::BenchGrid grid;
  grid.n_values = o.n_values;
  grid.d_values = o.d_values;
  grid.m_values = o.m_values;
  grid.replicates = o.replicates;
  grid.seed = o.seed;
  if (o.parallel_cells) grid.cell_threads = std::max(1, csd::resolve_threads(o.threads));
  const auto rows = csd::run_scaling(grid);
  {
    std::ofstream out(fs::path(o.results_dir) / "scaling.csv");
    csd::write_scaling_csv(out, rows);
  }
  csd::Json manifest{{"grid",
                      {{"n_values", grid.n_values},
                       {"d_values", grid.d_values},
                       {"m_values", grid.m_values},
                       {"replicates", grid.replicates},
                       {"seed", grid.seed},
                       {"bandwidth", grid.bandwidth},
                       {"kernel", csd::to_string(grid.kernel)},
                       {"methods", grid.methods}}},
                     {"files", {"scaling.csv"}}};
  if (o.power) {
    const csd::CopulaModel target = csd::CopulaModel::archimedean({csd::Family::Clayton, 2.0}, 2);
    const double gumbel_theta = csd::gumbel_theta_for_tau(csd::clayton_tau(2.0));
    csd::PowerConfig pc{target,
                        {target, csd::CopulaModel::archimedean({csd::Family::Gumbel, gumbel_theta}, 2),
                         csd::CopulaModel::archimedean({csd::Family::Clayton, 0.5}, 2),
                         csd::CopulaModel::archimedean({csd::Family::Clayton, 1.0}, 2),
                         csd::CopulaModel::archimedean({csd::Family::Clayton, 4.0}, 2)},
                        500,
                        o.power_replicates,
                        200,
                        0.05,
                        o.seed,
                        csd::BaseKernelKind::WeightedRBF,
                        grid.bandwidth};
    const auto power_rows = csd::run_power(pc);
    std::ofstream out(fs::path(o.results_dir) / "power.csv");
    csd::write_power_csv(out, power_rows);
    manifest["files"].push_back("power.csv");
    manifest["power"] = {{"target", csd::to_json(target)}, {"n", pc.n}, {"replicates", pc.replicates},
                         {"bootstrap", pc.bootstrap}, {"alpha", pc.alpha}, {"seed", pc.seed},
                         {"kernel", csd::to_string(pc.kernel)}, {"bandwidth", pc.bandwidth}};
  }
  emit(manifest, (fs::path(o.results_dir) / "manifest.json").string());
  csd::write_scaling_csv(std::cout, rows);
  return kExitOk;
}

int cmd_self_check(const Options& o) {
  csd::SelfCheckOptions opt;
  if (!o.inject_fault.empty()) {
    if (o.inject_fault != "generator-sign") throw csd::ConfigError("unknown fault '" + o.inject_fault + "'");
    opt.inject_generator_sign_flip = true;
  }
  bool ok = true;
  csd::Json checks = csd::Json::array();
  for (const auto& c : csd::run_self_check(opt)) {
    ok = ok && c.passed;
    std::cerr << (c.passed ? "PASS " : "FAIL ") << c.name << "  metric=" << c.metric << " threshold=" << c.threshold
              << "  " << c.detail << '\n';
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"metric", c.metric}, {"threshold", c.threshold}});
  }
  emit(csd::Json{{"passed", ok}, {"checks", checks}}, o.output);
  return ok ? kExitOk : kExitSelfCheck;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Copula-Stein discrepancy estimation and goodness-of-fit testing"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--model", o.model, "Model spec: JSON literal or path to a JSON file");
    sub->add_option("--output", o.output, "Output path (stdout when omitted)");
    sub->add_option("--seed", o.seed, "Seed");
    sub->add_option("--threads", o.threads, "Worker threads (0: CSD_THREADS or 1)");
    sub->add_flag("--deterministic,!--no-deterministic", o.deterministic, "Fixed-order reductions (default on)");
  };
  auto add_data = [&](CLI::App* sub) {
    sub->add_option("--input", o.input, "CSV with a header row");
    sub->add_flag("--pseudo-obs", o.pseudo_obs, "Input already lies in the unit cube; skip the rank transform");
    sub->add_option("--bandwidth", o.bandwidth, "Kernel bandwidth or 'median'");
    sub->add_option("--kernel", o.kernel, "Base kernel: weighted_rbf (default) or rbf")
        ->check(CLI::IsMember({"weighted_rbf", "rbf"}));
    sub->add_option("--rf-features", o.rf_features, "Random-feature dimension m");
    sub->add_option("--rf-seed", o.rf_seed, "Random-feature basis seed");
  };

  CLI::App* test = app.add_subcommand("test", "Wild-bootstrap goodness-of-fit test");
  add_common(test);
  add_data(test);
  test->add_option("--bootstrap", o.bootstrap, "Bootstrap replicates");
  test->add_option("--alpha", o.alpha, "Test level");
  test->add_option("--bootstrap-csv", o.bootstrap_csv, "Dump bootstrap statistics as CSV");

  CLI::App* estimate = app.add_subcommand("estimate", "CSD estimate (exact, streaming or random features)");
  add_common(estimate);
  add_data(estimate);
  estimate->add_option("--block", o.block, "Streaming block size");
  estimate->add_flag("--u-statistic", o.u_statistic, "Also report the U-statistic (diagnostic)");

  CLI::App* samp = app.add_subcommand("sample", "Draw from a model; writes CSV plus a JSON sidecar");
  add_common(samp);
  samp->add_option("--n", o.n, "Sample size");

  CLI::App* bench = app.add_subcommand("bench", "Scaling and power experiments");
  bench->add_option("--results-dir", o.results_dir, "Directory for CSV tables and the manifest");
  bench->add_option("--n-values", o.n_values, "Sample sizes")->delimiter(',');
  bench->add_option("--d-values", o.d_values, "Dimensions")->delimiter(',');
  bench->add_option("--m-values", o.m_values, "Random-feature dimensions")->delimiter(',');
  bench->add_option("--replicates", o.replicates, "Timing replicates per cell");
  bench->add_option("--seed", o.seed, "Base seed");
  bench->add_flag("--power", o.power, "Also run the tau-matched power study");
  bench->add_option("--power-replicates", o.power_replicates, "Replicates per power alternative");
  bench->add_flag("--parallel-cells", o.parallel_cells, "Run cells on --threads workers (timings become noisier)");
  bench->add_option("--threads", o.threads, "Workers for --parallel-cells (0: CSD_THREADS or 1)");

  CLI::App* self = app.add_subcommand("self-check", "Run the built-in oracle checks");
  self->add_option("--output", o.output, "Report path");
  self->add_option("--inject-fault", o.inject_fault)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*test) return cmd_test(o);
    if (*estimate) return cmd_estimate(o);
    if (*samp) return cmd_sample(o);
    if (*bench) return cmd_bench(o);
    if (*self) return cmd_self_check(o);
  } catch (const csd::InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const csd::DegenerateError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const csd::Error& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}
