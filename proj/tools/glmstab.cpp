#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "glmstab/error.hpp"
#include "glmstab/experiments.hpp"

namespace {

using namespace glmstab;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonFlags {
  std::string method;
  std::string config;
  double h = 0.0;
  double tfinal = 0.0;
  std::string out;
  std::string denominator;
  std::string sum_start;
};

void add_run_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--method", f.method, "Method name (bdf2, ab2, be)");
  cmd->add_option("--config", f.config, "JSON run configuration file");
  cmd->add_option("--h", f.h, "Step size");
  cmd->add_option("--tfinal", f.tfinal, "Final time");
}

void add_estimator_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--denominator", f.denominator, "Time denominator of mu_appr")->check(CLI::IsMember({"t0", "N0"}));
  cmd->add_option("--sum-start", f.sum_start, "First summed step of mu_appr")
      ->check(CLI::IsMember({"origin", "burn-in"}));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Config, "cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void apply_estimator(const CommonFlags& f, MuOptions& mu) {
  if (f.denominator == "t0") mu.denominator = Denominator::FromOrigin;
  if (f.denominator == "N0") mu.denominator = Denominator::FromBurnIn;
  if (f.sum_start == "origin") mu.sum_start = SumStart::Origin;
  if (f.sum_start == "burn-in") mu.sum_start = SumStart::BurnIn;
}

RunConfig build_config(const CommonFlags& f) {
  RunConfig cfg = f.config.empty() ? RunConfig{} : run_config_from_json(read_file(f.config));
  if (!f.method.empty()) cfg.method = f.method;
  if (f.h != 0.0) cfg.h = f.h;
  if (f.tfinal != 0.0) cfg.t_final = f.tfinal;
  apply_estimator(f, cfg.mu);
  cfg.validate();
  return cfg;
}

// Writes to <out>/<name> when an output directory is given, else to stdout
// if `to_stdout` is set.
void emit(const std::string& out, const std::string& name, const std::string& text, bool to_stdout) {
  if (out.empty()) {
    if (to_stdout) std::cout << text;
    return;
  }
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  const auto path = std::filesystem::path(out) / name;
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorKind::Config, "cannot write '" + path.string() + "'");
  file << text;
}

template <class F>
std::string capture(F&& write) {
  std::ostringstream ss;
  write(ss);
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Strictly stable general linear methods: stepping and stability spectra"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  CommonFlags run_f;
  auto* run = app.add_subcommand("run", "Integrate one configuration and report diagnostics");
  add_run_flags(run, run_f);
  add_estimator_flags(run, run_f);
  run->add_option("--out", run_f.out, "Output directory");

  CommonFlags t1_f;
  auto* table1 = app.add_subcommand("table1", "Step-size sweep on the rotating-cosine problem");
  add_estimator_flags(table1, t1_f);
  table1->add_option("--out", t1_f.out, "Output directory");

  CommonFlags t2_f;
  std::string b2_reading;
  double b1 = -0.5;
  auto* table2 = app.add_subcommand("table2", "Amplitude sweep on the rotating-cosine problem");
  add_estimator_flags(table2, t2_f);
  table2->add_option("--out", t2_f.out, "Output directory");
  table2->add_option("--b2-reading", b2_reading, "Which b2 value to use (default: both)")
      ->check(CLI::IsMember({"as-printed", "corrected"}));
  table2->add_option("--b1", b1, "Offset b1")->capture_default_str();

  std::string ce_method = "bdf2";
  double ce_h = 0.5, ce_amp = 0.3, ce_offset = -0.1;
  std::size_t ce_steps = 200;
  std::string ce_out;
  auto* counter = app.add_subcommand("counterexample", "Periodic scalar equation sampled at its period");
  counter->add_option("--method", ce_method, "Method name")->capture_default_str();
  counter->add_option("--h", ce_h, "Step size (also the coefficient period)")->capture_default_str();
  counter->add_option("-D,--amp", ce_amp, "Cosine amplitude")->capture_default_str();
  counter->add_option("-L,--offset", ce_offset, "Constant offset")->capture_default_str();
  counter->add_option("--steps", ce_steps, "Number of steps")->capture_default_str();
  counter->add_option("--out", ce_out, "Output directory");

  CommonFlags sp_f;
  double window = 0.0;
  std::size_t modes = 0;
  bool oracle = false;
  auto* spectrum = app.add_subcommand("spectrum", "Discrete QR spectrum estimates");
  add_run_flags(spectrum, sp_f);
  add_estimator_flags(spectrum, sp_f);
  spectrum->add_option("--out", sp_f.out, "Output directory");
  spectrum->add_option("--window", window, "Sacker-Sell window length H");
  spectrum->add_option("--modes", modes, "Number of tracked modes");
  spectrum->add_flag("--oracle", oracle, "Compare with the continuous QR oracle");

  CommonFlags cv_f;
  std::vector<double> hs{4e-2, 2e-2, 1e-2, 5e-3};
  auto* converge = app.add_subcommand("converge", "Global error and defect convergence study");
  add_run_flags(converge, cv_f);
  converge->add_option("--out", cv_f.out, "Output directory");
  converge->add_option("--hs", hs, "Step sizes")->capture_default_str()->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) {
      const RunConfig cfg = build_config(run_f);
      const DiagnosticReport rep = cmd_run(cfg);
      for (const auto& w : rep.warnings) std::cerr << "warning: " << w << '\n';
      emit(run_f.out, "run.csv", capture([&](std::ostream& os) { write_run_csv(os, rep); }), false);
      const std::string json = report_to_json(rep) + "\n";
      emit(run_f.out, "report.json", json, false);
      std::cout << json;
    } else if (*table1) {
      MuOptions mu;
      apply_estimator(t1_f, mu);
      const auto rows = cmd_table1(mu);
      const std::string csv = capture([&](std::ostream& os) { write_table1_csv(os, rows); });
      emit(t1_f.out, "table1.csv", csv, true);
      emit(t1_f.out, "figure1.csv", capture([&](std::ostream& os) { write_figure1_csv(os, rows); }), false);
    } else if (*table2) {
      Table2Options opts;
      opts.b1 = b1;
      apply_estimator(t2_f, opts.mu);
      if (b2_reading == "as-printed") opts.readings = {B2Reading::AsPrinted};
      if (b2_reading == "corrected") opts.readings = {B2Reading::Corrected};
      const auto rows = cmd_table2(opts);
      emit(t2_f.out, "table2.csv", capture([&](std::ostream& os) { write_table2_csv(os, rows); }), true);
      emit(t2_f.out, "figure2.csv", capture([&](std::ostream& os) { write_figure2_csv(os, rows); }), false);
    } else if (*counter) {
      const auto rep = cmd_counterexample(ce_method, ce_h, ce_amp, ce_offset, ce_steps);
      const std::string json = counterexample_to_json(rep) + "\n";
      emit(ce_out, "counterexample.json", json, false);
      std::cout << json;
    } else if (*spectrum) {
      const RunConfig cfg = build_config(sp_f);
      SpectrumOptions opts;
      if (window > 0.0) opts.window = window;
      if (modes > 0) opts.modes = modes;
      opts.oracle = oracle;
      const std::string json = spectrum_to_json(cmd_spectrum(cfg, opts)) + "\n";
      emit(sp_f.out, "spectrum.json", json, false);
      std::cout << json;
    } else if (*converge) {
      const RunConfig cfg = build_config(cv_f);
      const auto res = cmd_converge(cfg, hs);
      emit(cv_f.out, "converge.csv", capture([&](std::ostream& os) { write_converge_csv(os, res); }), true);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.is_config() ? kExitConfig : kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
