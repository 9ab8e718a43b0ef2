#include "nematowave/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "nematowave/config.hpp"
#include "nematowave/errors.hpp"
#include "nematowave/experiments.hpp"
#include "nematowave/kernels.hpp"
#include "nematowave/snapshot.hpp"

#ifndef NEMATOWAVE_VERSION
#define NEMATOWAVE_VERSION "0.0.0"
#endif

namespace nematowave {
namespace {

namespace fs = std::filesystem;

struct Options {
  std::string config_path;
  std::string output = "runs";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  bool quiet = false;
};

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw Error("cannot write " + p.string());
  os << text;
  if (!os) throw Error("write failed: " + p.string());
}

void write_diagnostics(const fs::path& p, const std::vector<DiagnosticsRecord>& rows) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw Error("cannot write " + p.string());
  write_csv(os, rows);
}

std::string hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

class RunDir {
 public:
  RunDir(const Options& o, Command cmd, const std::string& text)
      : hash_(fnv1a(std::string(to_string(cmd)) + "\n" + text)),
        path_(fs::path(o.output) / (std::string(to_string(cmd)) + "-" + hex(hash_))),
        started_(utc_now()),
        clock_(std::chrono::steady_clock::now()) {
    fs::create_directories(path_);
    write_file(path_ / "config.ini", text);
  }

  const fs::path& path() const { return path_; }

  void finish(const std::string& status) const {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_).count();
    std::ostringstream os;
    os << "config_hash=" << hex(hash_) << '\n'
       << "version=" << NEMATOWAVE_VERSION << '\n'
       << "kernels=" << kernels::active().name << '\n'
       << "started=" << started_ << '\n'
       << "finished=" << utc_now() << '\n'
       << "wall_seconds=" << std::fixed << std::setprecision(3) << secs << '\n'
       << "status=" << status << '\n';
    write_file(path_ / "metadata.txt", os.str());
  }

 private:
  std::uint64_t hash_;
  fs::path path_;
  std::string started_;
  std::chrono::steady_clock::time_point clock_;
};

std::string snapshot_name(const std::string& stem, std::size_t i) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%06zu.snap", stem.c_str(), i);
  return buf;
}

int cmd_simulate(const RunConfig& rc, const RunDir& dir, std::ostream& out) {
  const Experiment& e = rc.experiment;
  SolverConfig cfg = e.solver;
  if (rc.snapshot_every > 0)
    cfg.on_record = [&](const State& s, std::size_t i) {
      if (i % rc.snapshot_every == 0) write_snapshot_file((dir.path() / snapshot_name("state", i)).string(), s);
    };
  State init = e.solver.source ? e.solver.source->exact_state(e.grid, 0.0)
                               : make_initial(e.family, e.grid, e.solver.constants);
  const RunOutcome o = run(init, cfg, e.family.support_radius);
  write_diagnostics(dir.path() / "diagnostics.csv", o.diagnostics);
  write_snapshot_file((dir.path() / "final.snap").string(), o.final_state);
  out << "status=" << to_string(o.status) << '\n'
      << "t_end=" << format_double(o.t_end) << '\n'
      << "steps=" << o.steps << '\n'
      << "grad_max_initial=" << format_double(o.initial_grad_max) << '\n'
      << "grad_max_peak=" << format_double(o.peak_grad_max) << '\n';
  dir.finish(to_string(o.status));
  if (o.status == RunStatus::BlowupDetected) return 2;
  if (o.status == RunStatus::NonFinite) return 1;
  return 0;
}

int cmd_lifespan(const RunConfig& rc, const RunDir& dir, std::ostream& out) {
  std::size_t i = 0;
  const auto table = lifespan_scan(rc.amplitudes, rc.experiment, [&](const LifespanRow&, const RunOutcome& o) {
    write_diagnostics(dir.path() / ("diagnostics_" + std::to_string(i) + ".csv"), o.diagnostics);
    write_snapshot_file((dir.path() / ("final_" + std::to_string(i) + ".snap")).string(), o.final_state);
    ++i;
  });
  std::ostringstream csv;
  csv << "run,amplitude,grid,t_num,status,censored,initial_grad_max,peak_grad_max\n";
  // rows come back sorted descending; the run index follows that order
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    const auto& r = table.rows[k];
    csv << k << ',' << format_double(r.amplitude) << ',' << r.grid << ',' << format_double(r.t_num) << ','
        << to_string(r.status) << ',' << (r.censored ? 1 : 0) << ',' << format_double(r.initial_grad_max) << ','
        << format_double(r.peak_grad_max) << '\n';
  }
  write_file(dir.path() / "lifespan.csv", csv.str());
  std::ostringstream fit;
  fit << "slope=" << (table.slope ? format_double(*table.slope) : "none") << '\n'
      << "intercept=" << (table.intercept ? format_double(*table.intercept) : "none") << '\n'
      << "nonincreasing=" << (table.nonincreasing() ? "true" : "false") << '\n';
  write_file(dir.path() / "fit.txt", fit.str());
  out << csv.str() << fit.str();
  dir.finish("scanned");
  return 0;
}

int cmd_blowup(const RunConfig& rc, const RunDir& dir, std::ostream& out) {
  const BlowupReport rep = blowup_demo_1d(rc.experiment, rc.refine);
  write_diagnostics(dir.path() / "diagnostics.csv", rep.main.diagnostics);
  write_diagnostics(dir.path() / "control_diagnostics.csv", rep.control.diagnostics);
  write_snapshot_file((dir.path() / "final.snap").string(), rep.main.final_state);
  write_snapshot_file((dir.path() / "control_final.snap").string(), rep.control.final_state);
  std::ostringstream os;
  os << "status=" << to_string(rep.main.status) << '\n'
     << "T_num=" << format_double(rep.main.t_end) << '\n'
     << "grad_max_initial=" << format_double(rep.main.initial_grad_max) << '\n'
     << "grad_max_peak=" << format_double(rep.main.peak_grad_max) << '\n'
     << "pre_detection_energy_drift=" << format_double(rep.pre_detection_drift) << '\n'
     << "control_status=" << to_string(rep.control.status) << '\n'
     << "control_grad_max_peak=" << format_double(rep.control.peak_grad_max) << '\n';
  if (rep.refined) {
    write_diagnostics(dir.path() / "refined_diagnostics.csv", rep.refined->diagnostics);
    os << "refined_status=" << to_string(rep.refined->status) << '\n'
       << "refined_T_num=" << format_double(rep.refined->t_end) << '\n';
    if (rep.refinement_shift) os << "refinement_shift=" << format_double(*rep.refinement_shift) << '\n';
  }
  write_file(dir.path() / "report.txt", os.str());
  out << os.str();
  dir.finish(to_string(rep.main.status));
  if (rep.main.status == RunStatus::BlowupDetected) return 2;
  if (rep.main.status == RunStatus::NonFinite) return 1;
  return 0;
}

int cmd_converge(const RunConfig& rc, const RunDir& dir, std::ostream& out) {
  const ConvergenceReport rep = convergence_study(rc.experiment, rc.experiment.solver.fixed_steps);
  std::ostringstream csv;
  csv << "kind,step,error,order\n";
  for (std::size_t i = 0; i < rep.spacings.size(); ++i)
    csv << "space," << format_double(rep.spacings[i]) << ',' << format_double(rep.space_errors[i]) << ','
        << (i ? format_double(rep.space_orders[i - 1]) : "") << '\n';
  for (std::size_t i = 0; i < rep.time_steps.size(); ++i)
    csv << "time," << format_double(rep.time_steps[i]) << ','
        << (i ? format_double(rep.time_differences[i - 1]) : "") << ','
        << (i == 2 ? format_double(rep.time_order) : "") << '\n';
  write_file(dir.path() / "convergence.csv", csv.str());
  out << csv.str();
  dir.finish("converged");
  return 0;
}

int cmd_verify(const Options& o, std::ostream& out) {
  const AlgebraReport r = verify_algebra(o.samples.value_or(10000), o.seed.value_or(7));
  out << "samples=" << r.samples << '\n'
      << "seed=" << r.seed << '\n'
      << "max_spectrum_deviation=" << format_double(r.max_spectrum_deviation) << '\n'
      << "max_principal_spectrum_deviation=" << format_double(r.max_principal_spectrum_deviation) << '\n'
      << "max_determinant_deviation=" << format_double(r.max_determinant_deviation) << '\n'
      << "max_trace_deviation=" << format_double(r.max_trace_deviation) << '\n'
      << "min_rescaled_eigenvalue=" << format_double(r.min_rescaled_eigenvalue) << '\n'
      << "max_rescaled_second_eigenvalue=" << format_double(r.max_rescaled_second_eigenvalue) << '\n'
      << "max_rescaled_trace_deviation=" << format_double(r.max_rescaled_trace_deviation) << '\n'
      << "max_reduction_deviation=" << format_double(r.max_reduction_deviation) << '\n'
      << "max_forcing_parity_deviation=" << format_double(r.max_forcing_parity_deviation) << '\n'
      << "rescaled_offdiag_sign_check_sum=" << format_double(r.max_offdiag_sum) << '\n'
      << "rescaled_offdiag_sign_check_difference=" << format_double(r.max_offdiag_difference) << '\n'
      << "max_principal_rescaled_deviation=" << format_double(r.max_principal_rescaled_deviation) << '\n'
      << "tolerance=" << format_double(r.tolerance) << '\n'
      << "passed=" << (r.passed() ? "true" : "false") << '\n';
  return r.passed() ? 0 : 1;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"nematowave: finite-difference lab for the planar-director nematic wave equation"};
  app.require_subcommand(1);
  app.footer("\n" + config_reference());
  Options o;
  app.add_option("--output", o.output, "root directory for run outputs")->capture_default_str();
  app.add_flag("--quiet", o.quiet, "suppress the stdout summary");

  struct Sub {
    Command cmd;
    const char* help;
  };
  const Sub subs[] = {{Command::Simulate, "run one initial-value problem"},
                      {Command::Lifespan, "scan lifespan against amplitude"},
                      {Command::Blowup1d, "1-D gradient blowup run and its alpha = gamma control"},
                      {Command::Converge, "manufactured-solution convergence study"},
                      {Command::VerifyAlgebra, "sampled check of the pointwise model identities"}};
  std::vector<std::pair<Command, CLI::App*>> apps;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(to_string(s.cmd), s.help);
    auto* pos = sub->add_option("config", o.config_path, "configuration file");
    if (s.cmd != Command::VerifyAlgebra) pos->required();
    sub->add_option("--output", o.output, "root directory for run outputs");
    sub->add_flag("--quiet", o.quiet, "suppress the stdout summary");
    sub->add_option("--seed", o.seed, "seed for sampled algebra checks");
    sub->add_option("--samples", o.samples, "sample count for sampled algebra checks");
    apps.emplace_back(s.cmd, sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  Command cmd = Command::Simulate;
  for (const auto& [c, sub] : apps)
    if (sub->parsed()) cmd = c;

  std::ostringstream sink;
  std::ostream& out = o.quiet ? static_cast<std::ostream&>(sink) : std::cout;
  try {
    if (cmd == Command::VerifyAlgebra && o.config_path.empty()) return cmd_verify(o, out);
    const std::string text = read_file(o.config_path);
    RunConfig rc = parse_config(text, cmd);
    if (o.seed) rc.seed = *o.seed;
    if (o.samples) rc.samples = *o.samples;
    rc.output_dir = o.output;
#ifdef _OPENMP
    if (rc.threads > 0) omp_set_num_threads(rc.threads);
#endif
    if (cmd == Command::VerifyAlgebra) {
      o.seed = rc.seed;
      o.samples = rc.samples;
      return cmd_verify(o, out);
    }
    const RunDir dir(o, cmd, text);
    if (!o.quiet) out << "run_dir=" << dir.path().string() << '\n';
    switch (cmd) {
      case Command::Simulate:
        return cmd_simulate(rc, dir, out);
      case Command::Lifespan:
        return cmd_lifespan(rc, dir, out);
      case Command::Blowup1d:
        return cmd_blowup(rc, dir, out);
      case Command::Converge:
        return cmd_converge(rc, dir, out);
      case Command::VerifyAlgebra:
        break;
    }
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error";
    if (e.line() > 0) std::cerr << " (line " << e.line() << ")";
    if (!e.field().empty()) std::cerr << " [" << e.field() << "]";
    std::cerr << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace nematowave
