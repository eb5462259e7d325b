// Command-line front end: simulate, fit, study, report.

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <numbers>
#include <sstream>

#include "profile_sampler/cox_current.hpp"
#include "profile_sampler/cox_right.hpp"
#include "profile_sampler/dataset_io.hpp"
#include "profile_sampler/format.hpp"
#include "profile_sampler/inference.hpp"
#include "profile_sampler/partly_linear.hpp"
#include "profile_sampler/study.hpp"

namespace ps = profile_sampler;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

// Regression curve used by `simulate --model partly_linear`; mean zero on [0, 1].
double default_k0(double z) { return std::sin(2.0 * std::numbers::pi * z); }

ps::ParameterPoint parse_point(const std::string& text) {
  std::vector<double> v;
  for (const auto& item : ps::split(text, ';')) v.push_back(ps::parse_double(item));
  if (v.empty()) throw ps::DomainError("empty parameter value");
  return ps::ParameterPoint(Eigen::Map<const ps::Vector>(v.data(), static_cast<Eigen::Index>(v.size())));
}

// Writes through a temporary buffer so a failed run leaves no partial file.
void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ps::IoError("cannot write '" + path + "'");
  out << content;
  if (!out.flush()) throw ps::IoError("write failed for '" + path + "'");
}

struct SimulateArgs {
  std::string model;
  std::size_t n = 0;
  std::string theta0 = "1";
  std::optional<double> tn;
  std::optional<double> target_frac;
  std::uint64_t seed = 1;
  std::uint64_t calibration_seed = 97;
  std::size_t calibration_draws = 1000000;
  double lc = -2.0;
  double uc = 4.0;
  std::string out;
};

int run_simulate(const SimulateArgs& a) {
  const ps::ParameterPoint theta0 = parse_point(a.theta0);
  std::ostringstream buf;
  if (a.model == "partly_linear") {
    auto data = ps::generate_partly_linear(a.n, theta0, default_k0, a.lc, a.uc, a.seed);
    ps::write_partly_linear_csv(buf, data);
  } else {
    double tn = 0.0;
    if (a.tn) {
      tn = *a.tn;
    } else if (a.target_frac) {
      tn = ps::cached_tn(theta0, *a.target_frac, a.calibration_seed, a.calibration_draws);
      std::cerr << "calibrated tn = " << ps::format_double(tn) << '\n';
    } else {
      throw CLI::RequiredError("--tn or --target-frac");
    }
    auto data = a.model == "cox_right" ? ps::generate_right_censored(a.n, theta0, tn, a.seed)
                                       : ps::generate_current_status(a.n, theta0, tn, a.seed);
    ps::write_cox_csv(buf, data);
  }
  write_output(a.out, buf.str());
  return 0;
}

struct FitArgs {
  std::string model;
  std::string data;
  std::optional<double> rate_r;
  double step_constant = 1.0;
  std::size_t chain = 5000;
  std::size_t burn_in = 2000;
  std::uint64_t seed = 1;
  std::string prior = "flat";
  std::string out;
  std::string chain_out;
};

int run_fit(const FitArgs& a) {
  std::unique_ptr<ps::ProfileModel> model;
  if (a.model == "cox_right")
    model = std::make_unique<ps::CoxRightModel>(ps::load_cox_csv(a.data));
  else if (a.model == "cox_current")
    model = std::make_unique<ps::CoxCurrentModel>(ps::load_cox_csv(a.data));
  else
    model = std::make_unique<ps::PartlyLinearModel>(ps::load_partly_linear_csv(a.data));
  ps::ReportConfig cfg;
  cfg.rate_r = a.rate_r;
  cfg.step_constant = a.step_constant;
  cfg.chain_total = a.chain;
  cfg.burn_in = a.burn_in;
  cfg.seed = a.seed;
  cfg.prior = ps::Prior::parse(a.prior);
  const ps::InferenceReport report = ps::build_report(*model, cfg);
  std::ostringstream buf;
  ps::write_report(buf, report);
  write_output(a.out, buf.str());
  return 0;
}

struct StudyArgs {
  std::string config;
  unsigned threads = 1;
  std::string out_dir = ".";
};

unsigned thread_budget(unsigned requested) {
  if (const char* env = std::getenv("PROFILE_SAMPLER_THREADS"); env && *env) {
    const std::string text(env);
    std::size_t pos = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(text, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != text.size() || v == 0)
      throw ps::DomainError("PROFILE_SAMPLER_THREADS must be a positive integer, got '" + text + "'");
    return static_cast<unsigned>(v);
  }
  return requested;
}

void print_summary(std::ostream& os, const std::vector<ps::StudyRow>& rows) {
  os << std::left << std::setw(12) << "model" << std::right << std::setw(6) << "n" << std::setw(6)
     << "reps" << std::setw(12) << "|MLE-CM|" << std::setw(12) << "|SE_M-SE_N|" << std::setw(12)
     << "|L_M-L_N|" << std::setw(12) << "|U_M-U_N|" << std::setw(10) << "coverage"
     << std::setw(10) << "failures" << '\n';
  os << std::fixed << std::setprecision(4);
  for (const auto& r : rows) {
    os << std::left << std::setw(12) << r.model << std::right << std::setw(6) << r.n
       << std::setw(6) << r.reps;
    for (double v : r.scaled) os << std::setw(12) << v;
    os << std::setw(10) << r.coverage << std::setw(10) << r.failures << '\n';
  }
  os.unsetf(std::ios::floatfield);
}

int run_study(const StudyArgs& a) {
  const ps::StudyConfig cfg = ps::load_study_config(a.config);
  const unsigned threads = thread_budget(a.threads);
  const ps::StudyResult result = ps::run_study(cfg, threads);
  std::filesystem::create_directories(a.out_dir);
  const std::filesystem::path dir(a.out_dir);
  ps::emit_csv(result.replicates, (dir / "replicates.csv").string());
  ps::emit_csv(result.rows, (dir / "summary.csv").string());
  std::ostringstream meta;
  ps::write_study_metadata(meta, result);
  write_output((dir / "metadata.txt").string(), meta.str());
  print_summary(std::cout, result.rows);
  return 0;
}

int run_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ps::IoError("cannot open summary '" + path + "'");
  print_summary(std::cout, ps::read_summary_csv(in));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Profile sampler: semiparametric profile-likelihood inference"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Generate a dataset as CSV");
  simulate->add_option("--model", sim.model, "cox_right, cox_current or partly_linear")
      ->required()
      ->check(CLI::IsMember({"cox_right", "cox_current", "partly_linear"}));
  simulate->add_option("--n", sim.n, "Sample size")->required()->check(CLI::PositiveNumber);
  simulate->add_option("--theta0", sim.theta0, "True parameter, ';'-separated")->capture_default_str();
  auto* tn_opt = simulate->add_option("--tn", sim.tn, "Censoring bound");
  auto* frac_opt = simulate->add_option("--target-frac", sim.target_frac,
                                        "Calibrate the censoring bound to this event fraction");
  tn_opt->excludes(frac_opt);
  simulate->add_option("--seed", sim.seed)->capture_default_str();
  simulate->add_option("--calibration-seed", sim.calibration_seed)->capture_default_str();
  simulate->add_option("--calibration-draws", sim.calibration_draws)->capture_default_str();
  simulate->add_option("--lc", sim.lc, "Lower censoring bound (partly_linear)")->capture_default_str();
  simulate->add_option("--uc", sim.uc, "Upper censoring bound (partly_linear)")->capture_default_str();
  simulate->add_option("--out", sim.out, "Output path, '-' for stdout");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Profile sampler report for one dataset");
  fit_cmd->add_option("--model", fit.model)
      ->required()
      ->check(CLI::IsMember({"cox_right", "cox_current", "partly_linear"}));
  fit_cmd->add_option("--data", fit.data, "Dataset CSV")->required();
  fit_cmd->add_option("--rate-r", fit.rate_r, "Nuisance rate (model default if omitted)");
  fit_cmd->add_option("--step-constant", fit.step_constant)->capture_default_str();
  fit_cmd->add_option("--chain", fit.chain, "Total chain length")->capture_default_str();
  fit_cmd->add_option("--burn-in", fit.burn_in)->capture_default_str();
  fit_cmd->add_option("--seed", fit.seed)->capture_default_str();
  fit_cmd->add_option("--prior", fit.prior, "flat or gaussian:mean,sd")->capture_default_str();
  fit_cmd->add_option("--out", fit.out, "Report path, '-' for stdout");

  StudyArgs st;
  auto* study = app.add_subcommand("study", "Replication study");
  study->add_option("--config", st.config, "key = value config file")->required();
  study->add_option("--threads", st.threads)->capture_default_str()->check(CLI::PositiveNumber);
  study->add_option("--out-dir", st.out_dir)->capture_default_str();

  std::string summary_path;
  auto* report = app.add_subcommand("report", "Render a study summary CSV as a table");
  report->add_option("summary", summary_path, "summary.csv from `study`")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*simulate) return run_simulate(sim);
    if (*fit_cmd) return run_fit(fit);
    if (*study) return run_study(st);
    return run_report(summary_path);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
