#include "mbtl/decomposition.hpp"
#include "mbtl/detection.hpp"
#include "mbtl/eval.hpp"
#include "mbtl/io.hpp"
#include "mbtl/synthetic.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string tok; std::getline(ss, tok, ',');)
    if (!tok.empty()) out.push_back(tok);
  return out;
}

mbtl::Vector parse_weights(const std::string& s, int dims, const char* what) {
  const auto parts = split_list(s);
  if (static_cast<int>(parts.size()) != dims)
    throw CLI::ValidationError(std::string(what) + ": expected " + std::to_string(dims) +
                               " comma-separated values");
  mbtl::Vector v(dims);
  for (int i = 0; i < dims; ++i) v[i] = std::stod(parts[static_cast<std::size_t>(i)]);
  return v;
}

int cmd_generate(const std::string& preset_name, const std::string& dims_csv,
                 const std::string& f_csv, const std::string& g_csv, const std::string& hl_csv,
                 const std::string& hr_csv, double offset, double sigma, bool sigma_set,
                 int trials, std::uint64_t seed, const std::string& out_path) {
  mbtl::SyntheticConfig cfg;
  if (!preset_name.empty()) {
    cfg = mbtl::preset(preset_name);
    if (!dims_csv.empty()) {
      std::vector<int> dims;
      for (const auto& p : split_list(dims_csv)) dims.push_back(std::stoi(p));
      if (static_cast<int>(dims.size()) != cfg.grid.num_dims())
        throw CLI::ValidationError("--dims must keep the preset dimensionality");
      cfg.grid = mbtl::TaskGrid::integers(dims);
    }
    if (sigma_set) cfg.noise_sigma = sigma;
  } else {
    if (dims_csv.empty() || hl_csv.empty() || hr_csv.empty())
      throw CLI::ValidationError("without --preset, --dims, --h-left and --h-right are required");
    std::vector<int> dims;
    for (const auto& p : split_list(dims_csv)) dims.push_back(std::stoi(p));
    cfg.grid = mbtl::TaskGrid::integers(dims);
    const int d = cfg.grid.num_dims();
    cfg.f_weights = f_csv.empty() ? mbtl::Vector::Zero(d) : parse_weights(f_csv, d, "--f");
    cfg.g_weights = g_csv.empty() ? mbtl::Vector::Zero(d) : parse_weights(g_csv, d, "--g");
    cfg.h_left = parse_weights(hl_csv, d, "--h-left");
    cfg.h_right = parse_weights(hr_csv, d, "--h-right");
    cfg.offset = offset;
    cfg.noise_sigma = sigma_set ? sigma : 0.0;
    cfg.name = "custom";
  }
  cfg.trials = trials;
  cfg.seed = seed;
  const mbtl::TransferMatrix m = mbtl::generate(cfg);
  mbtl::save_transfer_matrix(m, out_path);
  std::cout << "wrote " << out_path << ": name=" << m.name << " N=" << m.grid.num_tasks()
            << " D=" << m.grid.num_dims() << " trials=" << m.num_trials()
            << " sigma=" << cfg.noise_sigma << "\n";
  return 0;
}

mbtl::Matrix pick_trial(const mbtl::TransferMatrix& m, const std::string& trial) {
  if (trial == "mean") {
    mbtl::Matrix avg = m.trials[0];
    for (int t = 1; t < m.num_trials(); ++t) avg += m.trials[static_cast<std::size_t>(t)];
    return avg / static_cast<double>(m.num_trials());
  }
  const int t = std::stoi(trial);
  if (t < 0 || t >= m.num_trials()) throw CLI::ValidationError("--trial out of range");
  return m.trials[static_cast<std::size_t>(t)];
}

json slope_fit_json(const mbtl::SlopeFit& fit) {
  json j;
  j["ok"] = fit.ok;
  j["theta_left"] = std::vector<double>(fit.theta_left.begin(), fit.theta_left.end());
  j["theta_right"] = std::vector<double>(fit.theta_right.begin(), fit.theta_right.end());
  j["intercept"] = fit.intercept;
  return j;
}

const char* criterion_str(mbtl::CriterionResult r) {
  switch (r) {
    case mbtl::CriterionResult::kTrue: return "true";
    case mbtl::CriterionResult::kFalse: return "false";
    default: return "insufficient-data";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Source-task selection toolkit for transfer matrices"};
  app.require_subcommand(1);

  // generate ----------------------------------------------------------------
  auto* gen = app.add_subcommand("generate", "Generate a synthetic transfer matrix");
  std::string preset_name, dims_csv, f_csv, g_csv, hl_csv, hr_csv, out_path;
  double offset = 500.0, sigma = 0.0;
  int trials = 1;
  std::uint64_t seed = 0;
  gen->add_option("--preset", preset_name, "Named configuration (see --list-presets)");
  gen->add_option("--dims", dims_csv, "Per-dimension grid sizes, e.g. 8,8,8");
  gen->add_option("--f", f_csv, "Linear policy-quality weights");
  gen->add_option("--g", g_csv, "Linear task-difficulty weights");
  gen->add_option("--h-left", hl_csv, "Dissimilarity weights for the negative part");
  gen->add_option("--h-right", hr_csv, "Dissimilarity weights for the positive part");
  gen->add_option("--offset", offset, "Constant offset (default 500)");
  auto* sigma_opt = gen->add_option("--sigma", sigma, "Gaussian noise standard deviation");
  gen->add_option("--trials", trials, "Number of trials (default 1)");
  gen->add_option("--seed", seed, "Noise seed (default 0)");
  gen->add_option("-o,--output", out_path, "Output JSON path")->required();
  bool list_presets = false;
  gen->add_flag("--list-presets", list_presets, "Print preset names and exit");

  // bootstrap ---------------------------------------------------------------
  auto* boot = app.add_subcommand("bootstrap", "Resample trial rows into new matrices");
  std::string boot_in, boot_out;
  int boot_count = 100;
  std::uint64_t boot_seed = 0;
  boot->add_option("-i,--input", boot_in, "Input matrix JSON")->required();
  boot->add_option("--count", boot_count, "Number of bootstrap matrices (default 100)");
  boot->add_option("--seed", boot_seed, "Bootstrap seed (default 0)");
  boot->add_option("-o,--output", boot_out, "Output JSON path")->required();

  // run ----------------------------------------------------------------------
  auto* run = app.add_subcommand("run", "Run selection methods and write result CSVs");
  std::string run_in, run_out_dir, methods_csv = "mgp,m,gp,random,myopic-oracle";
  std::string epsilons_csv;
  mbtl::ExperimentConfig ec;
  int run_rounds = 0, run_bootstrap = 0;
  std::uint64_t run_seed = 0;
  bool printed_rule = false;
  run->add_option("-i,--input", run_in, "Input matrix JSON")->required();
  run->add_option("--methods", methods_csv,
                  "Comma list of mgp,m,gp,random,myopic-oracle,sequential-oracle");
  run->add_option("-K,--rounds", run_rounds, "Decision rounds (default N)");
  run->add_option("--bootstrap", run_bootstrap, "Bootstrap count before running (default off)");
  run->add_option("--seed", run_seed, "Experiment seed (default 0)");
  run->add_option("--repeats", ec.random_repeats, "Random-baseline repeats (default 50)");
  run->add_option("--beta", ec.beta, "GP-MBTL exploration coefficient (default 4.0)");
  run->add_option("--gap-slope", ec.gap_slope, "Initial gap slope per dimension (default 0.01)");
  run->add_option("--distance-slope", ec.distance_slope,
                  "Clustering distance slope per dimension (default 0.01)");
  run->add_option("--m-samples", ec.m_samples, "Clustering candidate count (default N)");
  run->add_flag("!--no-fast-update", ec.fast_update, "Disable the clustering fast path");
  run->add_option("--epsilon", epsilons_csv, "Comma list of epsilon-suboptimality thresholds");
  run->add_option("--ci-resamples", ec.ci_resamples, "Bootstrap resamples for CIs (default 10000)");
  run->add_option("--threads", ec.threads, "Worker threads (default hardware)");
  run->add_flag("--printed-slope-rule", printed_rule,
                "Use the literal same-sign slope criterion");
  run->add_option("-o,--output", run_out_dir, "Output directory")->required();

  // decompose ----------------------------------------------------------------
  auto* dec = app.add_subcommand("decompose", "Write the f/g/h decomposition as CSV");
  std::string dec_in, dec_out, dec_trial = "mean";
  dec->add_option("-i,--input", dec_in, "Input matrix JSON")->required();
  dec->add_option("--trial", dec_trial, "Trial index or 'mean' (default mean)");
  dec->add_option("-o,--output", dec_out, "Output CSV path")->required();

  // detect ---------------------------------------------------------------
  auto* det = app.add_subcommand("detect", "Run structure detection on a selected-task list");
  std::string det_in, det_selected, det_trial = "0";
  bool det_printed_rule = false;
  det->add_option("-i,--input", det_in, "Input matrix JSON")->required();
  det->add_option("--selected", det_selected, "Comma list of task indices in training order")
      ->required();
  det->add_option("--trial", det_trial, "Trial index or 'mean' (default 0)");
  det->add_flag("--printed-slope-rule", det_printed_rule,
                "Use the literal same-sign slope criterion");

  // report ---------------------------------------------------------------
  auto* rep = app.add_subcommand("report", "Aggregate results CSVs into one normalized score");
  std::vector<std::string> rep_inputs;
  std::string rep_out;
  int rep_resamples = 10000;
  std::uint64_t rep_seed = 0;
  rep->add_option("-i,--input", rep_inputs, "One results.csv per benchmark")->required();
  rep->add_option("--ci-resamples", rep_resamples, "Bootstrap resamples (default 10000)");
  rep->add_option("--seed", rep_seed, "CI bootstrap seed (default 0)");
  rep->add_option("-o,--output", rep_out, "Output CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      if (list_presets) {
        for (const std::string& name : mbtl::preset_names()) std::cout << name << "\n";
        return 0;
      }
      return cmd_generate(preset_name, dims_csv, f_csv, g_csv, hl_csv, hr_csv, offset, sigma,
                          sigma_opt->count() > 0, trials, seed, out_path);
    }
    if (boot->parsed()) {
      const mbtl::TransferMatrix m = mbtl::load_transfer_matrix(boot_in);
      mbtl::save_transfer_matrix(mbtl::bootstrap(m, {boot_count, boot_seed}), boot_out);
      std::cout << "wrote " << boot_out << ": " << boot_count << " matrices\n";
      return 0;
    }
    if (run->parsed()) {
      ec.methods = split_list(methods_csv);
      ec.rounds = run_rounds;
      ec.bootstrap_count = run_bootstrap;
      ec.seed = run_seed;
      for (const auto& tok : split_list(epsilons_csv)) ec.epsilons.push_back(std::stod(tok));
      if (printed_rule) ec.detection.slope_rule = mbtl::SlopeRule::kSameSign;
      const mbtl::TransferMatrix input = mbtl::load_transfer_matrix(run_in);
      if (run_rounds > input.grid.num_tasks())
        throw CLI::ValidationError("--rounds exceeds the task count");
      const mbtl::Experiment e = mbtl::run_experiment(input, ec);
      fs::create_directories(run_out_dir);
      mbtl::write_results_csv(e, (fs::path(run_out_dir) / "results.csv").string());
      mbtl::write_summary_csv(e, ec, (fs::path(run_out_dir) / "summary.csv").string());
      mbtl::write_routing_csv(e, (fs::path(run_out_dir) / "routing.csv").string());
      mbtl::write_epsilon_csv(e, ec, (fs::path(run_out_dir) / "epsilon.csv").string());
      std::cout << "wrote " << run_out_dir << ": " << e.data.num_trials() << " matrices, K="
                << e.rounds << "\n";
      return 0;
    }
    if (dec->parsed()) {
      const mbtl::TransferMatrix m = mbtl::load_transfer_matrix(dec_in);
      const mbtl::Decomposition d = mbtl::decompose(pick_trial(m, dec_trial));
      mbtl::write_decomposition_csv(d, dec_out);
      std::cout << "wrote " << dec_out << "\n";
      return 0;
    }
    if (det->parsed()) {
      const mbtl::TransferMatrix m = mbtl::load_transfer_matrix(det_in);
      const mbtl::Matrix trial = pick_trial(m, det_trial);
      mbtl::DetectionConfig cfg;
      if (det_printed_rule) cfg.slope_rule = mbtl::SlopeRule::kSameSign;
      mbtl::ObservedHistory history;
      history.grid = &m.grid;
      json rounds = json::array();
      for (const auto& tok : split_list(det_selected)) {
        const int x = std::stoi(tok);
        history.selected.push_back(x);
        history.rows.push_back(trial.row(x).transpose());
        const mbtl::DetectionReport r = mbtl::detect_report(history, cfg);
        json jr;
        jr["k"] = r.k;
        jr["task"] = x;
        jr["small_variance"] = criterion_str(r.small_variance);
        jr["peak_std"] = r.peak_std;
        jr["spread_std"] = r.spread_std;
        jr["slope_criterion"] = criterion_str(r.slope);
        jr["fit"] = slope_fit_json(r.fit);
        jr["result"] = r.result == mbtl::Structure::kMountain ? "mountain" : "none";
        rounds.push_back(std::move(jr));
      }
      json doc;
      doc["final"] =
          mbtl::detect(history, cfg) == mbtl::Structure::kMountain ? "mountain" : "none";
      doc["rounds"] = std::move(rounds);
      std::cout << doc.dump(2) << "\n";
      return 0;
    }
    if (rep->parsed()) {
      std::vector<mbtl::BenchmarkScores> benchmarks;
      for (const std::string& path : rep_inputs)
        benchmarks.push_back(mbtl::read_results_csv(path));
      mbtl::write_aggregate_csv(benchmarks, rep_resamples, rep_seed, rep_out);
      std::cout << "wrote " << rep_out << "\n";
      return 0;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
