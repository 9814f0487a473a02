// Copyright 2026 The toptwo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "toptwo/config.hpp"
#include "toptwo/csv.hpp"
#include "toptwo/exponent.hpp"
#include "toptwo/sim.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string resolve_out_dir(const std::string& flag_value,
                            const std::string& config_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("TOPTWO_OUT"); env != nullptr && *env) {
    return env;
  }
  return config_value;
}

std::vector<double> summary_levels(const toptwo::StoppingSpec& stopping) {
  std::set<double> levels = {0.5, 0.75, 0.9, 0.95, 0.99, 0.999};
  if (stopping.mode == toptwo::StoppingSpec::Mode::kConfidence) {
    levels.insert(1.0 - stopping.delta);
  }
  return {levels.begin(), levels.end()};
}

ordered_json solution_json(const toptwo::ExponentSolution& sol) {
  ordered_json j;
  j["beta"] = sol.beta;
  j["gamma"] = sol.gamma;
  j["psi"] = sol.psi;
  ordered_json cs = ordered_json::array();
  for (int i = 0; i < static_cast<int>(sol.c_values.size()); ++i) {
    if (i == sol.best) {
      cs.push_back(nullptr);
    } else {
      cs.push_back(sol.c_values[i]);
    }
  }
  j["c_values"] = std::move(cs);
  j["best"] = sol.best;
  return j;
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

int cmd_solve(const std::string& config_path, const std::string& out_flag) {
  const toptwo::ExperimentConfig cfg = toptwo::load_config(config_path);
  const fs::path out_dir = resolve_out_dir(out_flag, cfg.out_dir);
  fs::create_directories(out_dir);

  ordered_json j;
  j["instance"] = {{"kind", cfg.instance.model.kind_name()},
                   {"means", cfg.instance.means}};
  if (cfg.instance.model.kind == toptwo::ModelKind::kGaussian) {
    j["instance"]["sigma"] = cfg.instance.model.sigma;
  }

  const toptwo::ExponentSolution star =
      cfg.solver.solve_star ? toptwo::solve_gamma_star(cfg.instance)
                            : toptwo::solve_gamma_beta(cfg.instance, 0.5);
  j["beta_star"] = star.beta;
  j["gamma_star"] = star.gamma;
  j["psi_star"] = star.psi;

  ordered_json solutions = ordered_json::array();
  for (double beta : cfg.solver.betas) {
    const toptwo::ExponentSolution sol =
        toptwo::solve_gamma_beta(cfg.instance, beta, cfg.solver.tolerance);
    ordered_json js = solution_json(sol);
    js["lemma3_ratio"] = toptwo::ratio_bound(beta, star.beta);
    solutions.push_back(std::move(js));
  }
  j["solutions"] = std::move(solutions);

  const auto gaps = cfg.instance.suboptimal_gaps();
  ordered_json bounds;
  if (cfg.instance.model.kind == toptwo::ModelKind::kGaussian) {
    bounds["subgaussian"] =
        toptwo::bound_subgaussian(cfg.instance.model.sigma, gaps);
    bounds["uniform_rate"] = toptwo::uniform_rate_gaussian(
        gaps, cfg.instance.k(), cfg.instance.model.sigma);
  } else {
    // Bounded observations in [0, 1] are sub-Gaussian with sigma = 1/2.
    bounds["subgaussian"] = toptwo::bound_subgaussian(0.5, gaps);
    bounds["uniform_rate"] = nullptr;
  }
  j["bounds"] = std::move(bounds);

  write_text_file(out_dir / "exponents.json", j.dump(2) + "\n");
  std::printf("solve: beta_star=%.6f gamma_star=%.6g -> %s\n", star.beta,
              star.gamma, (out_dir / "exponents.json").c_str());
  return 0;
}

int run_simulation(const toptwo::ExperimentConfig& cfg, const fs::path& out_dir,
                   int threads, bool write_traces,
                   std::vector<toptwo::Summary>* summaries_out,
                   std::vector<std::vector<toptwo::Trace>>* traces_out) {
  fs::create_directories(out_dir);
  const std::vector<double> levels = summary_levels(cfg.stopping);
  std::vector<toptwo::Summary> summaries;

  toptwo::TrialOptions options;
  options.stopping = cfg.stopping;
  options.recording = cfg.recording;
  const toptwo::BeliefState init = cfg.make_belief();

  for (const toptwo::RuleEntry& entry : cfg.rules) {
    options.quadrature_points = entry.cfg.quadrature_points;
    auto factory = [&cfg, &entry]() { return cfg.make_rule_instance(entry); };
    std::vector<toptwo::Trace> traces =
        toptwo::run_many(cfg.instance, factory, init, options, cfg.seed_count,
                         cfg.base_seed, threads);

    if (write_traces) {
      for (const toptwo::Trace& t : traces) {
        const fs::path dir = out_dir / entry.name / std::to_string(t.seed);
        fs::create_directories(dir);
        std::ofstream os(dir / "trace.csv", std::ios::binary);
        toptwo::write_trace_csv(os, t);
      }
    }

    const toptwo::Summary summary = toptwo::aggregate(traces, levels);
    std::string shares;
    for (double s : summary.mean_share) {
      shares += (shares.empty() ? "" : " ") + toptwo::format_double(s);
    }
    std::printf("rule=%s mean_stop=%.1f censored=%d/%d psibar=[%s]\n",
                summary.rule.c_str(), summary.mean_length, summary.censored,
                summary.trials, shares.c_str());
    if (2 * summary.censored > summary.trials) {
      std::printf("warning: rule=%s hit the step cap in %d of %d trials\n",
                  summary.rule.c_str(), summary.censored, summary.trials);
    }
    summaries.push_back(summary);
    if (traces_out != nullptr) traces_out->push_back(std::move(traces));
  }

  std::ofstream os(out_dir / "summary.csv", std::ios::binary);
  toptwo::write_summary_csv(os, summaries);
  if (summaries_out != nullptr) *summaries_out = std::move(summaries);
  return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& out_flag,
                 int seeds_override, int threads) {
  toptwo::ExperimentConfig cfg = toptwo::load_config(config_path);
  if (cfg.rules.empty()) {
    throw toptwo::ConfigError("simulate: config lists no rules");
  }
  if (seeds_override > 0) cfg.seed_count = seeds_override;
  const fs::path out_dir = resolve_out_dir(out_flag, cfg.out_dir);
  return run_simulation(cfg, out_dir, threads, /*write_traces=*/true, nullptr,
                        nullptr);
}

toptwo::ExperimentConfig benchmark_config(double delta, long cap,
                                          const std::vector<std::string>& rules,
                                          int seeds) {
  toptwo::ExperimentConfig cfg;
  cfg.instance.model = toptwo::ObservationModel::bernoulli();
  cfg.instance.means = {0.1, 0.2, 0.3, 0.4, 0.5};
  cfg.stopping = toptwo::StoppingSpec::confidence(delta, cap);
  cfg.seed_count = seeds;
  cfg.base_seed = 20260401;
  for (const std::string& name : rules) {
    toptwo::RuleEntry entry;
    entry.name = name;
    cfg.rules.push_back(entry);
  }
  return cfg;
}

int cmd_reproduce(const std::string& figure, const std::string& out_flag,
                  int seeds, int threads) {
  const fs::path out_dir = resolve_out_dir(out_flag, "out");
  fs::create_directories(out_dir);

  const bool fig1a = figure == "fig1a";
  const bool fig1 = fig1a || figure == "fig1b";
  const std::vector<std::string> rules =
      fig1a ? std::vector<std::string>{"ts", "ttts"}
            : std::vector<std::string>{"ttts", "ttps", "ttvs", "uniform"};
  const double delta = fig1a ? 0.01 : 0.001;
  toptwo::ExperimentConfig cfg =
      benchmark_config(delta, 50000, rules, seeds > 0 ? seeds : 100);

  std::vector<toptwo::Summary> summaries;
  run_simulation(cfg, out_dir, threads, /*write_traces=*/false, &summaries,
                 nullptr);

  std::ofstream os(out_dir / (figure + ".csv"), std::ios::binary);
  if (fig1) {
    os << "rule,level,mean_samples,se,n_censored\n";
    for (const toptwo::Summary& s : summaries) {
      for (const toptwo::LevelStat& stat : s.hits) {
        if (stat.level > 1.0 - delta) continue;
        os << s.rule << ',' << toptwo::format_double(stat.level) << ','
           << toptwo::format_double(stat.mean) << ','
           << toptwo::format_double(stat.se) << ',' << stat.censored << "\n";
      }
    }
  } else if (figure == "fig2a") {
    os << "rule,arm,mean_count,share\n";
    for (const toptwo::Summary& s : summaries) {
      for (int i = 0; i < static_cast<int>(s.mean_share.size()); ++i) {
        os << s.rule << ',' << i << ','
           << toptwo::format_double(s.mean_share[i] * s.mean_length) << ','
           << toptwo::format_double(s.mean_share[i]) << "\n";
      }
    }
  } else {  // fig2b
    os << "rule,arm,log10_inv_alpha\n";
    for (const toptwo::Summary& s : summaries) {
      for (int i = 0; i < static_cast<int>(s.mean_log10_inv.size()); ++i) {
        os << s.rule << ',' << i << ','
           << toptwo::format_double(s.mean_log10_inv[i]) << "\n";
      }
    }
  }
  std::printf("reproduce: wrote %s\n", (out_dir / (figure + ".csv")).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Best-arm identification engine: allocation rules, optimal "
               "exponents, and a simulation harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string figure;
  int seeds = 0;
  int threads = 0;

  CLI::App* solve = app.add_subcommand("solve", "Solve for optimal exponents");
  solve->add_option("--config", config_path, "Experiment config (JSON)")
      ->required();
  solve->add_option("--out", out_dir, "Output directory");

  CLI::App* simulate =
      app.add_subcommand("simulate", "Run rule x seed trials, emit CSVs");
  simulate->add_option("--config", config_path, "Experiment config (JSON)")
      ->required();
  simulate->add_option("--out", out_dir, "Output directory");
  simulate->add_option("--seeds", seeds, "Override seed count");
  simulate->add_option("--threads", threads, "Worker threads (0 = all cores)");

  CLI::App* reproduce = app.add_subcommand(
      "reproduce", "Emit the built-in benchmark figure data");
  reproduce
      ->add_option("figure", figure, "One of fig1a, fig1b, fig2a, fig2b")
      ->required()
      ->check(CLI::IsMember({"fig1a", "fig1b", "fig2a", "fig2b"}));
  reproduce->add_option("--out", out_dir, "Output directory");
  reproduce->add_option("--seeds", seeds, "Override seed count");
  reproduce->add_option("--threads", threads, "Worker threads (0 = all cores)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(config_path, out_dir);
    if (simulate->parsed()) {
      return cmd_simulate(config_path, out_dir, seeds, threads);
    }
    return cmd_reproduce(figure, out_dir, seeds, threads);
  } catch (const toptwo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const toptwo::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
