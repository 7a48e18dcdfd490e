#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "scc/pipeline.hpp"
#include "scc/posterior_summary.hpp"
#include "scc/types.hpp"

namespace scc::app {
namespace {

using nlohmann::json;

struct ChainResult {
  double lpml = 0.0;
  PosteriorSummary summary;
};

struct FitInput {
  std::string name;  // replicate directory name, empty for a single dataset
  CompositionalDataset data;
  LogContrastDesign design;
  SpatialGraph graph;
};

SpatialGraph load_graph(const RunConfig& cfg, const std::vector<std::string>& ids) {
  SpatialGraph graph;
  if (cfg.adjacency) {
    const auto edges = read_edge_list_csv(*cfg.adjacency);
    std::vector<std::string> vertices;
    for (const auto& [a, b] : edges) {
      vertices.push_back(a);
      vertices.push_back(b);
    }
    std::sort(vertices.begin(), vertices.end());
    vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
    // Locations without neighbors appear in the data only.
    for (const auto& id : ids) {
      if (!std::binary_search(vertices.begin(), vertices.end(), id)) vertices.push_back(id);
    }
    graph = SpatialGraph::from_edge_list(edges, vertices);
    std::vector<std::string> unknown;
    const std::vector<std::string> sorted_ids = [&] {
      auto s = ids;
      std::sort(s.begin(), s.end());
      return s;
    }();
    for (const auto& v : graph.labels()) {
      if (!std::binary_search(sorted_ids.begin(), sorted_ids.end(), v)) unknown.push_back(v);
    }
    if (!unknown.empty()) {
      std::string msg = cfg.adjacency->string() + ": ids not present in the data:";
      for (const auto& u : unknown) msg += " " + u;
      throw InputError(msg);
    }
  } else {
    graph = us_state_graph();
  }
  return expand_neighbors(align_graph(graph, ids), cfg.graph_distance);
}

std::string lpml_csv(const std::vector<double>& lambdas, const std::vector<double>& lpmls, std::size_t selected) {
  std::ostringstream out;
  out << "lambda,lpml,selected\n";
  for (std::size_t j = 0; j < lambdas.size(); ++j) {
    out << format_double(lambdas[j]) << ',' << format_double(lpmls[j]) << ',' << (j == selected ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string trace_name(std::size_t j) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "trace_lambda_%02zu.jsonl", j);
  return buf;
}

}  // namespace

std::string replicate_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "replicate_%03d", index);
  return buf;
}

std::vector<fs::path> replicate_dirs(const fs::path& dir) {
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory() && entry.path().filename().string().rfind("replicate_", 0) == 0) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

void cmd_fit(const RunConfig& config, const fs::path& out) {
  config.validate();
  std::vector<FitInput> inputs;
  if (fs::is_directory(config.data)) {
    for (const auto& dir : replicate_dirs(config.data)) {
      inputs.push_back(FitInput{dir.filename().string(), read_dataset_csv(dir / "data.csv"), {}, {}});
    }
    if (inputs.empty()) throw InputError(config.data.string() + ": no replicate_* directories");
  } else {
    inputs.push_back(FitInput{"", read_dataset_csv(config.data), {}, {}});
  }
  for (auto& in : inputs) {
    in.design = make_design(in.data, config.zero_pseudocount);
    in.graph = load_graph(config, in.data.ids);
  }

  FitConfig base;
  try {
    base = config.fit_config().resolved_for(inputs.front().design);
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("fit config: hyper: ") + e.what());
  }
  fs::create_directories(out);
  write_json_file(out / "resolved_config.json", to_json(config, base));

  const std::size_t L = config.lambda_grid.size();
  std::vector<ChainResult> results(inputs.size() * L);
  parallel_for(results.size(), config.threads, [&](std::size_t task) {
    const FitInput& in = inputs[task / L];
    const std::size_t j = task % L;
    FitConfig cfg = base;
    cfg.lambda = config.lambda_grid[j];
    cfg.seed = derive_seed(base.seed, j);
    ChainTrace trace;
    try {
      trace = run_chain(in.design, in.graph, cfg);
    } catch (const NumericalError& e) {
      throw NumericalError((in.name.empty() ? std::string() : in.name + ": ") + e.what());
    }
    if (config.write_traces) write_trace_jsonl(out / in.name / "traces" / trace_name(j), trace);
    results[task].lpml = lpml(trace);
    results[task].summary = summarize(trace, in.design.projection.m1);
  });

  for (std::size_t r = 0; r < inputs.size(); ++r) {
    const FitInput& in = inputs[r];
    std::vector<double> lpmls(L);
    for (std::size_t j = 0; j < L; ++j) lpmls[j] = results[r * L + j].lpml;
    const std::size_t selected = select_by_lpml(config.lambda_grid, lpmls);
    FitReport report{in.data.ids, config.lambda_grid[selected], config.lambda_grid, lpmls,
                     results[r * L + selected].summary};
    const fs::path dir = out / in.name;
    write_text_file(dir / "lpml.csv", lpml_csv(config.lambda_grid, lpmls, selected));
    write_json_file(dir / "summary.json", to_json(report));
    write_partition_csv(dir / "clusters.csv", in.data.ids, report.summary.z_hat);
  }
}

void cmd_simulate(const SimulateConfig& config, const fs::path& out, int threads) {
  const SimulationDesign& design = config.design;
  design.validate();
  SpatialGraph graph;
  if (config.adjacency) {
    const auto edges = read_edge_list_csv(*config.adjacency);
    graph = SpatialGraph::from_edge_list(edges, design.ids);
  } else {
    const SpatialGraph states = us_state_graph();
    for (const auto& id : design.ids) {
      if (!states.index_of(id)) {
        throw InputError("simulate config: id '" + id + "' is not a bundled state code; supply 'adjacency'");
      }
    }
    graph = align_graph(states, design.ids);
  }

  fs::create_directories(out);
  write_json_file(out / "design.json", to_json(design));
  write_edge_list_csv(out / "adjacency.csv", graph.edges());
  write_partition_csv(out / "partition.csv", design.ids, design.partition);

  parallel_for(static_cast<std::size_t>(design.replicates), threads, [&](std::size_t r) {
    const SimulatedDataset sim = generate_dataset(design, static_cast<int>(r));
    const fs::path dir = out / replicate_name(static_cast<int>(r) + 1);
    write_dataset_csv(dir / "data.csv", sim.data);
    write_json_file(dir / "truth.json", to_json(Truth{sim.data.ids, sim.truth, sim.beta_tilde, sim.eta}));
  });
}

EvaluationReport evaluate(const EvaluateConfig& config) {
  std::vector<std::pair<std::string, fs::path>> fits, truths;
  auto collect = [](const fs::path& root, const char* file) {
    std::vector<std::pair<std::string, fs::path>> found;
    if (fs::is_regular_file(root / file)) found.emplace_back("", root / file);
    for (const auto& dir : replicate_dirs(root)) {
      if (fs::is_regular_file(dir / file)) found.emplace_back(dir.filename().string(), dir / file);
    }
    return found;
  };
  if (!fs::is_directory(config.fits)) throw InputError("fits directory not found: " + config.fits.string());
  if (!fs::is_directory(config.truth)) throw InputError("truth directory not found: " + config.truth.string());
  fits = collect(config.fits, "summary.json");
  truths = collect(config.truth, "truth.json");
  if (fits.empty()) throw InputError(config.fits.string() + ": no summary.json found");
  if (truths.empty()) throw InputError(config.truth.string() + ": no truth.json found");
  if (fits.size() != truths.size()) {
    throw InputError("replicate count mismatch: " + std::to_string(fits.size()) + " fits vs " +
                     std::to_string(truths.size()) + " truths");
  }

  EvaluationReport report;
  std::vector<Matrix> beta_est, eta_est;
  Matrix beta_truth, eta_truth;
  std::vector<double> ris;
  for (std::size_t r = 0; r < fits.size(); ++r) {
    if (fits[r].first != truths[r].first) {
      throw InputError("replicate mismatch: '" + fits[r].first + "' vs '" + truths[r].first + "'");
    }
    const FitReport fit = fit_report_from_json(read_json_file(fits[r].second));
    const Truth truth = truth_from_json(read_json_file(truths[r].second));

    // Reorder the fit to the truth's location order.
    std::vector<Label> z_fit(truth.ids.size());
    std::vector<std::size_t> fit_row(truth.ids.size());
    if (fit.ids.size() != truth.ids.size()) throw InputError(fits[r].second.string() + ": location count differs from truth");
    for (std::size_t i = 0; i < truth.ids.size(); ++i) {
      const auto it = std::find(fit.ids.begin(), fit.ids.end(), truth.ids[i]);
      if (it == fit.ids.end()) throw InputError(fits[r].second.string() + ": missing id '" + truth.ids[i] + "'");
      fit_row[i] = static_cast<std::size_t>(it - fit.ids.begin());
      z_fit[i] = fit.summary.z_hat[fit_row[i]];
    }
    const Matrix coef = location_coefficients(fit.summary);
    if (coef.cols() != truth.beta_tilde.cols() || fit.summary.eta_hat.size() != truth.eta.size()) {
      throw InputError(fits[r].second.string() + ": coefficient dimensions differ from truth");
    }
    Matrix aligned(coef.rows(), coef.cols());
    for (std::size_t i = 0; i < fit_row.size(); ++i) {
      aligned.row(static_cast<Eigen::Index>(i)) = coef.row(static_cast<Eigen::Index>(fit_row[i]));
    }
    if (r == 0) {
      beta_truth = truth.beta_tilde;
      eta_truth = truth.eta.transpose();
    } else if (beta_truth.rows() != truth.beta_tilde.rows() || !(beta_truth - truth.beta_tilde).isZero(0.0) ||
               eta_truth.cols() != truth.eta.size()) {
      throw InputError(truths[r].second.string() + ": true coefficients differ between replicates");
    }
    beta_est.push_back(aligned);
    eta_est.push_back(fit.summary.eta_hat.transpose());

    ReplicateMetrics m{fits[r].first, rand_index(z_fit, truth.labels), fit.summary.k_hat, fit.lambda};
    ris.push_back(m.rand_index);
    ++report.k_hat_histogram[m.k_hat];
    report.replicates.push_back(std::move(m));
  }
  report.median_rand_index = quantile(ris, 0.5);
  report.beta_tilde = estimation_metrics(beta_est, beta_truth);
  report.eta = estimation_metrics(eta_est, eta_truth);
  return report;
}

json to_json(const EvaluationReport& report) {
  auto metrics = [](const EstimationMetrics& m) {
    return json{{"mab", to_json(m.mab)}, {"msd", m.msd ? to_json(*m.msd) : json(nullptr)}, {"mmse", to_json(m.mmse)}};
  };
  json reps = json::array();
  for (const auto& r : report.replicates) {
    reps.push_back({{"replicate", r.name}, {"rand_index", r.rand_index}, {"k_hat", r.k_hat}, {"lambda", r.lambda}});
  }
  json hist = json::object();
  for (const auto& [k, count] : report.k_hat_histogram) hist[std::to_string(k)] = count;
  return {
      {"replicates", reps},
      {"median_rand_index", report.median_rand_index},
      {"k_hat_histogram", hist},
      {"beta_tilde", metrics(report.beta_tilde)},
      {"eta", metrics(report.eta)},
  };
}

void cmd_evaluate(const EvaluateConfig& config, const fs::path& out) {
  const EvaluationReport report = evaluate(config);
  fs::create_directories(out);
  write_json_file(out / "metrics.json", to_json(report));
  std::ostringstream csv;
  csv << "replicate,rand_index,k_hat,lambda\n";
  for (const auto& r : report.replicates) {
    csv << r.name << ',' << format_double(r.rand_index) << ',' << r.k_hat << ',' << format_double(r.lambda) << '\n';
  }
  write_text_file(out / "ri.csv", csv.str());
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Spatially clustered compositional regression"};
  app.require_subcommand(1);

  struct Common {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
  };
  Common fit_opts, sim_opts, eval_opts;
  auto add_common = [](CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "JSON configuration file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", c.out, "Output directory")->required();
    cmd->add_option("--seed", c.seed, "Override the configured seed");
    cmd->add_option("--threads", c.threads, "Concurrent chains")->check(CLI::PositiveNumber);
  };
  CLI::App* fit = app.add_subcommand("fit", "Fit the model over a lambda grid");
  CLI::App* simulate = app.add_subcommand("simulate", "Generate replicate datasets");
  CLI::App* evaluate_cmd = app.add_subcommand("evaluate", "Score fits against simulation truth");
  add_common(fit, fit_opts);
  add_common(simulate, sim_opts);
  add_common(evaluate_cmd, eval_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  const Common& opts = fit->parsed() ? fit_opts : simulate->parsed() ? sim_opts : eval_opts;
  const fs::path out(opts.out);
  try {
    const fs::path config_path(opts.config);
    const json j = read_json_file(config_path);
    const fs::path base = config_path.parent_path();
    if (fit->parsed()) {
      RunConfig cfg = parse_run_config(j, base);
      if (opts.seed) cfg.seed = *opts.seed;
      if (opts.threads) cfg.threads = *opts.threads;
      cmd_fit(cfg, out);
    } else if (simulate->parsed()) {
      SimulateConfig cfg = parse_simulate_config(j, base);
      if (opts.seed) cfg.design.seed = *opts.seed;
      cmd_simulate(cfg, out, opts.threads.value_or(1));
    } else {
      cmd_evaluate(parse_evaluate_config(j, base), out);
    }
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    try {
      write_json_file(out / "diagnostics.json", {{"status", "numerical_failure"}, {"message", e.what()}});
    } catch (...) {
    }
    return kExitNumerical;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitOk;
}

}  // namespace scc::app
