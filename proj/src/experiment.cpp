#include "maxstab/experiment.hpp"

#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <ostream>
#include <sstream>

#include <omp.h>

#include "maxstab/errors.hpp"
#include "maxstab/io.hpp"
#include "maxstab/partition.hpp"

namespace maxstab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string cell_key(const ExperimentConfig& cfg, const Cell& cell) {
  return to_string(cfg.study) + "|" + to_string(cfg.model) + "|" + format_double(cell.alpha) + "|" +
         std::to_string(cell.d) + "|" + std::to_string(cell.n);
}

/// Runs body(i) for i in [0, count), serially or with OpenMP, and rethrows the
/// first exception raised by any iteration.
template <class Body>
void for_each_index(std::int64_t count, Execution exec, Body&& body) {
  if (exec == Execution::Serial) {
    for (std::int64_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(maxstab_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

std::vector<LikelihoodKind> applicable_kinds(const ExperimentConfig& cfg, const Cell& cell, ResultTable& table) {
  std::vector<LikelihoodKind> out;
  for (LikelihoodKind kind : cfg.kinds) {
    try {
      check_kind_applicable(kind, cell.n, cell.d);
      out.push_back(kind);
    } catch (const std::exception& e) {
      table.skipped.push_back("skipped " + to_string(kind) + " at alpha=" + format_double(cell.alpha) +
                              " d=" + std::to_string(cell.d) + " n=" + std::to_string(cell.n) + ": " + e.what());
    }
  }
  return out;
}

ResultTable run_fitting_study(const ExperimentConfig& cfg, Execution exec) {
  cfg.validate();
  ResultTable table;
  for (const Cell& cell : expand_cells(cfg)) {
    const auto kinds = applicable_kinds(cfg, cell, table);
    if (kinds.empty()) continue;
    const ReplicationBatch batch = run_replications(cfg, cell, kinds, exec);
    for (std::size_t k = 0; k < kinds.size(); ++k) {
      ResultRow row;
      row.study = to_string(cfg.study);
      row.model = to_string(cfg.model);
      row.kind = to_string(kinds[k]);
      row.alpha = cell.alpha;
      row.d = cell.d;
      row.n = cell.n;
      std::vector<double> ok;
      for (std::size_t r = 0; r < batch.estimates.size(); ++r) {
        const double est = batch.estimates[r][k];
        if (std::isnan(est)) {
          ++row.failures;
          continue;
        }
        ok.push_back(est);
        if (batch.boundary[r][k]) ++row.boundary_hits;
      }
      row.reps = static_cast<int>(ok.size());
      if (ok.size() >= 2) row.bias = bias_summary(ok, cell.alpha);
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

std::string opt_field(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

}  // namespace

std::string to_string(Study study) {
  switch (study) {
    case Study::BiasTable:
      return "bias_table";
    case Study::TermCount:
      return "term_count";
    case Study::Scaling:
      return "scaling";
    case Study::PartitionProb:
      return "partition_prob";
  }
  return "unknown";
}

Study parse_study(std::string_view text) {
  if (text == "bias_table" || text == "bias-study") return Study::BiasTable;
  if (text == "term_count" || text == "term-count") return Study::TermCount;
  if (text == "scaling" || text == "scaling-study") return Study::Scaling;
  if (text == "partition_prob" || text == "partition-prob") return Study::PartitionProb;
  throw ValidationError("unknown study '" + std::string(text) + "'");
}

ExperimentConfig ExperimentConfig::defaults(Study study) {
  ExperimentConfig cfg;
  cfg.study = study;
  cfg.alphas = {0.1, 0.4, 0.7, 0.9};
  cfg.dims = {6, 8, 10};
  cfg.block_sizes = {50, 100, 500};
  cfg.kinds = {LikelihoodKind::StephensonTawn, LikelihoodKind::SecondOrder};
  switch (study) {
    case Study::BiasTable:
      break;
    case Study::TermCount:
      cfg.num_obs = 10000;
      cfg.kinds = {LikelihoodKind::SecondOrder};
      break;
    case Study::Scaling:
      cfg.alphas = {0.9};
      cfg.dims = {10, 20, 30, 40};
      cfg.block_sizes.clear();
      cfg.scaling_rules = {"half-square", "double"};
      cfg.kinds = {LikelihoodKind::StephensonTawn};
      break;
    case Study::PartitionProb:
      cfg.alphas = {0.5, 1.0};
      cfg.dims = {3};
      cfg.block_sizes = {50};
      cfg.kinds.clear();
      break;
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j, std::optional<Study> study) {
  Study s = study ? *study : parse_study(j.at("study").get<std::string>());
  if (study && j.contains("study") && parse_study(j.at("study").get<std::string>()) != *study) {
    throw ValidationError("config study '" + j.at("study").get<std::string>() + "' does not match the subcommand");
  }
  ExperimentConfig cfg = defaults(s);
  try {
    if (j.contains("model")) cfg.model = parse_model_tag(j.at("model").get<std::string>());
    if (j.contains("alphas")) cfg.alphas = j.at("alphas").get<std::vector<double>>();
    if (j.contains("dims")) cfg.dims = j.at("dims").get<std::vector<int>>();
    if (j.contains("block_sizes")) cfg.block_sizes = j.at("block_sizes").get<std::vector<std::int64_t>>();
    if (j.contains("pairs")) cfg.pairs = j.at("pairs").get<std::vector<std::pair<int, std::int64_t>>>();
    if (j.contains("scaling_rules")) cfg.scaling_rules = j.at("scaling_rules").get<std::vector<std::string>>();
    if (j.contains("num_obs")) cfg.num_obs = j.at("num_obs").get<int>();
    if (j.contains("replications")) cfg.replications = j.at("replications").get<int>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("kinds")) {
      cfg.kinds.clear();
      for (const auto& k : j.at("kinds")) cfg.kinds.push_back(parse_likelihood_kind(k.get<std::string>()));
    }
    if (j.contains("tol")) cfg.tol = j.at("tol").get<double>();
    if (j.contains("blocks")) cfg.blocks = j.at("blocks").get<std::int64_t>();
    if (j.contains("proxy_blocks")) cfg.proxy_blocks = j.at("proxy_blocks").get<std::int64_t>();
    if (j.contains("proxy_factor")) cfg.proxy_factor = j.at("proxy_factor").get<std::int64_t>();
    if (j.contains("output")) cfg.output = j.at("output").get<std::string>();
    if (j.contains("workers")) cfg.workers = j.at("workers").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed config: ") + e.what());
  }
  return cfg;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["study"] = to_string(study);
  j["model"] = to_string(model);
  j["alphas"] = alphas;
  j["dims"] = dims;
  j["block_sizes"] = block_sizes;
  j["pairs"] = pairs;
  j["scaling_rules"] = scaling_rules;
  j["num_obs"] = num_obs;
  j["replications"] = replications;
  j["seed"] = seed;
  std::vector<std::string> kind_names;
  for (LikelihoodKind k : kinds) kind_names.push_back(to_string(k));
  j["kinds"] = kind_names;
  j["tol"] = tol;
  j["blocks"] = blocks;
  j["proxy_blocks"] = proxy_blocks;
  j["proxy_factor"] = proxy_factor;
  j["output"] = output;
  j["workers"] = workers;
  return j;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ValidationError("invalid config: " + msg); };
  if (alphas.empty()) fail("alphas is empty");
  for (double a : alphas) {
    if (!(a > 0.0 && a <= 1.0)) fail("alpha " + format_double(a) + " outside (0, 1]");
  }
  for (int d : dims) {
    if (d < 1 || d > kMaxDim) fail("dimension " + std::to_string(d) + " outside [1, 64]");
  }
  for (std::int64_t n : block_sizes) {
    if (n < 1) fail("block size must be positive");
  }
  for (const auto& [d, n] : pairs) {
    if (d < 1 || d > kMaxDim || n < 1) fail("invalid (d, n) pair");
  }
  for (const auto& rule : scaling_rules) {
    if (rule != "half-square" && rule != "double") fail("unknown scaling rule '" + rule + "'");
  }
  if (num_obs < 1) fail("num_obs must be positive");
  if (!(tol > 0.0)) fail("tol must be positive");
  if (workers < 0) fail("workers must be non-negative");
  switch (study) {
    case Study::BiasTable:
    case Study::Scaling:
      if (replications < 2) fail("replications must be at least 2");
      if (kinds.empty()) fail("no likelihood kinds selected");
      break;
    case Study::TermCount:
      break;
    case Study::PartitionProb:
      for (int d : dims) {
        if (d > 4) fail("partition-probability study is limited to d <= 4");
      }
      if (blocks < 2 || proxy_blocks < 2) fail("blocks and proxy_blocks must be at least 2");
      if (proxy_factor < 1000) fail("proxy_factor must be at least 1000");
      break;
  }
  if (expand_cells(*this).empty()) fail("configuration has no cells");
}

std::vector<Cell> expand_cells(const ExperimentConfig& cfg) {
  std::vector<Cell> cells;
  for (double alpha : cfg.alphas) {
    if (cfg.study == Study::Scaling) {
      if (!cfg.pairs.empty()) {
        for (const auto& [d, n] : cfg.pairs) cells.push_back({alpha, d, n});
        continue;
      }
      for (const auto& rule : cfg.scaling_rules) {
        for (int d : cfg.dims) {
          const std::int64_t n = rule == "double" ? 2 * std::int64_t{d} : std::int64_t{d} * d / 2;
          cells.push_back({alpha, d, n});
        }
      }
      continue;
    }
    for (int d : cfg.dims) {
      for (std::int64_t n : cfg.block_sizes) cells.push_back({alpha, d, n});
    }
  }
  return cells;
}

RngStream cell_stream(const ExperimentConfig& cfg, const Cell& cell) {
  return RngStream(cfg.seed, fnv1a(cell_key(cfg, cell)));
}

const ResultRow* ResultTable::find(std::string_view kind, double alpha, int d, std::int64_t n) const {
  for (const auto& row : rows) {
    if (row.kind == kind && row.alpha == alpha && row.d == d && row.n == n) return &row;
  }
  return nullptr;
}

void write_results_csv(std::ostream& out, const ResultTable& table) {
  out << "study,model,kind,alpha,d,n,reps,mean_bias,sd,mc_se,t_stat,significant,mean_terms,"
         "failures,boundary_hits,p_rn,p_r,ratio,ratio_se,ratio_exact,proxy_bias\n";
  for (const auto& r : table.rows) {
    out << r.study << ',' << r.model << ',' << r.kind << ',' << format_double(r.alpha) << ',' << r.d << ','
        << (r.n == 0 ? std::string("pooled") : std::to_string(r.n)) << ',' << r.reps << ',';
    if (r.bias) {
      out << format_double(r.bias->mean_bias) << ',' << format_double(r.bias->sample_sd) << ','
          << format_double(r.bias->mc_se) << ',' << format_double(r.bias->t_statistic) << ','
          << (r.bias->significant_5pct ? 1 : 0) << ',';
    } else {
      out << ",,,,,";
    }
    out << opt_field(r.mean_terms) << ',' << r.failures << ',' << r.boundary_hits << ',' << opt_field(r.p_rn) << ','
        << opt_field(r.p_r) << ',' << opt_field(r.ratio) << ',' << opt_field(r.ratio_se) << ','
        << opt_field(r.ratio_exact) << ',' << opt_field(r.proxy_bias) << '\n';
  }
}

std::string results_csv(const ResultTable& table) {
  std::ostringstream out;
  write_results_csv(out, table);
  return out.str();
}

ReplicationBatch run_replications(const ExperimentConfig& cfg, const Cell& cell,
                                  const std::vector<LikelihoodKind>& kinds, Execution exec) {
  const RngStream base = cell_stream(cfg, cell);
  const LogisticParam theta(cell.alpha);
  FitOptions options;
  options.tol = cfg.tol;
  ReplicationBatch batch;
  batch.estimates.resize(static_cast<std::size_t>(cfg.replications));
  batch.boundary.resize(static_cast<std::size_t>(cfg.replications));
  for_each_index(cfg.replications, exec, [&](std::int64_t r) {
    const Dataset ds =
        sample_dataset(cfg.num_obs, cell.n, cell.d, cfg.model, theta, base.child(static_cast<std::uint64_t>(r)));
    const PreparedDataset data(ds);
    std::vector<double> est(kinds.size(), kNaN);
    std::vector<bool> hit(kinds.size(), false);
    for (std::size_t k = 0; k < kinds.size(); ++k) {
      try {
        const FitResult res = fit(data, kinds[k], options);
        est[k] = res.alpha_hat;
        hit[k] = res.boundary;
      } catch (const FitFailure&) {
        // recorded as NaN and counted as a failure
      }
    }
    batch.estimates[static_cast<std::size_t>(r)] = std::move(est);
    batch.boundary[static_cast<std::size_t>(r)] = std::move(hit);
  });
  return batch;
}

double mean_term_count(const ExperimentConfig& cfg, const Cell& cell, Execution exec) {
  const RngStream base = cell_stream(cfg, cell);
  const LogisticParam theta(cell.alpha);
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(cfg.num_obs));
  for_each_index(cfg.num_obs, exec, [&](std::int64_t i) {
    RngStream rng = base.child(static_cast<std::uint64_t>(i));
    const auto obs = sample_max_block(cell.n, cell.d, cfg.model, theta, rng);
    counts[static_cast<std::size_t>(i)] = 1 + refinement_count(obs.partition);
  });
  BigCount total = 0;
  for (std::uint64_t c : counts) total += c;
  return static_cast<double>(static_cast<long double>(total) / static_cast<long double>(counts.size()));
}

double singleton_fraction(ModelTag model, double alpha, int d, std::int64_t n, std::int64_t blocks,
                          const RngStream& rng, Execution exec) {
  const LogisticParam theta(alpha);
  std::vector<std::uint8_t> hit(static_cast<std::size_t>(blocks), 0);
  for_each_index(blocks, exec, [&](std::int64_t b) {
    RngStream child = rng.child(static_cast<std::uint64_t>(b));
    hit[static_cast<std::size_t>(b)] = sample_max_block(n, d, model, theta, child).partition.is_singletons() ? 1 : 0;
  });
  std::int64_t count = 0;
  for (auto h : hit) count += h;
  return static_cast<double>(count) / static_cast<double>(blocks);
}

ResultTable run_bias_study(const ExperimentConfig& cfg, Execution exec) {
  if (cfg.study != Study::BiasTable) throw ValidationError("run_bias_study needs a bias_table config");
  return run_fitting_study(cfg, exec);
}

ResultTable run_scaling_study(const ExperimentConfig& cfg, Execution exec) {
  if (cfg.study != Study::Scaling) throw ValidationError("run_scaling_study needs a scaling config");
  return run_fitting_study(cfg, exec);
}

ResultTable run_term_count(const ExperimentConfig& cfg, Execution exec) {
  if (cfg.study != Study::TermCount) throw ValidationError("run_term_count needs a term_count config");
  cfg.validate();
  ResultTable table;
  for (double alpha : cfg.alphas) {
    for (int d : cfg.dims) {
      double pooled = 0.0;
      for (std::int64_t n : cfg.block_sizes) {
        const Cell cell{alpha, d, n};
        ResultRow row;
        row.study = to_string(cfg.study);
        row.model = to_string(cfg.model);
        row.kind = to_string(LikelihoodKind::SecondOrder);
        row.alpha = alpha;
        row.d = d;
        row.n = n;
        row.reps = cfg.num_obs;
        row.mean_terms = mean_term_count(cfg, cell, exec);
        pooled += *row.mean_terms;
        table.rows.push_back(std::move(row));
      }
      if (cfg.block_sizes.size() > 1) {
        ResultRow row;
        row.study = to_string(cfg.study);
        row.model = to_string(cfg.model);
        row.kind = to_string(LikelihoodKind::SecondOrder);
        row.alpha = alpha;
        row.d = d;
        row.n = 0;
        row.reps = cfg.num_obs * static_cast<int>(cfg.block_sizes.size());
        row.mean_terms = pooled / static_cast<double>(cfg.block_sizes.size());
        table.rows.push_back(std::move(row));
      }
    }
  }
  return table;
}

ResultTable run_partition_prob(const ExperimentConfig& cfg, Execution exec) {
  if (cfg.study != Study::PartitionProb) throw ValidationError("run_partition_prob needs a partition_prob config");
  cfg.validate();
  ResultTable table;
  for (const Cell& cell : expand_cells(cfg)) {
    const RngStream base = cell_stream(cfg, cell);
    const std::int64_t n_proxy = cell.n * cfg.proxy_factor;
    const double p_rn = singleton_fraction(cfg.model, cell.alpha, cell.d, cell.n, cfg.blocks, base.child(0), exec);
    const double p_r =
        singleton_fraction(cfg.model, cell.alpha, cell.d, n_proxy, cfg.proxy_blocks, base.child(1), exec);
    ResultRow row;
    row.study = to_string(cfg.study);
    row.model = to_string(cfg.model);
    row.kind = "none";
    row.alpha = cell.alpha;
    row.d = cell.d;
    row.n = cell.n;
    row.reps = static_cast<int>(cfg.blocks);
    row.p_rn = p_rn;
    row.p_r = p_r;
    row.ratio_exact = ratio_exact(cell.n, cell.d);
    row.proxy_bias = 1.0 - ratio_exact(n_proxy, cell.d);
    if (p_r > 0.0) {
      row.ratio = p_rn / p_r;
      // Delta method for the ratio of two independent binomial proportions.
      const double var_rn = p_rn * (1.0 - p_rn) / static_cast<double>(cfg.blocks);
      const double var_r = p_r * (1.0 - p_r) / static_cast<double>(cfg.proxy_blocks);
      row.ratio_se = std::sqrt(var_rn / (p_r * p_r) + p_rn * p_rn * var_r / (p_r * p_r * p_r * p_r));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

ResultTable run_study(const ExperimentConfig& cfg, Execution exec) {
  switch (cfg.study) {
    case Study::BiasTable:
      return run_bias_study(cfg, exec);
    case Study::TermCount:
      return run_term_count(cfg, exec);
    case Study::Scaling:
      return run_scaling_study(cfg, exec);
    case Study::PartitionProb:
      return run_partition_prob(cfg, exec);
  }
  throw ValidationError("unknown study");
}

int configure_workers(int workers) {
  if (workers <= 0) {
    if (const char* env = std::getenv("MAXSTAB_WORKERS")) {
      workers = std::atoi(env);
      if (workers < 0) throw ValidationError("MAXSTAB_WORKERS must be a non-negative integer");
    }
  }
  if (workers > 0) omp_set_num_threads(workers);
  return omp_get_max_threads();
}

}  // namespace maxstab
