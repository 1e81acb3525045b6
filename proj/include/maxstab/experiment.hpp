#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "maxstab/inference.hpp"
#include "maxstab/samplers.hpp"

namespace maxstab {

enum class Study { BiasTable, TermCount, Scaling, PartitionProb };

std::string to_string(Study study);
Study parse_study(std::string_view text);

struct ExperimentConfig {
  Study study = Study::BiasTable;
  ModelTag model = ModelTag::Logistic;
  std::vector<double> alphas;
  std::vector<int> dims;
  std::vector<std::int64_t> block_sizes;
  /// Explicit (d, n) cells; the scaling study uses these instead of dims x block_sizes.
  std::vector<std::pair<int, std::int64_t>> pairs;
  /// "half-square" (n = d^2/2) or "double" (n = 2d): derive scaling pairs from dims.
  std::vector<std::string> scaling_rules;
  int num_obs = 100;
  int replications = 300;
  std::uint64_t seed = 1;
  std::vector<LikelihoodKind> kinds;
  double tol = 1e-6;
  /// Partition-probability study: blocks at n, blocks at n_proxy = proxy_factor * n.
  std::int64_t blocks = 100000;
  std::int64_t proxy_blocks = 10000;
  std::int64_t proxy_factor = 1000;
  std::string output;
  int workers = 0;  // 0: OpenMP default

  /// Defaults that reproduce the published grid for each study.
  static ExperimentConfig defaults(Study study);
  static ExperimentConfig from_json(const nlohmann::json& j, std::optional<Study> study = std::nullopt);
  nlohmann::json to_json() const;
  /// Throws ValidationError on out-of-range entries.
  void validate() const;
};

/// One configuration cell of a study.
struct Cell {
  double alpha = 0.0;
  int d = 0;
  std::int64_t n = 0;
};

/// Cells in emission order. For the scaling study pairs take precedence over rules.
std::vector<Cell> expand_cells(const ExperimentConfig& cfg);

/// Stream for replication-level work in one cell. Depends only on the seed
/// and the cell's own key, never on its position in the config.
RngStream cell_stream(const ExperimentConfig& cfg, const Cell& cell);

struct ResultRow {
  std::string study;
  std::string model;
  std::string kind;
  double alpha = 0.0;
  int d = 0;
  std::int64_t n = 0;  // 0 marks a row pooled over block sizes
  int reps = 0;
  std::optional<BiasSummary> bias;
  std::optional<double> mean_terms;
  int failures = 0;
  int boundary_hits = 0;
  // partition-probability study
  std::optional<double> p_rn;
  std::optional<double> p_r;
  std::optional<double> ratio;
  std::optional<double> ratio_se;
  std::optional<double> ratio_exact;
  std::optional<double> proxy_bias;
};

struct ResultTable {
  std::vector<ResultRow> rows;
  /// Cells skipped because a likelihood kind does not apply there.
  std::vector<std::string> skipped;

  const ResultRow* find(std::string_view kind, double alpha, int d, std::int64_t n) const;
};

void write_results_csv(std::ostream& out, const ResultTable& table);
std::string results_csv(const ResultTable& table);

/// alpha estimates for every replication of one cell: estimates[r][k] is
/// replication r fitted with kinds[k]; NaN marks a failed fit. The Serial
/// path is the reference for the OpenMP path; the two agree bit for bit.
struct ReplicationBatch {
  std::vector<std::vector<double>> estimates;
  std::vector<std::vector<bool>> boundary;
};
ReplicationBatch run_replications(const ExperimentConfig& cfg, const Cell& cell,
                                  const std::vector<LikelihoodKind>& kinds, Execution exec);

/// Mean of 1 + refinement_count over num_obs simulated observations.
double mean_term_count(const ExperimentConfig& cfg, const Cell& cell, Execution exec);

/// Fraction of blocks whose occurrence partition is all singletons.
double singleton_fraction(ModelTag model, double alpha, int d, std::int64_t n, std::int64_t blocks,
                          const RngStream& rng, Execution exec);

ResultTable run_bias_study(const ExperimentConfig& cfg, Execution exec = Execution::Parallel);
ResultTable run_term_count(const ExperimentConfig& cfg, Execution exec = Execution::Parallel);
ResultTable run_scaling_study(const ExperimentConfig& cfg, Execution exec = Execution::Parallel);
ResultTable run_partition_prob(const ExperimentConfig& cfg, Execution exec = Execution::Parallel);
ResultTable run_study(const ExperimentConfig& cfg, Execution exec = Execution::Parallel);

/// Applies cfg.workers (or MAXSTAB_WORKERS when cfg.workers == 0) to OpenMP.
int configure_workers(int workers);

}  // namespace maxstab
