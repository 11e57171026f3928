#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scout/cli/config.hpp"
#include "scout/pde.hpp"
#include "scout/search.hpp"
#include "scout/sspd.hpp"

/**
 * \file commands.hpp
 *
 * @brief The subcommands. Each one runs an experiment, writes its run directory and returns the results.
 */

namespace scout::cli {

  /// Writes diagnostics.csv, ensemble snapshots and manifest.json.
  SspdResult cmd_sspd(RunConfig const& cfg);

  struct SearchOutput {
    /// Set in "sspd-ls" mode.
    std::optional<SspdLsResult> run;
    TransitionGraph graph;
    /// Every distinct saddle, connected or not.
    std::vector<SaddleRecord> saddles;
  };

  /// Writes saddles.json, minima.json, graph.json, graph.dot and manifest.json.
  SearchOutput cmd_search(RunConfig const& cfg);

  struct PdeOutput {
    PotentialOnGrid sampled;
    double dt = 0;
    std::optional<PdeRun> fokker_planck;
    std::optional<PdeRun> witten;
  };

  /// Time step for cfg.pde; throws ConfigError when an explicit step exceeds the stability bound.
  [[nodiscard]] double pde_time_step(PotentialOnGrid const& sampled, RunConfig const& cfg);

  /// Writes fp_<i>.csv / witten_<i>.csv snapshots and manifest.json with times and grid.
  PdeOutput cmd_pde(RunConfig const& cfg);

  struct BenchRow {
    Index free_atoms = 0;
    Index dim = 0;
    double seconds = 0;
    double seconds_per_dim = 0;
  };

  /// Best-of-repeats wall time of bench.iterations SSPD iterations per lattice size; writes bench.csv.
  std::vector<BenchRow> cmd_bench(RunConfig const& cfg);

  /// One potential name per line.
  [[nodiscard]] std::string potentials_list();

  /// Name, dimension and description of a registered potential.
  [[nodiscard]] json potential_info(std::string const& name);

}  // namespace scout::cli
