#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "scout/core.hpp"
#include "scout/dimer.hpp"
#include "scout/grid.hpp"
#include "scout/potentials.hpp"
#include "scout/search.hpp"
#include "scout/sspd.hpp"

/**
 * \file config.hpp
 *
 * @brief Run configuration: one JSON document per run, presets for the benchmark experiments.
 */

namespace scout::cli {

  using json = nlohmann::ordered_json;

  /// Potential name plus the parameters the registry cannot default.
  struct PotentialSpec {
    std::string name = "double-well-quartic";
    /// double-well-flat
    double E = 2e-4, C = 0.045, mu = 1e-3;
    /// challenge-2d
    double Z = 4e3;
    /// morse-vacancy: hexagonal patch radius, free atoms, spacing, Morse parameters.
    int lattice_radius = 7;
    Index free_atoms = 23;
    double spacing = 1.0;
    MorseParams morse{};
    /// lj7
    Index atoms = 7;
  };

  struct InitSpec {
    /// "minimum" (point plus jitter), "gaussian", or "uniform".
    std::string kind = "minimum";
    /// Starting point; for "minimum" it is relaxed by descent first when relax is set. Empty selects a
    /// potential-specific default minimum.
    std::vector<double> point;
    bool relax = true;
    double stddev = 0.1;
    std::vector<double> lower, upper;
    /// Initial tangent; empty selects the normalised all-ones vector.
    std::vector<double> tangent;
  };

  struct PdeSpec {
    Grid2D grid{-9, 9, -9, 9, 256, 256};
    double beta = 1e3;
    /// Zero selects 0.95 of the stability bound.
    double dt = 0;
    double t_end = 2e4;
    int snapshots = 8;
    double x0 = 0.5, y0 = 0.5, sigma0 = 1e-3;
    bool fokker_planck = true;
    bool witten = true;
    bool hessian_coupling = true;
  };

  struct BenchSpec {
    std::vector<Index> free_atoms{9, 23, 69, 101, 139};
    int lattice_radius = 10;
    long iterations = 100;
    Index particles = 100;
    int repeats = 3;
  };

  struct RunConfig {
    std::string preset;
    PotentialSpec potential{};
    SspdConfig sspd{};
    DimerConfig dimer{};
    ParticleDimerConfig particle{};
    LocalSearchKind local_search = LocalSearchKind::single;
    IdentityRule identity{};
    InitSpec init{};
    /// "sspd-ls" (one search from the initial ensemble) or "graph" (worklist over minima).
    std::string search_mode = "sspd-ls";
    double gamma = 0.01;
    Index max_minima = 16;
    /// Descent step; zero means the dimer step.
    double descent_step = 0;
    long descent_max_iter = 200000;
    /// "sspd-ls" mode ends once this many distinct saddles are known (0 runs the full budget).
    Index stop_after = 0;
    std::vector<std::pair<double, std::string>> labels;
    /// Ensemble snapshot stride for the sspd command (0 keeps only the first and last states).
    long snapshot_stride = 0;
    PdeSpec pde{};
    BenchSpec bench{};
    std::string out_dir = "run";
    int threads = 0;

    /// Throws ConfigError on inconsistent values.
    void validate() const;
  };

  [[nodiscard]] std::vector<std::string> preset_names();

  /// Built-in configuration for a named experiment; throws ConfigError for unknown names.
  [[nodiscard]] RunConfig preset(std::string const& name);

  /// Overlay a JSON document on base; unknown keys are rejected with their full path.
  [[nodiscard]] RunConfig parse_config(json const& doc, RunConfig base = {});

  [[nodiscard]] RunConfig load_config_file(std::string const& path, RunConfig base = {});

  [[nodiscard]] json to_json(RunConfig const& cfg);

  [[nodiscard]] std::unique_ptr<Potential> build_potential(PotentialSpec const& spec);

  /// Default starting minimum for a potential (before relaxation).
  [[nodiscard]] Vector default_start(Potential const& pot);

  /// Initial ensemble described by cfg.init.
  [[nodiscard]] Ensemble build_ensemble(Potential const& pot, RunConfig const& cfg);

  /// Search configuration assembled from the run configuration.
  [[nodiscard]] GraphConfig graph_config(RunConfig const& cfg);

}  // namespace scout::cli
