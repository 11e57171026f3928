#pragma once

#include <string>
#include <vector>

#include "scout/cli/config.hpp"
#include "scout/grid.hpp"
#include "scout/search.hpp"
#include "scout/sspd.hpp"

/**
 * \file io.hpp
 *
 * @brief Run-directory output: CSV for tables and fields, JSON for records, DOT for graphs.
 *
 * Numbers are written with 17 significant digits so that reruns compare byte for byte.
 */

namespace scout::cli {

  /// Shortest round-trip text for a double ("nan" and "inf" spelled out).
  [[nodiscard]] std::string format_number(double x);

  /// Creates the directory and its parents; throws Error on failure.
  void ensure_directory(std::string const& dir);

  void write_text(std::string const& path, std::string const& text);
  void write_json(std::string const& path, json const& j);

  /// k, ess, resampled, max_weight, xbar_0.., ybar_0..
  void write_diagnostics_csv(std::string const& path, std::vector<IterationDiagnostics> const& rows);

  /// particle, weight, x_0.., y_0..
  void write_ensemble_csv(std::string const& path, Ensemble const& ens);

  /// x, y, then one column per component.
  void write_field_csv(std::string const& path, GridField const& field);

  [[nodiscard]] json to_json(SaddleRecord const& s);
  [[nodiscard]] json to_json(MinimumRecord const& m);
  [[nodiscard]] json saddles_json(std::vector<SaddleRecord> const& saddles);
  [[nodiscard]] json minima_json(std::vector<MinimumRecord> const& minima);
  [[nodiscard]] json graph_json(TransitionGraph const& g);
  [[nodiscard]] std::string graph_dot(TransitionGraph const& g);

  /// Config echo, seed, thread count and library version.
  [[nodiscard]] json manifest(RunConfig const& cfg, std::string const& command);

}  // namespace scout::cli
