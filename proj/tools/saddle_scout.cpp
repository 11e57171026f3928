#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "scout/cli/commands.hpp"
#include "scout/cli/config.hpp"
#include "scout/cli/io.hpp"

using namespace scout;
using namespace scout::cli;

namespace {

  struct RunFlags {
    std::string config_path;
    std::string preset_name;
    std::optional<std::uint64_t> seed;
    std::string out;
    int threads = 0;
    std::string local_search;
  };

  void add_run_flags(CLI::App* sub, RunFlags& f) {
    sub->add_option("--config", f.config_path, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--preset", f.preset_name, "Built-in experiment")->check(CLI::IsMember(preset_names()));
    sub->add_option("--seed", f.seed, "RNG seed");
    sub->add_option("--out", f.out, "Output directory");
    sub->add_option("--threads", f.threads, "Worker threads (default: SADDLE_SCOUT_THREADS or all cores)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--local-search", f.local_search, "Local search kind")
        ->check(CLI::IsMember({"single", "particle"}));
  }

  RunConfig resolve(RunFlags const& f, std::string const& fallback_preset) {
    RunConfig cfg = preset(f.preset_name.empty() ? fallback_preset : f.preset_name);
    if (!f.config_path.empty()) {
      cfg = load_config_file(f.config_path, cfg);
    }
    if (f.seed) {
      cfg.sspd.seed = *f.seed;
    }
    if (!f.out.empty()) {
      cfg.out_dir = f.out;
    }
    if (f.threads > 0) {
      cfg.threads = f.threads;
    }
    if (!f.local_search.empty()) {
      cfg.local_search = f.local_search == "particle" ? LocalSearchKind::particle : LocalSearchKind::single;
    }
    cfg.validate();
    return cfg;
  }

  void report_search(SearchOutput const& out) {
    for (auto const& s : out.saddles) {
      std::cout << "saddle E=" << format_number(s.energy) << " |grad|=" << format_number(s.gradient_norm);
      if (s.connects) {
        std::cout << " connects " << s.connects->first << " " << s.connects->second;
      }
      std::cout << "\n";
    }
    std::cout << out.saddles.size() << " saddles, " << out.graph.nodes.size() << " minima"
              << (out.graph.complete ? "" : " (budget exhausted)") << "\n";
  }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Saddle-point search with particle dynamics and dimer local searches"};
  app.require_subcommand(1);

  RunFlags flags;
  auto* sspd = app.add_subcommand("sspd", "Run the weighted particle dynamics and record diagnostics");
  auto* search = app.add_subcommand("search", "Find saddles and build the transition graph");
  auto* pde = app.add_subcommand("pde", "Solve the Fokker-Planck and Witten equations on a grid");
  auto* bench = app.add_subcommand("bench", "Time SSPD iterations on vacancy lattices of increasing size");
  for (auto* sub : {sspd, search, pde, bench}) {
    add_run_flags(sub, flags);
  }

  auto* pots = app.add_subcommand("potentials", "List or describe the built-in potentials");
  pots->require_subcommand(1);
  auto* list = pots->add_subcommand("list", "Registered potential names");
  std::string info_name;
  auto* info = pots->add_subcommand("info", "Dimension and description of one potential");
  info->add_option("name", info_name, "Potential name")->required();

  try {
    app.parse(argc, argv);
  } catch (CLI::ParseError const& e) {
    int const code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (list->parsed()) {
      std::cout << potentials_list();
    } else if (info->parsed()) {
      std::cout << potential_info(info_name).dump(2) << "\n";
    } else if (sspd->parsed()) {
      SspdResult const r = cmd_sspd(resolve(flags, "double-well"));
      std::cout << r.iterations << " iterations" << (r.stopped_early ? " (stopped early)" : "") << "\n";
    } else if (search->parsed()) {
      report_search(cmd_search(resolve(flags, "double-well")));
    } else if (pde->parsed()) {
      RunConfig cfg = resolve(flags, "fokker-planck");
      if (flags.preset_name.empty() && flags.config_path.empty()) {
        cfg.pde.witten = true;
      }
      PdeOutput const r = cmd_pde(cfg);
      std::cout << "dt=" << format_number(r.dt);
      if (r.fokker_planck) {
        std::cout << " fp_mass=" << format_number(r.fokker_planck->final_mass);
      }
      if (r.witten) {
        std::cout << " witten_mass=" << format_number(r.witten->final_mass);
      }
      std::cout << "\n";
    } else if (bench->parsed()) {
      for (auto const& row : cmd_bench(resolve(flags, "vacancy"))) {
        std::cout << "d=" << row.dim << " seconds=" << format_number(row.seconds)
                  << " per_dim=" << format_number(row.seconds_per_dim) << "\n";
      }
    }
  } catch (ConfigError const& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (std::exception const& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
