#include "scout/cli/io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "scout/parallel.hpp"

#ifndef SCOUT_VERSION
#  define SCOUT_VERSION "0.0.0"
#endif

namespace scout::cli {

  namespace {

    std::ofstream open_out(std::string const& path) {
      std::filesystem::path const p(path);
      if (p.has_parent_path()) {
        ensure_directory(p.parent_path().string());
      }
      std::ofstream os(path, std::ios::binary);
      if (!os) {
        throw Error("cannot open " + path + " for writing");
      }
      return os;
    }

    json vec_json(VectorCRef v) { return std::vector<double>(v.data(), v.data() + v.size()); }

    void numbered_header(std::ostream& os, char const* stem, Index d) {
      for (Index i = 0; i < d; ++i) {
        os << ',' << stem << '_' << i;
      }
    }

  }  // namespace

  std::string format_number(double x) {
    if (std::isnan(x)) {
      return "nan";
    }
    if (std::isinf(x)) {
      return x > 0 ? "inf" : "-inf";
    }
    char buf[32];
    auto const r = std::to_chars(buf, buf + sizeof buf, x);
    return {buf, r.ptr};
  }

  void ensure_directory(std::string const& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
      throw Error("cannot create directory " + dir + ": " + ec.message());
    }
  }

  void write_text(std::string const& path, std::string const& text) {
    auto os = open_out(path);
    os << text;
    if (!os) {
      throw Error("write failed for " + path);
    }
  }

  void write_json(std::string const& path, json const& j) { write_text(path, j.dump(2) + "\n"); }

  void write_diagnostics_csv(std::string const& path, std::vector<IterationDiagnostics> const& rows) {
    auto os = open_out(path);
    Index const d = rows.empty() ? 0 : rows.front().xbar.size();
    os << "k,ess,resampled,max_weight";
    numbered_header(os, "xbar", d);
    numbered_header(os, "ybar", d);
    os << '\n';
    for (auto const& r : rows) {
      os << r.k << ',' << format_number(r.ess) << ',' << (r.resampled ? 1 : 0) << ',' << format_number(r.max_weight);
      for (double v : r.xbar) {
        os << ',' << format_number(v);
      }
      for (double v : r.ybar) {
        os << ',' << format_number(v);
      }
      os << '\n';
    }
  }

  void write_ensemble_csv(std::string const& path, Ensemble const& ens) {
    auto os = open_out(path);
    Index const d = ens.dim();
    os << "particle,weight";
    numbered_header(os, "x", d);
    numbered_header(os, "y", d);
    os << '\n';
    for (Index n = 0; n < ens.size(); ++n) {
      os << n << ',' << format_number(n < ens.w.size() ? ens.w[n] : std::nan(""));
      for (Index i = 0; i < d; ++i) {
        os << ',' << format_number(ens.X(i, n));
      }
      for (Index i = 0; i < d; ++i) {
        os << ',' << format_number(ens.Y(i, n));
      }
      os << '\n';
    }
  }

  void write_field_csv(std::string const& path, GridField const& field) {
    auto os = open_out(path);
    os << "x,y";
    for (int c = 0; c < field.components(); ++c) {
      os << ",c" << c;
    }
    os << '\n';
    Grid2D const& g = field.grid;
    for (Index j = 0; j < g.ny; ++j) {
      for (Index i = 0; i < g.nx; ++i) {
        os << format_number(g.x(i)) << ',' << format_number(g.y(j));
        for (int c = 0; c < field.components(); ++c) {
          os << ',' << format_number(field[c](i, j));
        }
        os << '\n';
      }
    }
  }

  json to_json(SaddleRecord const& s) {
    json j;
    j["energy"] = s.energy;
    j["gradient_norm"] = s.gradient_norm;
    j["lambda1"] = s.certificate.lambda1;
    j["lambda2"] = s.certificate.lambda2;
    j["n_deflated"] = s.certificate.n_deflated;
    j["found_at_iteration"] = s.found_at_iteration;
    j["position"] = vec_json(s.position);
    j["v1"] = vec_json(s.certificate.v1);
    if (s.connects) {
      j["connects"] = {s.connects->first, s.connects->second};
    } else {
      j["connects"] = nullptr;
    }
    return j;
  }

  json to_json(MinimumRecord const& m) {
    return {{"label", m.label},
            {"energy", m.energy},
            {"gradient_norm", m.gradient_norm},
            {"lambda1", m.lambda1},
            {"position", vec_json(m.position)}};
  }

  json saddles_json(std::vector<SaddleRecord> const& saddles) {
    json a = json::array();
    for (auto const& s : saddles) {
      a.push_back(to_json(s));
    }
    return a;
  }

  json minima_json(std::vector<MinimumRecord> const& minima) {
    json a = json::array();
    for (auto const& m : minima) {
      a.push_back(to_json(m));
    }
    return a;
  }

  json graph_json(TransitionGraph const& g) {
    json edges = json::array();
    for (auto const& e : g.edges) {
      edges.push_back({{"from", e.from}, {"to", e.to}, {"saddle", to_json(e.saddle)}});
    }
    return {{"complete", g.complete},
            {"explored", g.explored},
            {"nodes", minima_json(g.nodes)},
            {"edges", edges},
            {"unconnected", saddles_json(g.unconnected)}};
  }

  std::string graph_dot(TransitionGraph const& g) {
    std::ostringstream os;
    os << "graph transitions {\n";
    for (auto const& n : g.nodes) {
      os << "  \"" << n.label << "\" [label=\"" << n.label << "\\n" << format_number(n.energy) << "\"];\n";
    }
    for (auto const& e : g.edges) {
      os << "  \"" << e.from << "\" -- \"" << e.to << "\" [label=\"" << format_number(e.saddle.energy) << "\"];\n";
    }
    os << "}\n";
    return os.str();
  }

  json manifest(RunConfig const& cfg, std::string const& command) {
    return {{"command", command},
            {"version", SCOUT_VERSION},
            {"seed", cfg.sspd.seed},
            {"threads", num_threads()},
            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "."
                          + std::to_string(EIGEN_MINOR_VERSION)},
            {"config", to_json(cfg)}};
  }

}  // namespace scout::cli
