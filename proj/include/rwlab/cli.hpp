#pragma once

// Command-line front end. Exit codes: 0 success, 1 usage error, 2 runtime
// error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rwlab/experiment.hpp"
#include "rwlab/isoperimetry.hpp"
#include "rwlab/percolation.hpp"
#include "rwlab/pointprocess.hpp"
#include "rwlab/spectral.hpp"
#include "rwlab/walk.hpp"

namespace rwlab {

namespace detail {

struct CommonOptions {
  std::string config;
  std::vector<std::string> overrides;
  std::string points;
  std::optional<double> alpha;
  std::optional<int> model;
  std::optional<double> cutoff;
  std::string output;
};

inline void add_config_options(CLI::App* app, CommonOptions& o) {
  app->add_option("--config", o.config, "Config file (key=value lines)");
  app->add_option("--set", o.overrides, "Override a config entry, key=value (repeatable)");
}

inline void add_point_options(CLI::App* app, CommonOptions& o) {
  add_config_options(app, o);
  app->add_option("--points", o.points, "Point-set CSV; sampled from the config when absent");
  app->add_option("--alpha", o.alpha, "Rate exponent");
  app->add_option("--model", o.model, "Generator model 1, 2 or 3")->check(CLI::Range(1, 3));
  app->add_option("--cutoff", o.cutoff, "Rate cutoff");
}

inline ExperimentConfig resolve_config(const CommonOptions& o) {
  ExperimentConfig c = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
  for (const auto& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw InvalidParameter("--set expects key=value, got '" + kv + "'");
    set_config_value(c, trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
  }
  if (o.alpha) c.alpha = *o.alpha;
  if (o.model) c.model = *o.model;
  if (o.cutoff) c.cutoff = *o.cutoff;
  if (!o.output.empty()) c.output_path = o.output;
  c.validate();
  return c;
}

inline PointSet resolve_points(const CommonOptions& o, const ExperimentConfig& c) {
  if (!o.points.empty()) return load_csv(o.points);
  if (c.L_list.empty() || c.seeds.empty()) {
    throw InvalidParameter("no --points file and the config has no L_list/seeds to sample from");
  }
  return sample_process(c, c.rho, c.L_list.front(), c.seeds.front());
}

/// Writes to `path`, or to `fallback` when the path is empty.
template <class Fn>
void emit(const std::string& path, std::ostream& fallback, Fn&& fn) {
  if (path.empty()) {
    fn(fallback);
    return;
  }
  std::ofstream f(path);
  if (!f) throw InvalidInput("cannot open output '" + path + "'");
  fn(f);
}

inline std::string join_indices(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? " " : "") + std::to_string(v[k]);
  return s;
}

inline std::vector<double> default_grid() {
  std::vector<double> g;
  for (int k = 1; k <= 20; ++k) g.push_back(k / 20.0);
  return g;
}

}  // namespace detail

inline int cli_dispatch(int argc, const char* const* argv, std::ostream& out = std::cout,
                        std::ostream& err = std::cerr) {
  CLI::App app{"Random walks on random point sets: spectra, conductance and mixing"};
  app.require_subcommand(1);
  detail::CommonOptions o;

  // sample
  auto* sample = app.add_subcommand("sample", "Sample a point set from the config process");
  detail::add_config_options(sample, o);
  sample->add_option("--output,-o", o.output, "Output CSV (stdout when absent)");

  // spectrum
  std::string format = "json";
  auto* spectrum = app.add_subcommand("spectrum", "Spectral gap, mixing time and bounds");
  detail::add_point_options(spectrum, o);
  spectrum->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  // cheeger
  auto* cheeger = app.add_subcommand("cheeger", "Cheeger constant (exact when small, else bounds)");
  detail::add_point_options(cheeger, o);

  // profile
  std::vector<double> grid;
  bool staircase = false;
  bool hybrid = false;
  auto* profile = app.add_subcommand("profile", "Isoperimetric or hybrid profile by enumeration");
  detail::add_point_options(profile, o);
  profile->add_option("--grid", grid, "Grid of t values in (0, 1]")->delimiter(',');
  profile->add_flag("--staircase", staircase, "Full exact staircase instead of a grid");
  profile->add_flag("--hybrid", hybrid, "Hybrid profile (model 3, counting constraint)");
  profile->add_option("--output,-o", o.output, "Output CSV (stdout when absent)");

  // mix
  auto* mix = app.add_subcommand("mix", "Exact uniform mixing time and its upper bounds");
  detail::add_point_options(mix, o);

  // perc
  int perc_n = 128;
  int perc_dim = 2;
  double perc_p = 0.95;
  double kappa = 0.8;
  int cube_side = 16;
  std::vector<std::uint64_t> perc_seeds{1};
  std::string dump;
  auto* perc = app.add_subcommand("perc", "Site-percolation events and cube densities");
  perc->add_option("--n", perc_n, "Lattice side")->check(CLI::PositiveNumber);
  perc->add_option("--dim", perc_dim, "Dimension")->check(CLI::PositiveNumber);
  perc->add_option("--p", perc_p, "Open probability")->check(CLI::Range(0.0, 1.0));
  perc->add_option("--kappa", kappa, "Giant-cluster fraction");
  perc->add_option("--cube-side", cube_side, "Density cube side")->check(CLI::PositiveNumber);
  perc->add_option("--seeds", perc_seeds, "Seeds")->delimiter(',');
  perc->add_option("--dump", dump, "Run-length dump of the first field");
  perc->add_option("--output,-o", o.output, "Event CSV (stdout when absent)");

  // scaling, transition, a2check
  auto* scaling = app.add_subcommand("scaling", "Scaling sweep over L and seeds");
  detail::add_config_options(scaling, o);
  scaling->add_option("--output,-o", o.output, "Overrides output_path");
  auto* transition = app.add_subcommand("transition", "Density scan at alpha = dim");
  detail::add_config_options(transition, o);
  transition->add_option("--output,-o", o.output, "Overrides output_path");
  auto* a2 = app.add_subcommand("a2check", "Local density statistics S_ell and R");
  detail::add_config_options(a2, o);
  a2->add_option("--output,-o", o.output, "Overrides output_path");

  if (argc <= 1) {
    err << app.help();
    return 1;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 1;
  }

  try {
    if (sample->parsed()) {
      const auto c = detail::resolve_config(o);
      const PointSet xi = detail::resolve_points({}, c);
      detail::emit(c.output_path, out, [&](std::ostream& s) { write_csv(s, xi); });
    } else if (spectrum->parsed()) {
      const auto c = detail::resolve_config(o);
      const auto gen = build_generator(detail::resolve_points(o, c), c.alpha, model_from_int(c.model), c.cutoff);
      const SpectralReport r = spectral_report(gen, c.size_limits);
      if (format == "csv") {
        write_report_csv_header(out);
        write_report_csv_row(out, r);
      } else {
        write_report_json(out, r);
      }
    } else if (cheeger->parsed()) {
      const auto c = detail::resolve_config(o);
      const auto gen = build_generator(detail::resolve_points(o, c), c.alpha, model_from_int(c.model), c.cutoff);
      if (gen.size() <= c.size_limits.cut_enumeration) {
        const CheegerResult r = cheeger_exact(gen, c.size_limits);
        out << "phi=" << detail::format_g17(r.phi) << "\nmethod=exact\ncut=" << detail::join_indices(r.argmin) << '\n';
      } else {
        const BoundResult s = cheeger_sweep_upper(gen, c.size_limits);
        out << "phi_upper_sweep=" << detail::format_g17(s.phi_upper) << '\n';
        if (gen.size() >= 3) {
          const BoundResult t = trap_upper_bound(gen);
          out << "phi_upper_trap=" << detail::format_g17(t.phi_upper) << "\ntrap=" << detail::join_indices(t.cut)
              << '\n';
        }
        out << "method=bounds\ncut=" << detail::join_indices(s.cut) << '\n';
      }
    } else if (profile->parsed()) {
      const auto c = detail::resolve_config(o);
      const auto gen = build_generator(detail::resolve_points(o, c), c.alpha, model_from_int(c.model), c.cutoff);
      const auto g = grid.empty() ? detail::default_grid() : grid;
      IsoProfile p;
      if (hybrid) {
        p = hybrid_profile_exact(gen, g, c.size_limits);
      } else if (staircase) {
        p = iso_profile_staircase(gen, c.size_limits);
      } else {
        p = iso_profile_exact(gen, g, c.size_limits);
      }
      detail::emit(c.output_path, out, [&](std::ostream& s) { write_profile_csv(s, p); });
    } else if (mix->parsed()) {
      const auto c = detail::resolve_config(o);
      const auto gen = build_generator(detail::resolve_points(o, c), c.alpha, model_from_int(c.model), c.cutoff);
      const SpectralReport r = spectral_report(gen, c.size_limits);
      out << "tau=" << (r.tau_exact ? detail::format_g17(*r.tau_exact) : std::string("unavailable")) << '\n'
          << "bound_simple=" << detail::format_g17(r.bound_simple) << '\n'
          << "bound_profile="
          << (r.bound_profile ? detail::format_g17(*r.bound_profile) : std::string("unavailable")) << '\n';
    } else if (perc->parsed()) {
      detail::emit(o.output, out, [&](std::ostream& s) {
        write_event_csv_header(s);
        for (std::size_t k = 0; k < perc_seeds.size(); ++k) {
          const SiteField f = sample_site_field(perc_n, perc_dim, perc_p, perc_seeds[k]);
          if (k == 0 && !dump.empty()) detail::emit(dump, out, [&](std::ostream& d) { write_field_rle(d, f); });
          const ClusterLabeling lab = label_clusters(f);
          write_event_csv_row(s, f, evaluate_events(lab, kappa), cluster_cube_density(lab, cube_side));
        }
      });
    } else if (scaling->parsed()) {
      const auto c = detail::resolve_config(o);
      const auto rows = run_scaling(c);
      detail::emit(c.output_path, out, [&](std::ostream& s) { write_scaling_csv(s, rows); });
      for (const char* column : {"poincare", "gamma_hat", "remark1_ratio"}) {
        try {
          const ScalingFit f = fit_exponent(rows, column);
          out << "fit " << column << ": slope=" << detail::format_g17(f.slope)
              << " r2=" << detail::format_g17(f.r_squared) << '\n';
        } catch (const InsufficientData&) {
          out << "fit " << column << ": insufficient data\n";
        }
      }
    } else if (transition->parsed()) {
      const auto c = detail::resolve_config(o);
      const TransitionResult t = transition_scan(c);
      detail::emit(c.output_path, out, [&](std::ostream& s) { write_scaling_csv(s, t.rows); });
      write_transition_csv(out, t);
      out << "verdict=" << to_string(t.verdict) << '\n';
    } else if (a2->parsed()) {
      const auto c = detail::resolve_config(o);
      const A2Result r = a2_check(c);
      detail::emit(c.output_path, out, [&](std::ostream& s) { write_a2_csv(s, r); });
      for (const auto& s : r.summary) {
        out << "ell=" << s.ell << " mean=" << detail::format_g17(s.mean) << " var=" << detail::format_g17(s.variance)
            << " tail=" << detail::format_g17(s.tail_frequency) << '\n';
      }
      out << "variance_slope=" << detail::format_g17(r.variance_slope)
          << "\nmean_ratio=" << detail::format_g17(r.mean_ratio)
          << "\nr_dominates_count=" << (r.r_dominates_count ? "true" : "false") << '\n';
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace rwlab
