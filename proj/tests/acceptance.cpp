// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. CSV outputs land in the working directory.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rwlab/rwlab.hpp"

using namespace rwlab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

bool close(double a, double b, double rel) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + 1e-300;
}

void save(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

// Shared by criteria 1 and 2.
std::vector<PointSet> small_instances() {
  std::vector<PointSet> out;
  for (std::uint64_t s = 0; s < 200; ++s) out.push_back(oracle::small_poisson(50000 + s, 4, 12));
  return out;
}

double alpha_of(std::size_t k) {
  constexpr double alphas[] = {0.5, 1.0, 2.0};
  return alphas[k % 3];
}

Outcome oracle_equivalence(const std::vector<PointSet>& inst) {
  std::vector<double> grid;
  for (int k = 1; k <= 20; ++k) grid.push_back(k / 20.0);
  long mismatches = 0, unsound = 0, comparisons = 0;
  double worst = 0.0;
  const auto compare = [&](double lib, double ref) {
    ++comparisons;
    if (!close(lib, ref, 1e-10)) {
      ++mismatches;
    } else if (std::isfinite(ref) && ref != 0.0) {
      worst = std::max(worst, std::abs(lib - ref) / std::abs(ref));
    }
  };
  for (std::size_t k = 0; k < inst.size(); ++k) {
    const double alpha = alpha_of(k);
    for (int m = 1; m <= 3; ++m) {
      const auto gen = build_generator(inst[k], alpha, model_from_int(m));
      const auto cuts = oracle::all_cuts(gen, alpha);
      const double phi = cheeger_exact(gen).phi;
      compare(phi, oracle::profile_at(cuts, 0.5, gen.total_weight(), false));
      const auto iso = iso_profile_exact(gen, grid);
      for (std::size_t g = 0; g < grid.size(); ++g) {
        compare(iso.values[g], oracle::profile_at(cuts, grid[g], gen.total_weight(), false));
      }
      if (m == 3) {
        const auto hyb = hybrid_profile_exact(gen, grid);
        for (std::size_t g = 0; g < grid.size(); ++g) {
          compare(hyb.values[g], oracle::profile_at(cuts, grid[g], static_cast<double>(gen.size()), true));
        }
      }
      const auto sp = spectral_profile_exact(gen);
      const auto sets = oracle::spectral_sets(gen);
      for (std::size_t b = 0; b < sp.breakpoints.size(); ++b) {
        compare(sp.values[b], oracle::spectral_profile_at(sets, sp.breakpoints[b]));
      }
      const double floor = phi * (1.0 - 1e-12);
      if (cheeger_sweep_upper(gen).phi_upper < floor) ++unsound;
      if (trap_upper_bound(gen).phi_upper < floor) ++unsound;
    }
  }
  return {mismatches == 0 && unsound == 0,
          std::to_string(comparisons) + " comparisons, " + std::to_string(mismatches) + " mismatches, worst rel " +
              fmt("%.2e", worst) + ", " + std::to_string(unsound) + " unsound bounds"};
}

Outcome inequality_suite(const std::vector<PointSet>& inst) {
  long violations = 0, checks = 0;
  std::string first;
  const auto check = [&](bool ok, const std::string& what, std::size_t k) {
    ++checks;
    if (!ok) {
      if (violations++ == 0) first = what + " at instance " + std::to_string(k);
    }
  };
  for (std::size_t k = 0; k < inst.size(); ++k) {
    const double alpha = alpha_of(k);
    for (int m = 1; m <= 3; ++m) {
      const auto gen = build_generator(inst[k], alpha, model_from_int(m));
      const double phi = cheeger_exact(gen).phi;
      const double gap = spectral_gap(gen).lambda1;
      check(gap <= 2.0 * phi + 1e-9, "lambda1 <= 2 phi", k);
      if (m == 1) continue;
      check(gap >= 0.5 * phi * phi - 1e-9, "lambda1 >= phi^2/2", k);
      const double tau = mixing_time_exact(gen);
      check(tau <= mixing_bound_simple(gap, gen.nu_star()) + 1e-9, "tau <= gamma(1 + log 1/nu*)", k);
      const auto sp = spectral_profile_exact(gen);
      check(tau <= mixing_bound_profile_integral(sp, gen.nu_star()) + 1e-9, "tau <= profile integral", k);
      const auto cuts = oracle::all_cuts(gen, alpha);
      for (std::size_t b = 0; b < sp.breakpoints.size(); ++b) {
        const double p = oracle::profile_at(cuts, sp.breakpoints[b], gen.total_weight(), false);
        check(sp.values[b] >= 0.5 * p * p - 1e-9, "Lambda(r) >= phi(r)^2/2", k);
      }
    }
  }
  return {violations == 0, std::to_string(checks) + " checks, " + std::to_string(violations) + " violations" +
                               (first.empty() ? "" : " (first: " + first + ")")};
}

ExperimentConfig sweep_config(double alpha) {
  ExperimentConfig c;
  c.dim = 2;
  c.alpha = alpha;
  c.rho = 1.0;
  c.model = 1;
  c.cutoff = 1e-14;
  c.L_list = {8, 12, 16, 24, 32, 48};
  for (std::uint64_t s = 1; s <= 20; ++s) c.seeds.push_back(s);
  return c;
}

std::string scaling_csv(const std::vector<ScalingRow>& rows) {
  std::ostringstream out;
  write_scaling_csv(out, rows);
  return out.str();
}

std::size_t ok_cells(const std::vector<ScalingRow>& rows) {
  std::size_t k = 0;
  for (const auto& r : rows) k += r.status == "ok" ? 1 : 0;
  return k;
}

struct Runs {
  std::string diffusive, subdiffusive, transition, transition_summary, percolation, a2;
};

double diffusive_slope = NAN;

Outcome diffusive_scaling(Runs& runs) {
  const auto rows = run_scaling(sweep_config(1.0));
  runs.diffusive = scaling_csv(rows);
  save("acceptance_scaling_alpha1.csv", runs.diffusive);
  const auto g = fit_exponent(rows, "poincare");
  const auto r1 = fit_exponent(rows, "remark1_ratio");
  diffusive_slope = g.slope;
  const bool gamma_ok = g.slope >= 1.5 && g.slope <= 2.5 && g.r_squared >= 0.9;
  const bool ratio_ok = r1.slope >= 1.5;
  return {gamma_ok && ratio_ok, "gamma slope " + fmt("%.3f", g.slope) + " r2 " + fmt("%.3f", g.r_squared) +
                                     (gamma_ok ? " ok" : " out of range") + "; variance/energy slope " +
                                     fmt("%.3f", r1.slope) + (ratio_ok ? " ok" : " < 1.5") + "; " +
                                     std::to_string(ok_cells(rows)) + "/" + std::to_string(rows.size()) + " cells"};
}

Outcome subdiffusive_ordering(Runs& runs) {
  const auto rows = run_scaling(sweep_config(4.0));
  runs.subdiffusive = scaling_csv(rows);
  save("acceptance_scaling_alpha4.csv", runs.subdiffusive);
  const auto g = fit_exponent(rows, "gamma_hat");
  const double gap = g.slope - diffusive_slope;
  return {gap >= 0.5, "gamma_hat slope " + fmt("%.3f", g.slope) + " vs alpha=1 slope " + fmt("%.3f", diffusive_slope) +
                          ", gap " + fmt("%.3f", gap) + "; " + std::to_string(ok_cells(rows)) + "/" +
                          std::to_string(rows.size()) + " cells"};
}

ExperimentConfig transition_config(int workers) {
  ExperimentConfig c;
  c.alpha = 2.0;
  c.L_list = {32};
  c.rho_list = {0.25, 1.0, 4.0};
  for (std::uint64_t s = 1; s <= 20; ++s) c.seeds.push_back(s);
  c.workers = workers;
  return c;
}

Outcome transition(Runs& runs) {
  const auto t = transition_scan(transition_config(1));
  runs.transition = scaling_csv(t.rows);
  std::ostringstream summary;
  write_transition_csv(summary, t);
  runs.transition_summary = summary.str();
  save("acceptance_transition.csv", runs.transition);
  save("acceptance_transition_summary.csv", runs.transition_summary);
  std::string d = "verdict " + std::string(to_string(t.verdict)) + ";";
  for (const auto& p : t.points) {
    d += " rho " + fmt("%g", p.rho) + ": phiL " + fmt("%.4g", p.median_phi_L) + " gamma/L2 " +
         fmt("%.4g", p.median_gamma_L2) + ";";
  }
  return {t.verdict == Verdict::monotone, d};
}

std::string percolation_csv() {
  std::ostringstream out;
  write_event_csv_header(out);
  for (std::uint64_t s = 1; s <= 50; ++s) {
    const SiteField f = sample_site_field(128, 2, 0.95, s);
    const ClusterLabeling lab = label_clusters(f);
    write_event_csv_row(out, f, evaluate_events(lab, 0.8), cluster_cube_density(lab, 16));
  }
  return out.str();
}

Outcome percolation(Runs& runs) {
  int joint = 0, dense = 0;
  for (std::uint64_t s = 1; s <= 50; ++s) {
    const SiteField f = sample_site_field(128, 2, 0.95, s);
    const ClusterLabeling lab = label_clusters(f);
    const EventReport e = evaluate_events(lab, 0.8);
    joint += e.a && e.b && e.c ? 1 : 0;
    dense += cluster_cube_density(lab, 16) >= 0.4 ? 1 : 0;
  }
  runs.percolation = percolation_csv();
  save("acceptance_percolation.csv", runs.percolation);
  int agree = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const SiteField f = sample_site_field(6, 2, 0.3 + 0.012 * static_cast<double>(s), 9000 + s);
    bool ok = true;
    for (int dir = 0; dir < 2; ++dir) ok = ok && crossing_count(f, dir) == oracle::disjoint_paths(f, dir);
    agree += ok ? 1 : 0;
  }
  const bool pass = joint >= 45 && dense >= 45 && agree == 50;
  return {pass, "A^B^C in " + std::to_string(joint) + "/50, cube density >= 0.4 in " + std::to_string(dense) +
                    "/50, crossings agree on " + std::to_string(agree) + "/50 fields"};
}

ExperimentConfig a2_config(int workers) {
  ExperimentConfig c;
  c.alpha = 1.0;
  c.rho = 1.0;
  c.ell_list = {4, 8, 16, 32};
  for (std::uint64_t s = 1; s <= 500; ++s) c.seeds.push_back(s);
  c.workers = workers;
  return c;
}

std::string a2_csv(const A2Result& r) {
  std::ostringstream out;
  write_a2_csv(out, r);
  return out.str();
}

Outcome a2_statistics(Runs& runs) {
  const A2Result r = a2_check(a2_config(1));
  runs.a2 = a2_csv(r);
  save("acceptance_a2.csv", runs.a2);
  const bool pass = r.mean_ratio <= 1.5 && r.variance_slope <= -1.5 && r.r_dominates_count;
  std::string d = "mean ratio " + fmt("%.3f", r.mean_ratio) + ", variance slope " + fmt("%.3f", r.variance_slope) +
                  ", R >= count " + (r.r_dominates_count ? "everywhere" : "violated") + ";";
  for (const auto& s : r.summary) d += " ell " + std::to_string(s.ell) + " mean " + fmt("%.4f", s.mean) + ";";
  return {pass, d};
}

Outcome determinism(const Runs& runs) {
  std::vector<std::string> differ;
  auto alpha1 = sweep_config(1.0);
  alpha1.workers = 2;
  if (scaling_csv(run_scaling(alpha1)) != runs.diffusive) differ.push_back("scaling alpha=1");
  auto alpha4 = sweep_config(4.0);
  alpha4.workers = 3;
  if (scaling_csv(run_scaling(alpha4)) != runs.subdiffusive) differ.push_back("scaling alpha=4");
  const auto t = transition_scan(transition_config(2));
  std::ostringstream summary;
  write_transition_csv(summary, t);
  if (scaling_csv(t.rows) != runs.transition || summary.str() != runs.transition_summary) {
    differ.push_back("transition");
  }
  if (percolation_csv() != runs.percolation) differ.push_back("percolation");
  if (a2_csv(a2_check(a2_config(3))) != runs.a2) differ.push_back("a2");
  std::string d = "reruns with 2-3 workers: ";
  if (differ.empty()) return {true, d + "all CSVs bit-identical"};
  for (const auto& s : differ) d += s + " ";
  return {false, d + "differ"};
}

}  // namespace

int main() {
  using clock = std::chrono::steady_clock;
  const auto instances = small_instances();
  Runs runs;
  struct Criterion {
    int id;
    double limit_s;  // 0 when no runtime limit applies
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, 120.0, [&] { return oracle_equivalence(instances); }},
      {2, 0.0, [&] { return inequality_suite(instances); }},
      {3, 600.0, [&] { return diffusive_scaling(runs); }},
      {4, 0.0, [&] { return subdiffusive_ordering(runs); }},
      {5, 600.0, [&] { return transition(runs); }},
      {6, 0.0, [&] { return percolation(runs); }},
      {7, 300.0, [&] { return a2_statistics(runs); }},
      {8, 0.0, [&] { return determinism(runs); }},
  };
  int failed = 0;
  for (const auto& [id, limit, fn] : criteria) {
    const auto t0 = clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(clock::now() - t0).count();
    if (limit > 0.0 && secs > limit) {
      o.pass = false;
      o.detail += "; over the " + fmt("%.0f", limit) + " s limit";
    }
    failed += o.pass ? 0 : 1;
    std::printf("criterion %d: %s  %s  [%.1f s]\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
