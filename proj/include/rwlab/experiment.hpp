#pragma once

// Experiment harness: configuration, scaling sweeps, exponent fits, the
// transition scan at alpha = d and the local-density statistics check.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "rwlab/error.hpp"
#include "rwlab/isoperimetry.hpp"
#include "rwlab/pointprocess.hpp"
#include "rwlab/spectral.hpp"
#include "rwlab/walk.hpp"

namespace rwlab {

enum class Process { poisson, thinned_lattice, inhomogeneous };

inline const char* to_string(Process p) {
  switch (p) {
    case Process::poisson: return "poisson";
    case Process::thinned_lattice: return "thinned_lattice";
    case Process::inhomogeneous: return "inhomogeneous";
  }
  return "?";
}

inline Process process_from_string(const std::string& s) {
  if (s == "poisson") return Process::poisson;
  if (s == "thinned_lattice") return Process::thinned_lattice;
  if (s == "inhomogeneous") return Process::inhomogeneous;
  throw InvalidParameter("unknown process '" + s + "'");
}

struct ExperimentConfig {
  int dim = 2;
  double alpha = 1.0;
  double rho = 1.0;
  int model = 1;
  std::vector<int> L_list;
  std::vector<std::uint64_t> seeds;
  double cutoff = kDefaultCutoff;
  SizeLimits size_limits;
  Process process = Process::poisson;
  std::string output_path;

  // Scan and process extras.
  std::vector<double> rho_list;
  std::vector<int> ell_list;
  int workers = 1;
  double spacing = 1.0;
  double keep_prob = 1.0;
  /// Inhomogeneous intensity rho (1 - a (1 + cos(2 pi x_1 / L)) / 2).
  double amplitude = 0.5;
  /// Threshold factor for the tail frequency of R_{Lambda_ell} >= gamma ell^d.
  double tail_gamma = 4.0;

  void validate() const {
    if (dim < 1) throw InvalidParameter("config: dim must be >= 1");
    if (!(alpha > 0.0)) throw InvalidParameter("config: alpha must be positive");
    if (!(rho > 0.0)) throw InvalidParameter("config: rho must be positive");
    if (model < 1 || model > 3) throw InvalidParameter("config: model must be 1, 2 or 3");
    for (std::size_t k = 0; k < L_list.size(); ++k) {
      if (L_list[k] < 1) throw InvalidParameter("config: L values must be positive");
      if (k > 0 && L_list[k] <= L_list[k - 1]) throw InvalidParameter("config: L_list must be increasing");
    }
    auto s = seeds;
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end()) throw InvalidParameter("config: seeds must be distinct");
    if (!(cutoff >= 0.0 && cutoff < 1.0)) throw InvalidParameter("config: cutoff must lie in [0, 1)");
    for (double r : rho_list) {
      if (!(r > 0.0)) throw InvalidParameter("config: rho_list values must be positive");
    }
    for (int e : ell_list) {
      if (e < 1) throw InvalidParameter("config: ell values must be positive");
    }
    if (workers < 1) throw InvalidParameter("config: workers must be >= 1");
    if (!(spacing > 0.0)) throw InvalidParameter("config: spacing must be positive");
    if (!(keep_prob > 0.0 && keep_prob <= 1.0)) throw InvalidParameter("config: keep_prob must lie in (0, 1]");
    if (!(amplitude >= 0.0 && amplitude < 1.0)) throw InvalidParameter("config: amplitude must lie in [0, 1)");
  }

  friend bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
    const auto key = [](const ExperimentConfig& c) {
      return std::tie(c.dim, c.alpha, c.rho, c.model, c.L_list, c.seeds, c.cutoff, c.size_limits.cut_enumeration,
                      c.size_limits.spectral_profile, c.size_limits.dense, c.process, c.output_path, c.rho_list,
                      c.ell_list, c.workers, c.spacing, c.keep_prob, c.amplitude, c.tail_gamma);
    };
    return key(a) == key(b);
  }
};

namespace detail {

template <class T, class Parse>
std::vector<T> parse_list(const std::string& v, Parse parse) {
  std::vector<T> out;
  if (trim(v).empty()) return out;
  for (const auto& item : split(v, ',')) out.push_back(parse(trim(item)));
  return out;
}

inline long long parse_int(const std::string& s) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    throw InvalidInput("cannot parse integer '" + s + "'");
  }
  if (pos != s.size()) throw InvalidInput("trailing characters in integer '" + s + "'");
  return v;
}

inline std::uint64_t parse_u64(const std::string& s) {
  std::size_t pos = 0;
  std::uint64_t v = 0;
  if (!s.empty() && s[0] == '-') throw InvalidInput("negative seed '" + s + "'");
  try {
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    throw InvalidInput("cannot parse seed '" + s + "'");
  }
  if (pos != s.size()) throw InvalidInput("trailing characters in seed '" + s + "'");
  return v;
}

template <class T, class Fmt>
std::string join(const std::vector<T>& v, Fmt fmt) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s += ',';
    s += fmt(v[k]);
  }
  return s;
}

}  // namespace detail

/// Applies one key=value assignment.
inline void set_config_value(ExperimentConfig& c, const std::string& key, const std::string& value) {
  using namespace detail;
  const auto to_int = [](const std::string& s) { return static_cast<int>(parse_int(s)); };
  if (key == "dim") c.dim = to_int(value);
  else if (key == "alpha") c.alpha = parse_double(value);
  else if (key == "rho") c.rho = parse_double(value);
  else if (key == "model") c.model = to_int(value);
  else if (key == "L_list") c.L_list = parse_list<int>(value, to_int);
  else if (key == "seeds") c.seeds = parse_list<std::uint64_t>(value, parse_u64);
  else if (key == "cutoff") c.cutoff = parse_double(value);
  else if (key == "size_limits") {
    const auto v = parse_list<std::size_t>(value, [](const std::string& s) {
      const long long x = parse_int(s);
      if (x < 0) throw InvalidInput("size limits must be nonnegative");
      return static_cast<std::size_t>(x);
    });
    if (v.size() != 3) throw InvalidInput("size_limits needs three values: enumeration, profile, dense");
    c.size_limits = {v[0], v[1], v[2]};
  } else if (key == "process") c.process = process_from_string(value);
  else if (key == "output_path") c.output_path = value;
  else if (key == "rho_list") c.rho_list = parse_list<double>(value, parse_double);
  else if (key == "ell_list") c.ell_list = parse_list<int>(value, to_int);
  else if (key == "workers") c.workers = to_int(value);
  else if (key == "spacing") c.spacing = parse_double(value);
  else if (key == "keep_prob") c.keep_prob = parse_double(value);
  else if (key == "amplitude") c.amplitude = parse_double(value);
  else if (key == "tail_gamma") c.tail_gamma = parse_double(value);
  else throw InvalidInput("unknown config key '" + key + "'");
}

inline ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidInput("config line " + std::to_string(lineno) + ": expected key=value");
    set_config_value(c, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
  }
  c.validate();
  return c;
}

inline ExperimentConfig parse_config(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config '" + path + "'");
  return parse_config(in);
}

inline std::string serialize_config(const ExperimentConfig& c) {
  using detail::format_g17;
  using detail::join;
  const auto num = [](double v) { return format_g17(v); };
  const auto integer = [](auto v) { return std::to_string(v); };
  std::ostringstream out;
  out << "dim=" << c.dim << '\n'
      << "alpha=" << format_g17(c.alpha) << '\n'
      << "rho=" << format_g17(c.rho) << '\n'
      << "model=" << c.model << '\n'
      << "L_list=" << join(c.L_list, integer) << '\n'
      << "seeds=" << join(c.seeds, integer) << '\n'
      << "cutoff=" << format_g17(c.cutoff) << '\n'
      << "size_limits=" << c.size_limits.cut_enumeration << ',' << c.size_limits.spectral_profile << ','
      << c.size_limits.dense << '\n'
      << "process=" << to_string(c.process) << '\n'
      << "output_path=" << c.output_path << '\n'
      << "rho_list=" << join(c.rho_list, num) << '\n'
      << "ell_list=" << join(c.ell_list, integer) << '\n'
      << "workers=" << c.workers << '\n'
      << "spacing=" << format_g17(c.spacing) << '\n'
      << "keep_prob=" << format_g17(c.keep_prob) << '\n'
      << "amplitude=" << format_g17(c.amplitude) << '\n'
      << "tail_gamma=" << format_g17(c.tail_gamma) << '\n';
  return out.str();
}

/// Samples the configured process in the box of side `side`.
inline PointSet sample_process(const ExperimentConfig& c, double rho, double side, std::uint64_t seed) {
  switch (c.process) {
    case Process::poisson: return sample_poisson(rho, c.dim, side, seed);
    case Process::thinned_lattice: return sample_thinned_lattice(c.spacing, c.keep_prob, c.dim, side, seed);
    case Process::inhomogeneous: {
      const double a = c.amplitude;
      const auto f = [rho, a, side](std::span<const double> x) {
        return rho * (1.0 - a * 0.5 * (1.0 + std::cos(2.0 * std::numbers::pi * x[0] / side)));
      };
      return sample_inhomogeneous_poisson(f, rho, c.dim, side, seed);
    }
  }
  throw InvalidParameter("unknown process");
}

/// Runs fn(i) for i in [0, count) on up to `workers` threads.
inline void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  const auto threads = static_cast<std::size_t>(std::max(1, workers));
  if (threads == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::min(threads, count); ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

/// One (rho, L, seed) cell of a sweep.
struct ScalingRow {
  int L = 0;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  int model = 1;
  double alpha = 0.0;
  double rho = 0.0;
  std::optional<double> gap, poincare, nu_star, tau, bound_simple, bound_profile, phi_sweep, phi_trap, remark1_ratio;
  std::string status = "ok";

  /// Best available upper bound on the Cheeger constant.
  [[nodiscard]] std::optional<double> phi_hat() const {
    if (phi_sweep && phi_trap) return std::min(*phi_sweep, *phi_trap);
    return phi_sweep ? phi_sweep : phi_trap;
  }

  /// max(gamma, 1/(2 phi_trap)), a lower bound on the Poincare constant.
  [[nodiscard]] std::optional<double> gamma_hat() const {
    std::optional<double> g = poincare;
    if (phi_trap && *phi_trap > 0.0) g = std::max(g.value_or(0.0), 0.5 / *phi_trap);
    return g;
  }
};

inline std::optional<double> row_statistic(const ScalingRow& r, const std::string& column) {
  if (column == "gap") return r.gap;
  if (column == "poincare") return r.poincare;
  if (column == "nu_star") return r.nu_star;
  if (column == "tau") return r.tau;
  if (column == "bound_simple") return r.bound_simple;
  if (column == "bound_profile") return r.bound_profile;
  if (column == "phi_sweep") return r.phi_sweep;
  if (column == "phi_trap") return r.phi_trap;
  if (column == "remark1_ratio") return r.remark1_ratio;
  if (column == "phi_hat") return r.phi_hat();
  if (column == "gamma_hat") return r.gamma_hat();
  if (column == "n") return static_cast<double>(r.n);
  throw InvalidParameter("unknown statistic column '" + column + "'");
}

namespace detail {

inline std::string status_of(const std::exception& e) {
  if (dynamic_cast<const DegenerateModel*>(&e)) return "degenerate";
  if (dynamic_cast<const DisconnectedStateSpace*>(&e)) return "disconnected";
  if (dynamic_cast<const SolverFailure*>(&e)) return "solver_failure";
  if (dynamic_cast<const SizeLimit*>(&e)) return "size_limit";
  if (dynamic_cast<const InvalidInput*>(&e)) return "invalid_input";
  if (dynamic_cast<const InvalidParameter*>(&e)) return "invalid_parameter";
  return "error";
}

}  // namespace detail

/// Computes every column of one cell; failures land in `status`.
inline ScalingRow run_cell(const ExperimentConfig& c, double rho, int L, std::uint64_t seed) {
  ScalingRow row;
  row.L = L;
  row.seed = seed;
  row.model = c.model;
  row.alpha = c.alpha;
  row.rho = rho;
  try {
    const PointSet xi = sample_process(c, rho, static_cast<double>(L), seed);
    row.n = xi.size();
    if (row.n < 2) {
      row.status = "degenerate";
      return row;
    }
    const WalkGenerator gen = build_generator(xi, c.alpha, model_from_int(c.model), c.cutoff);
    row.nu_star = gen.nu_star();
    const GapResult g = spectral_gap(gen, c.size_limits);
    row.gap = g.lambda1;
    row.poincare = 1.0 / g.lambda1;
    row.bound_simple = mixing_bound_simple(g.lambda1, gen.nu_star());
    if (row.n <= c.size_limits.dense) row.tau = mixing_time_exact(gen, c.size_limits);
    if (row.n <= c.size_limits.spectral_profile) {
      row.bound_profile = mixing_bound_profile_integral(spectral_profile_exact(gen, c.size_limits), gen.nu_star());
    }
    row.phi_sweep = row.n == 2 ? cheeger_sweep_upper(gen, c.size_limits).phi_upper
                               : cheeger_sweep_upper(gen, g.eigvec).phi_upper;
    if (row.n >= 3) row.phi_trap = trap_upper_bound(gen).phi_upper;
    std::vector<double> f(row.n);
    for (std::size_t i = 0; i < row.n; ++i) f[i] = xi.norm(i);
    const DirichletResult dr = dirichlet_form(gen, f);
    if (dr.energy > 0.0) row.remark1_ratio = dr.variance / dr.energy;
  } catch (const Error& e) {
    row.status = detail::status_of(e);
  }
  return row;
}

/// All (rho, L, seed) cells, sorted by rho, then L, then seed. The rho axis
/// is `rho_list` when given, else the single `rho`.
inline std::vector<ScalingRow> run_scaling(const ExperimentConfig& c) {
  c.validate();
  if (c.L_list.empty()) throw InvalidParameter("run_scaling: L_list is empty");
  if (c.seeds.empty()) throw InvalidParameter("run_scaling: seeds is empty");
  std::vector<double> rhos = c.rho_list.empty() ? std::vector<double>{c.rho} : c.rho_list;
  std::sort(rhos.begin(), rhos.end());
  std::vector<std::uint64_t> seeds = c.seeds;
  std::sort(seeds.begin(), seeds.end());
  struct Key {
    double rho;
    int L;
    std::uint64_t seed;
  };
  std::vector<Key> keys;
  for (double r : rhos) {
    for (int L : c.L_list) {
      for (std::uint64_t s : seeds) keys.push_back({r, L, s});
    }
  }
  std::vector<ScalingRow> rows(keys.size());
  parallel_for(keys.size(), c.workers, [&](std::size_t i) { rows[i] = run_cell(c, keys[i].rho, keys[i].L, keys[i].seed); });
  return rows;
}

inline void write_scaling_csv(std::ostream& out, const std::vector<ScalingRow>& rows) {
  out << "L,seed,n,model,alpha,rho,gap,poincare,nu_star,tau,bound_simple,bound_profile,phi_sweep,phi_trap,"
         "remark1_ratio,status\n";
  const auto opt = [](const std::optional<double>& v) { return v ? detail::format_g17(*v) : std::string(); };
  for (const auto& r : rows) {
    out << r.L << ',' << r.seed << ',' << r.n << ',' << r.model << ',' << detail::format_g17(r.alpha) << ','
        << detail::format_g17(r.rho) << ',' << opt(r.gap) << ',' << opt(r.poincare) << ',' << opt(r.nu_star) << ','
        << opt(r.tau) << ',' << opt(r.bound_simple) << ',' << opt(r.bound_profile) << ',' << opt(r.phi_sweep) << ','
        << opt(r.phi_trap) << ',' << opt(r.remark1_ratio) << ',' << r.status << '\n';
  }
}

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<std::pair<double, double>> per_L_medians;
};

inline double median(std::vector<double> v) {
  if (v.empty()) throw InsufficientData("median of an empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

/// Ordinary least squares of y on x.
inline ScalingFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw InsufficientData("fit needs at least two distinct abscissae");
  ScalingFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
  return f;
}

/// Fit of log(median over seeds) against log L, from (L, value) samples.
inline ScalingFit fit_exponent(const std::vector<std::pair<double, double>>& samples) {
  std::map<double, std::vector<double>> by_l;
  for (const auto& [l, v] : samples) {
    if (l > 0.0 && v > 0.0 && std::isfinite(v)) by_l[l].push_back(v);
  }
  if (by_l.size() < 3) throw InsufficientData("fit_exponent needs at least three distinct L with valid cells");
  std::vector<double> x, y;
  std::vector<std::pair<double, double>> medians;
  for (const auto& [l, vs] : by_l) {
    const double m = median(vs);
    medians.emplace_back(l, m);
    x.push_back(std::log(l));
    y.push_back(std::log(m));
  }
  ScalingFit f = least_squares(x, y);
  f.per_L_medians = std::move(medians);
  return f;
}

/// Fit over the valid cells of a sweep for one statistic column.
inline ScalingFit fit_exponent(const std::vector<ScalingRow>& rows, const std::string& column) {
  std::vector<std::pair<double, double>> samples;
  for (const auto& r : rows) {
    if (r.status != "ok") continue;
    if (const auto v = row_statistic(r, column)) samples.emplace_back(static_cast<double>(r.L), *v);
  }
  return fit_exponent(samples);
}

enum class Verdict { monotone, not_monotone, trivially_monotone };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::monotone: return "monotone";
    case Verdict::not_monotone: return "not_monotone";
    case Verdict::trivially_monotone: return "trivially_monotone";
  }
  return "?";
}

struct TransitionPoint {
  double rho = 0.0;
  double median_phi_L = 0.0;      ///< median of phi_hat * L
  double median_gamma_L2 = 0.0;   ///< median of gamma_hat / L^2
  std::size_t valid = 0;
};

struct TransitionResult {
  int L = 0;
  std::vector<ScalingRow> rows;
  std::vector<TransitionPoint> points;
  Verdict verdict = Verdict::trivially_monotone;
};

/// Medians over seeds per rho at the single L of the config; the verdict is
/// monotone when phi_hat L strictly increases and gamma_hat / L^2 strictly
/// decreases along rho.
inline TransitionResult transition_scan(const ExperimentConfig& c) {
  if (c.alpha != static_cast<double>(c.dim)) throw InvalidParameter("transition_scan: requires alpha == dim");
  if (c.L_list.size() != 1) throw InvalidParameter("transition_scan: L_list must hold a single L");
  if (c.rho_list.empty()) throw InvalidParameter("transition_scan: rho_list is empty");
  TransitionResult res;
  res.L = c.L_list.front();
  res.rows = run_scaling(c);
  const double L = res.L;
  std::map<double, std::pair<std::vector<double>, std::vector<double>>> by_rho;
  for (const auto& r : res.rows) {
    auto& slot = by_rho[r.rho];
    if (r.status != "ok") continue;
    const auto ph = r.phi_hat();
    const auto gh = r.gamma_hat();
    if (ph && gh) {
      slot.first.push_back(*ph * L);
      slot.second.push_back(*gh / (L * L));
    }
  }
  for (auto& [rho, v] : by_rho) {
    TransitionPoint p;
    p.rho = rho;
    p.valid = v.first.size();
    if (p.valid == 0) throw InsufficientData("transition_scan: no valid cell for some rho");
    p.median_phi_L = median(v.first);
    p.median_gamma_L2 = median(v.second);
    res.points.push_back(p);
  }
  if (res.points.size() < 2) {
    res.verdict = Verdict::trivially_monotone;
  } else {
    bool ok = true;
    for (std::size_t k = 1; k < res.points.size(); ++k) {
      ok = ok && res.points[k].median_phi_L > res.points[k - 1].median_phi_L &&
           res.points[k].median_gamma_L2 < res.points[k - 1].median_gamma_L2;
    }
    res.verdict = ok ? Verdict::monotone : Verdict::not_monotone;
  }
  return res;
}

inline void write_transition_csv(std::ostream& out, const TransitionResult& t) {
  out << "rho,L,valid,median_phi_L,median_gamma_L2\n";
  for (const auto& p : t.points) {
    out << detail::format_g17(p.rho) << ',' << t.L << ',' << p.valid << ',' << detail::format_g17(p.median_phi_L)
        << ',' << detail::format_g17(p.median_gamma_L2) << '\n';
  }
}

struct A2Row {
  int ell = 0;
  std::uint64_t seed = 0;
  std::size_t count = 0;  ///< xi(Lambda_ell)
  double s = 0.0;
  double r = 0.0;
  std::string status = "ok";
};

struct A2Summary {
  int ell = 0;
  double mean = 0.0;       ///< of S_ell / ell^d
  double variance = 0.0;   ///< of S_ell / ell^d, unbiased
  double tail_frequency = 0.0;
};

struct A2Result {
  std::vector<A2Row> rows;
  std::vector<A2Summary> summary;
  double variance_slope = std::numeric_limits<double>::quiet_NaN();
  double mean_ratio = std::numeric_limits<double>::quiet_NaN();  ///< max/min of the means
  bool r_dominates_count = true;  ///< R >= xi(Lambda_ell) in every valid cell
};

/// Side of the sample box for a given ell: the S-kernel reach is covered on
/// both sides.
inline double a2_box_side(int ell, double alpha) { return ell + 2.0 * (s_statistic_radius(alpha) + 1); }

inline A2Result a2_check(const ExperimentConfig& c) {
  c.validate();
  if (c.process == Process::inhomogeneous) {
    throw InvalidParameter("a2_check: process must be poisson or thinned_lattice");
  }
  if (c.ell_list.empty()) throw InvalidParameter("a2_check: ell_list is empty");
  std::vector<int> ells = c.ell_list;
  std::sort(ells.begin(), ells.end());
  std::vector<std::uint64_t> seeds = c.seeds;
  std::sort(seeds.begin(), seeds.end());
  A2Result res;
  res.rows.resize(ells.size() * seeds.size());
  parallel_for(res.rows.size(), c.workers, [&](std::size_t i) {
    A2Row row;
    row.ell = ells[i / seeds.size()];
    row.seed = seeds[i % seeds.size()];
    try {
      const PointSet xi = sample_process(c, c.rho, a2_box_side(row.ell, c.alpha), row.seed);
      const Box inner = Box::centered(c.dim, row.ell);
      row.count = xi.count_in(inner);
      row.s = s_statistic(xi, row.ell, c.alpha);
      row.r = r_statistic(xi, inner, c.alpha);
    } catch (const Error& e) {
      row.status = detail::status_of(e);
    }
    res.rows[i] = row;
  });
  std::vector<double> lx, ly;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t k = 0; k < ells.size(); ++k) {
    A2Summary s;
    s.ell = ells[k];
    const double vol = std::pow(static_cast<double>(s.ell), c.dim);
    std::vector<double> v;
    std::size_t tail = 0;
    for (std::size_t j = 0; j < seeds.size(); ++j) {
      const A2Row& row = res.rows[k * seeds.size() + j];
      if (row.status != "ok") continue;
      v.push_back(row.s / vol);
      if (row.r >= c.tail_gamma * vol) ++tail;
      if (row.r < static_cast<double>(row.count)) res.r_dominates_count = false;
    }
    if (v.size() < 2) throw InsufficientData("a2_check: fewer than two valid seeds for some ell");
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - m) * (x - m);
    var /= static_cast<double>(v.size() - 1);
    s.mean = m;
    s.variance = var;
    s.tail_frequency = static_cast<double>(tail) / static_cast<double>(v.size());
    res.summary.push_back(s);
    lo = std::min(lo, m);
    hi = std::max(hi, m);
    if (var > 0.0) {
      lx.push_back(std::log(static_cast<double>(s.ell)));
      ly.push_back(std::log(var));
    }
  }
  if (lo > 0.0) res.mean_ratio = hi / lo;
  if (lx.size() >= 2) res.variance_slope = least_squares(lx, ly).slope;
  return res;
}

inline void write_a2_csv(std::ostream& out, const A2Result& r) {
  out << "ell,seed,count,S,R,status\n";
  for (const auto& row : r.rows) {
    out << row.ell << ',' << row.seed << ',' << row.count << ',' << detail::format_g17(row.s) << ','
        << detail::format_g17(row.r) << ',' << row.status << '\n';
  }
}

}  // namespace rwlab
