#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "rwlab/rwlab.hpp"

using namespace rwlab;

namespace {

ExperimentConfig small_sweep() {
  ExperimentConfig c;
  c.alpha = 1.0;
  c.L_list = {4, 6, 8};
  c.seeds = {3, 1, 2};
  return c;
}

std::string scaling_csv(const ExperimentConfig& c) {
  std::ostringstream out;
  write_scaling_csv(out, run_scaling(c));
  return out.str();
}

}  // namespace

TEST(Config, ParsesKeysCommentsAndLists) {
  const auto c = parse_config(
      "# sweep\n"
      "dim = 2\n"
      "alpha=1.5  # trailing comment\n"
      "model=3\n"
      "L_list=8, 12,16\n"
      "seeds=5,6\n"
      "rho_list=0.25,1,4\n"
      "process=thinned_lattice\n"
      "keep_prob=0.5\n"
      "workers=4\n");
  EXPECT_EQ(c.alpha, 1.5);
  EXPECT_EQ(c.model, 3);
  EXPECT_EQ(c.L_list, (std::vector<int>{8, 12, 16}));
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{5, 6}));
  EXPECT_EQ(c.rho_list, (std::vector<double>{0.25, 1.0, 4.0}));
  EXPECT_EQ(c.process, Process::thinned_lattice);
  EXPECT_EQ(c.keep_prob, 0.5);
  EXPECT_EQ(c.workers, 4);
}

TEST(Config, SerializeRoundTrip) {
  ExperimentConfig c = small_sweep();
  c.alpha = 0.1;
  c.rho = 1.0 / 3.0;
  c.cutoff = 1e-14;
  c.rho_list = {0.2, 0.7};
  c.ell_list = {4, 8};
  c.output_path = "out.csv";
  c.process = Process::inhomogeneous;
  c.amplitude = 0.3;
  c.size_limits.dense = 500;
  const auto back = parse_config(serialize_config(c));
  EXPECT_EQ(back, c);
  EXPECT_EQ(serialize_config(back), serialize_config(c));
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(parse_config("nonsense\n"), InvalidInput);
  EXPECT_THROW(parse_config("colour=red\n"), InvalidInput);
  EXPECT_THROW(parse_config("alpha=abc\n"), InvalidInput);
  EXPECT_THROW(parse_config("seeds=1,-2\n"), InvalidInput);
  EXPECT_THROW(parse_config("process=lattice\n"), InvalidParameter);
  EXPECT_THROW(parse_config("alpha=0\n"), InvalidParameter);
  EXPECT_THROW(parse_config("model=4\n"), InvalidParameter);
  EXPECT_THROW(parse_config("L_list=8,8\n"), InvalidParameter);
  EXPECT_THROW(parse_config("seeds=1,1\n"), InvalidParameter);
  EXPECT_THROW(parse_config("cutoff=1\n"), InvalidParameter);
  EXPECT_THROW(parse_config("workers=0\n"), InvalidParameter);
  EXPECT_THROW(parse_config("keep_prob=0\n"), InvalidParameter);
  EXPECT_THROW(load_config("/nonexistent/run.cfg"), InvalidInput);
}

TEST(Fit, ExactPowerLaw) {
  std::vector<std::pair<double, double>> s;
  for (double L : {8.0, 12.0, 16.0, 24.0}) s.emplace_back(L, 3.0 * L * L);
  const auto f = fit_exponent(s);
  EXPECT_NEAR(f.slope, 2.0, 1e-10);
  EXPECT_NEAR(f.intercept, std::log(3.0), 1e-10);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
  EXPECT_EQ(f.per_L_medians.size(), 4u);
}

TEST(Fit, ConstantHasZeroSlope) {
  std::vector<std::pair<double, double>> s;
  for (double L : {8.0, 16.0, 32.0}) s.emplace_back(L, 5.0);
  EXPECT_NEAR(fit_exponent(s).slope, 0.0, 1e-12);
}

TEST(Fit, NoisyPowerLawRecoversExponent) {
  Rng rng(17);
  std::vector<std::pair<double, double>> s;
  for (double L : {8.0, 12.0, 16.0, 24.0, 32.0, 48.0}) {
    for (int k = 0; k < 20; ++k) s.emplace_back(L, L * L * (1.0 + 0.2 * (rng.uniform() - 0.5)));
  }
  const auto f = fit_exponent(s);
  EXPECT_GE(f.slope, 1.9);
  EXPECT_LE(f.slope, 2.1);
}

TEST(Fit, MedianIgnoresOutliers) {
  std::vector<std::pair<double, double>> s;
  for (double L : {4.0, 8.0, 16.0}) {
    s.emplace_back(L, L);
    s.emplace_back(L, L);
    s.emplace_back(L, 1e9);
  }
  EXPECT_NEAR(fit_exponent(s).slope, 1.0, 1e-12);
}

TEST(Fit, NeedsThreeLengths) {
  EXPECT_THROW(fit_exponent({{8.0, 1.0}, {16.0, 2.0}}), InsufficientData);
  // Invalid values do not count towards the three.
  EXPECT_THROW(fit_exponent({{8.0, 1.0}, {16.0, 2.0}, {32.0, 0.0}, {64.0, NAN}}), InsufficientData);
  EXPECT_THROW(median({}), InsufficientData);
  EXPECT_EQ(median({3.0, 1.0, 2.0, 10.0}), 2.5);
}

TEST(Scaling, HeaderAndOrdering) {
  const auto c = small_sweep();
  const auto rows = run_scaling(c);
  ASSERT_EQ(rows.size(), 9u);
  for (std::size_t k = 1; k < rows.size(); ++k) {
    EXPECT_TRUE(rows[k - 1].L < rows[k].L || (rows[k - 1].L == rows[k].L && rows[k - 1].seed < rows[k].seed));
  }
  const auto csv = scaling_csv(c);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "L,seed,n,model,alpha,rho,gap,poincare,nu_star,tau,bound_simple,bound_profile,phi_sweep,phi_trap,"
            "remark1_ratio,status");
}

TEST(Scaling, RowsAreConsistent) {
  for (const auto& r : run_scaling(small_sweep())) {
    if (r.status != "ok") continue;
    ASSERT_TRUE(r.gap && r.poincare && r.phi_sweep);
    EXPECT_NEAR(*r.poincare * *r.gap, 1.0, 1e-12);
    EXPECT_LE(*r.gap, 2.0 * *r.phi_sweep + 1e-9);
    if (r.tau) {
      EXPECT_LE(*r.tau, *r.bound_simple + 1e-9);
    }
    if (r.phi_trap) {
      EXPECT_GE(*r.gamma_hat(), 0.5 / *r.phi_trap);
    }
    EXPECT_GE(*r.gamma_hat(), *r.poincare);
  }
}

TEST(Scaling, WorkerCountDoesNotChangeOutput) {
  auto c = small_sweep();
  c.workers = 1;
  const auto one = scaling_csv(c);
  c.workers = 3;
  EXPECT_EQ(scaling_csv(c), one);
  EXPECT_EQ(scaling_csv(c), one);
}

TEST(Scaling, DegenerateCellsAreReported) {
  ExperimentConfig c;
  c.model = 2;
  c.L_list = {1};
  c.seeds = {1, 2, 3, 4, 5, 6, 7, 8};
  int degenerate = 0;
  for (const auto& r : run_scaling(c)) {
    if (r.n < 2) {
      EXPECT_EQ(r.status, "degenerate");
      EXPECT_FALSE(r.gap);
      ++degenerate;
    }
  }
  EXPECT_GT(degenerate, 0);
  const auto csv = scaling_csv(c);
  EXPECT_NE(csv.find(",,,,,,,,,degenerate\n"), std::string::npos);
}

TEST(Scaling, RequiresLengthsAndSeeds) {
  ExperimentConfig c;
  c.seeds = {1};
  EXPECT_THROW(run_scaling(c), InvalidParameter);
  c.L_list = {4};
  c.seeds.clear();
  EXPECT_THROW(run_scaling(c), InvalidParameter);
}

TEST(Scaling, RhoListAddsAnAxis) {
  auto c = small_sweep();
  c.L_list = {4};
  c.rho_list = {2.0, 0.5};
  const auto rows = run_scaling(c);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows.front().rho, 0.5);
  EXPECT_EQ(rows.back().rho, 2.0);
}

TEST(Process, InhomogeneousAndLattice) {
  ExperimentConfig c;
  c.process = Process::inhomogeneous;
  c.amplitude = 0.5;
  double mean = 0.0;
  for (std::uint64_t s = 0; s < 400; ++s) mean += static_cast<double>(sample_process(c, 1.0, 10.0, s).size());
  mean /= 400.0;
  // Intensity averages to rho (1 - a/2) over whole periods.
  EXPECT_NEAR(mean, 75.0, 1.5);
  c.process = Process::thinned_lattice;
  c.keep_prob = 1.0;
  EXPECT_EQ(sample_process(c, 1.0, 4.0, 1).size(), 25u);
}

TEST(Transition, Preconditions) {
  ExperimentConfig c;
  c.alpha = 1.0;
  c.L_list = {8};
  c.seeds = {1};
  c.rho_list = {1.0};
  EXPECT_THROW(transition_scan(c), InvalidParameter);
  c.alpha = 2.0;
  c.L_list = {8, 12};
  EXPECT_THROW(transition_scan(c), InvalidParameter);
  c.L_list = {8};
  c.rho_list.clear();
  EXPECT_THROW(transition_scan(c), InvalidParameter);
}

TEST(Transition, SingleDensityIsTrivial) {
  ExperimentConfig c;
  c.alpha = 2.0;
  c.L_list = {6};
  c.seeds = {1, 2, 3};
  c.rho_list = {1.0};
  const auto t = transition_scan(c);
  EXPECT_EQ(t.verdict, Verdict::trivially_monotone);
  ASSERT_EQ(t.points.size(), 1u);
  std::ostringstream out;
  write_transition_csv(out, t);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "rho,L,valid,median_phi_L,median_gamma_L2");
}

TEST(Transition, SmallScanHasAVerdict) {
  ExperimentConfig c;
  c.alpha = 2.0;
  c.L_list = {8};
  c.seeds = {1, 2, 3, 4, 5};
  c.rho_list = {0.5, 2.0};
  const auto t = transition_scan(c);
  ASSERT_EQ(t.points.size(), 2u);
  EXPECT_NE(t.verdict, Verdict::trivially_monotone);
  EXPECT_EQ(t.rows.size(), 10u);
}

TEST(A2, NearEmptyProcess) {
  ExperimentConfig c;
  c.process = Process::thinned_lattice;
  c.keep_prob = 1e-6;
  c.ell_list = {4, 8};
  c.seeds = {1, 2, 3};
  const auto r = a2_check(c);
  ASSERT_EQ(r.rows.size(), 6u);
  for (const auto& row : r.rows) {
    EXPECT_EQ(row.status, "ok");
    EXPECT_EQ(row.count, 0u);
    EXPECT_EQ(row.s, 0.0);
  }
  EXPECT_TRUE(std::isnan(r.mean_ratio));
  EXPECT_TRUE(r.r_dominates_count);
}

TEST(A2, PoissonSummary) {
  ExperimentConfig c;
  c.ell_list = {8, 4};
  c.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const auto r = a2_check(c);
  ASSERT_EQ(r.summary.size(), 2u);
  EXPECT_EQ(r.summary[0].ell, 4);
  EXPECT_TRUE(r.r_dominates_count);
  for (const auto& s : r.summary) {
    EXPECT_GT(s.mean, 0.0);
    EXPECT_GE(s.tail_frequency, 0.0);
    EXPECT_LE(s.tail_frequency, 1.0);
  }
  EXPECT_GE(r.mean_ratio, 1.0);
  EXPECT_TRUE(std::isfinite(r.variance_slope));
  std::ostringstream out;
  write_a2_csv(out, r);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "ell,seed,count,S,R,status");
}

TEST(A2, RejectsInhomogeneousAndEmptyEll) {
  ExperimentConfig c;
  c.seeds = {1, 2};
  EXPECT_THROW(a2_check(c), InvalidParameter);
  c.ell_list = {4};
  c.process = Process::inhomogeneous;
  EXPECT_THROW(a2_check(c), InvalidParameter);
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
  for (int h : hits) EXPECT_EQ(h, 1);
}
