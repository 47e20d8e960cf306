#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "qlab/besovlp.hpp"
#include "qlab/heatsim.hpp"

using namespace qlab;

namespace {

constexpr double kPi = 3.14159265358979323846;

HeatExperimentConfig base_config() {
  HeatExperimentConfig cfg;
  cfg.d = 1;
  cfg.N = 32;
  cfg.T = 0.1;
  cfg.times = {0.025, 0.05, 0.1};
  cfg.sigma = 1.5;
  cfg.epsilon = 0.5;
  cfg.count = 8;
  cfg.seed = 7001;
  return cfg;
}

// E|u_k(t)|^2 for the noise-only solution: g^2 (1-e^{-2 rho t})/(2 rho).
double noise_mode_second_moment(double g, double k, double t) {
  const double rho = 4.0 * kPi * kPi * k * k;
  if (rho == 0.0) return g * g * t;
  return g * g * -std::expm1(-2.0 * rho * t) / (2.0 * rho);
}

}  // namespace

TEST_CASE("decay exponents translate through the documented dictionary") {
  HeatExperimentConfig cfg = base_config();
  cfg.sigma = 0.5;
  cfg.f_decay = 1.0;
  cfg.g_decay = 1.0;
  cfg.epsilon = 0.5;
  // 2 alpha = sigma - (s - d/2) - epsilon with d = 1.
  CHECK(cfg.alpha() == doctest::Approx(-0.25).epsilon(1e-14));
  CHECK(cfg.beta() == doctest::Approx(-0.25).epsilon(1e-14));
  cfg.sigma = 1.5;
  CHECK(cfg.beta() == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("configuration validation rejects inconsistent setups") {
  {
    HeatExperimentConfig cfg = base_config();
    cfg.times = {0.1 / 3.0};  // not a dyadic fraction of T
    CHECK_THROWS_AS(simulate_mild_solution(cfg), ValidationError);
  }
  {
    HeatExperimentConfig cfg = base_config();
    cfg.times = {0.2};  // beyond the horizon
    CHECK_THROWS_AS(simulate_mild_solution(cfg), ValidationError);
  }
  {
    HeatExperimentConfig cfg = base_config();
    cfg.g_amplitude = 1.0;
    cfg.g_decay = 2.0;  // beta < 0 while noise is active
    CHECK_THROWS_AS(simulate_mild_solution(cfg), ValidationError);
  }
  {
    HeatExperimentConfig cfg = base_config();
    cfg.f_amplitude = 1.0;
    cfg.f_decay = 2.0;  // alpha < 0 while forcing is active
    CHECK_THROWS_AS(simulate_mild_solution(cfg), ValidationError);
  }
  {
    HeatExperimentConfig cfg = base_config();
    cfg.N = 24;  // not a power of two
    CHECK_THROWS_AS(simulate_mild_solution(cfg), ValidationError);
  }
}

TEST_CASE("data-free paths reduce to the heat multiplier exactly") {
  HeatExperimentConfig cfg = base_config();
  cfg.u0_law = U0Law::Gaussian;
  cfg.u0_amplitude = 1.0;
  cfg.u0_decay = 1.5;
  const auto ens = simulate_mild_solution(cfg);
  for (int p = 0; p < cfg.count; ++p) {
    const GridField start = ens.field_at(p, 0);
    for (size_t t = 1; t < ens.spectra[p].size(); ++t) {
      const GridField expect = heat_multiply(start, ens.time_grid[t]);
      CHECK((ens.spectra[p][t] - expect.spectrum()).abs().maxCoeff() <= 1e-13);
    }
  }
}

TEST_CASE("noise-only mode variances match the convolution closed form") {
  HeatExperimentConfig cfg = base_config();
  cfg.g_amplitude = 1.0;
  cfg.g_decay = 0.0;  // white: beta = (1.5 - (-0.5) - 0.5)/2 > 0
  cfg.count = 400;
  cfg.times = {0.05};
  const auto ens = simulate_mild_solution(cfg);
  const int ti = ens.time_index_of(0.05);  // the grid also carries T itself
  const GridField probe(1, cfg.N);
  for (int k : {0, 1, 2, 5}) {
    const int idx = probe.index_of_freq(k);
    double mean = 0.0, sq = 0.0;
    for (int p = 0; p < cfg.count; ++p) {
      const double v = std::norm(ens.spectra[p][ti][idx]);
      mean += v;
      sq += v * v;
    }
    mean /= cfg.count;
    sq /= cfg.count;
    const double se = std::sqrt(std::max(sq - mean * mean, 0.0) / cfg.count);
    const double predict = noise_mode_second_moment(1.0, k, 0.05);
    CHECK(std::abs(mean - predict) <= 4.0 * se + 1e-12);
  }
}

TEST_CASE("constant forcing approaches its stationary profile exactly") {
  HeatExperimentConfig cfg = base_config();
  cfg.f_amplitude = 0.8;
  cfg.f_decay = 1.0;  // alpha = 0.25 > 0
  cfg.count = 1;
  const auto ens = simulate_mild_solution(cfg);
  const GridField probe(1, cfg.N);
  for (size_t t = 0; t < ens.spectra[0].size(); ++t) {
    const double time = ens.time_grid[t];
    for (int i = 0; i < probe.size(); ++i) {
      const double fs = probe.freq_sq(i);
      const double rho = 4.0 * kPi * kPi * fs;
      const double fk = 0.8 * std::pow(1.0 + fs, -0.5);
      const double expect =
          rho == 0.0 ? fk * time : fk * -std::expm1(-rho * time) / rho;
      CHECK(std::abs(ens.spectra[0][t][i] - expect) <= 1e-12);
    }
  }
}

TEST_CASE("per-mode variance helper has the documented limits") {
  CHECK(mode_variance(2.0, 0.0, 0.3) == doctest::Approx(1.2).epsilon(1e-14));
  const double rho = 50.0;
  CHECK(mode_variance(1.0, rho, 100.0) ==
        doctest::Approx(1.0 / (2.0 * rho)).epsilon(1e-9));
  CHECK(mode_variance(1.0, rho, 0.01) ==
        doctest::Approx(-std::expm1(-2.0 * rho * 0.01) / (2.0 * rho))
            .epsilon(1e-12));
  CHECK(mode_variance(0.0, rho, 1.0) == 0.0);
}

TEST_CASE("lattice second-moment sums count every mode below the cutoff") {
  HeatExperimentConfig cfg = base_config();
  cfg.g_amplitude = 1.0;
  cfg.g_decay = 0.0;
  cfg.N = 16;
  double manual = 0.0;
  for (int k = -8; k < 8; ++k)
    if (std::abs(k) <= 5)
      manual += noise_mode_second_moment(1.0, std::abs(k), 0.05);
  CHECK(predicted_l2_second_moment(cfg, 0.05, 5.0) ==
        doctest::Approx(manual).epsilon(1e-12));
}

TEST_CASE("monte carlo grid energy tracks the predicted second moment") {
  HeatExperimentConfig cfg = base_config();
  cfg.g_amplitude = 1.0;
  cfg.g_decay = 1.0;
  cfg.count = 300;
  cfg.times = {0.05};
  const auto ens = simulate_mild_solution(cfg);
  const int ti = ens.time_index_of(0.05);
  double mean = 0.0, sq = 0.0;
  for (int p = 0; p < cfg.count; ++p) {
    const double energy = ens.spectra[p][ti].abs2().sum();
    mean += energy;
    sq += energy * energy;
  }
  mean /= cfg.count;
  sq /= cfg.count;
  const double se = std::sqrt(std::max(sq - mean * mean, 0.0) / cfg.count);
  const double predict =
      predicted_l2_second_moment(cfg, 0.05, cfg.N / 2.0);
  CHECK(std::abs(mean - predict) <= 4.0 * se);
}

TEST_CASE("initial laws honor their definitions") {
  {
    HeatExperimentConfig cfg = base_config();
    const auto ens = simulate_mild_solution(cfg);  // Zero law
    CHECK(ens.spectra[0][0].abs().maxCoeff() == 0.0);
  }
  {
    HeatExperimentConfig cfg = base_config();
    cfg.u0_law = U0Law::Deterministic;
    cfg.u0_amplitude = 2.0;
    cfg.u0_decay = 1.0;
    const auto ens = simulate_mild_solution(cfg);
    const GridField probe(1, cfg.N);
    for (int i = 0; i < probe.size(); ++i) {
      const double expect = 2.0 * std::pow(1.0 + probe.freq_sq(i), -0.5);
      CHECK(std::abs(ens.spectra[0][0][i] - expect) <= 1e-13);
    }
  }
}

TEST_CASE("simulation is bitwise reproducible from its configuration") {
  HeatExperimentConfig cfg = base_config();
  cfg.u0_law = U0Law::Gaussian;
  cfg.u0_amplitude = 1.0;
  cfg.u0_decay = 1.0;
  cfg.g_amplitude = 1.0;
  cfg.g_decay = 1.0;
  const auto a = simulate_mild_solution(cfg);
  const auto b = simulate_mild_solution(cfg);
  for (int p = 0; p < cfg.count; ++p)
    for (size_t t = 0; t < a.spectra[p].size(); ++t)
      CHECK((a.spectra[p][t] == b.spectra[p][t]).all());
}

TEST_CASE("time lookup accepts grid points and rejects strangers") {
  HeatExperimentConfig cfg = base_config();
  const auto ens = simulate_mild_solution(cfg);
  CHECK(ens.time_index_of(0.0) == 0);
  CHECK(ens.time_index_of(0.1) ==
        static_cast<int>(ens.time_grid.size()) - 1);
  CHECK_THROWS_AS(ens.time_index_of(0.033), ValidationError);
}

TEST_CASE("weighted time norms reproduce the embedding constant") {
  const int n = 8193;
  Eigen::ArrayXd grid(n), values(n);
  const double t = 0.7;
  for (int i = 0; i < n; ++i) {
    grid[i] = t * i / (n - 1.0);
    values[i] = 1.0;
  }
  // Constant value: (integral of (t-s)^{-alpha r} ds)^{1/r}
  //   = t^{1/r - alpha} (1 - alpha r)^{-1/r}.
  for (double alpha : {0.0, 0.3}) {
    for (double r : {1.0, 2.0}) {
      if (alpha * r >= 1.0) continue;
      const auto res = weighted_lr_alpha_norm(grid, values, alpha, r, t);
      const double closed =
          std::pow(t, 1.0 / r - alpha) * std::pow(1.0 - alpha * r, -1.0 / r);
      CHECK_FALSE(res.diverged);
      CHECK(std::abs(res.value - closed) <= 0.01 * closed);
    }
  }
  // alpha = 0 with a constant integrand is quadrature-exact.
  const auto plain = weighted_lr_alpha_norm(grid, values, 0.0, 2.0, t);
  CHECK(plain.value == doctest::Approx(std::sqrt(t)).epsilon(1e-12));
}

TEST_CASE("weighted time norms flag endpoint divergence") {
  Eigen::ArrayXd grid(3), mass_at_end(3), fades(3);
  grid << 0.0, 0.5, 1.0;
  mass_at_end << 0.0, 0.0, 1.0;
  fades << 1.0, 0.0, 0.0;
  const auto bad = weighted_lr_alpha_norm(grid, mass_at_end, 0.6, 2.0, 1.0);
  CHECK(bad.diverged);
  const auto ok = weighted_lr_alpha_norm(grid, fades, 0.6, 2.0, 1.0);
  CHECK_FALSE(ok.diverged);
  // The singular weight makes late mass dominate early mass.
  const auto late = weighted_lr_alpha_norm(grid, mass_at_end, 0.6, 1.0, 1.0);
  const auto flat = weighted_lr_alpha_norm(grid, mass_at_end, 0.0, 1.0, 1.0);
  CHECK(late.value > flat.value);
  // Malformed grids are rejected.
  Eigen::ArrayXd down(3);
  down << 0.0, 0.6, 0.4;
  CHECK_THROWS_AS(weighted_lr_alpha_norm(down, fades, 0.0, 1.0, 1.0),
                  ValidationError);
}

TEST_CASE("space regularity tables honor trivial configurations") {
  {
    HeatExperimentConfig cfg = base_config();  // all data zero
    cfg.count = 4;
    const auto ens = simulate_mild_solution(cfg);
    const auto table =
        measure_space_regularity(ens, {0.4}, 2.0, 2.0, 2.0, {4.0, 8.0});
    for (const auto& cell : table.cells) CHECK(cell.moment.value == 0.0);
    CHECK(table.cutoff_rows.size() == 2);
  }
  {
    HeatExperimentConfig cfg = base_config();
    cfg.u0_law = U0Law::Gaussian;
    cfg.u0_amplitude = 1.0;
    cfg.u0_decay = 1.5;
    cfg.count = 6;
    const auto ens = simulate_mild_solution(cfg);
    const auto table = measure_space_regularity(ens, {0.4}, 2.0, 2.0, 2.0);
    // Heat flow contracts the data-only solution at every later time.
    for (size_t i = 1; i < table.cells.size(); ++i)
      CHECK(table.cells[i].moment.value <=
            table.cells[i - 1].moment.value * (1.0 + 1e-12));
  }
}

TEST_CASE("time increment tables carry the range flag") {
  HeatExperimentConfig cfg = base_config();
  cfg.g_amplitude = 1.0;
  cfg.g_decay = 1.0;  // beta = 0.25
  cfg.u0_law = U0Law::Stationary;
  cfg.count = 30;
  cfg.T = 0.04;
  cfg.times = {0.02, 0.025, 0.03, 0.04};
  const auto ens = simulate_mild_solution(cfg);
  const std::vector<double> anchors = {0.02};
  const std::vector<double> gaps = {0.005, 0.01};
  const auto in_range =
      measure_time_hoelder(ens, 0.1, cfg.sigma, 2.0, anchors, gaps);
  CHECK(in_range.lambda_in_range);
  CHECK(in_range.moments.size() == 2);
  for (const auto& m : in_range.moments) CHECK(m.value > 0.0);
  const auto out_of_range =
      measure_time_hoelder(ens, 0.3, cfg.sigma, 2.0, anchors, gaps);
  CHECK_FALSE(out_of_range.lambda_in_range);
}

TEST_CASE("weak-formulation residuals vanish at the mean and shrink with refinement") {
  HeatExperimentConfig cfg = base_config();
  cfg.N = 16;
  cfg.T = 0.25;
  cfg.times = {0.25};
  cfg.f_amplitude = 0.7;
  cfg.f_decay = 0.0;
  cfg.g_amplitude = 0.8;
  cfg.g_decay = 0.0;
  cfg.sigma = 1.5;  // keeps both exponents positive under the dictionary
  cfg.u0_law = U0Law::Gaussian;
  cfg.u0_amplitude = 1.0;
  cfg.u0_decay = 1.0;
  cfg.count = 40;
  const auto rep =
      check_solution_identity(cfg, {{0, 0}, {1, 0}, {3, 0}}, {16, 32, 64});
  CHECK(rep.zero_mode_residual <= 1e-12);
  CHECK(rep.slope >= 0.9);
  CHECK(rep.pass);
}
