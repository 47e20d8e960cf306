#include "qlab/heatsim.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "qlab/prng.hpp"

namespace qlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Conjugate-partner bookkeeping of the flat spectral lattice: each
// non-self-conjugate pair is simulated once at its canonical index.
struct ModeTable {
  GridField scratch;  // zero field, used for lattice geometry only
  std::vector<int> partner;
  std::vector<double> rho;  // 4 pi^2 |k|^2

  ModeTable(int d, int N) : scratch(d, N) {
    const int size = scratch.size();
    partner.resize(size);
    rho.resize(size);
    for (int i = 0; i < size; ++i) {
      const int k0 = scratch.freq(i, 0);
      const int k1 = d == 2 ? scratch.freq(i, 1) : 0;
      partner[i] = scratch.index_of_freq(-k0, -k1);
      rho[i] = 4.0 * kPi * kPi * scratch.freq_sq(i);
    }
  }
  bool canonical(int i) const { return i <= partner[i]; }
  bool self_conjugate(int i) const { return i == partner[i]; }
};

double radial_coefficient(double amplitude, double decay, double freq_sq) {
  if (amplitude == 0.0) return 0.0;
  return amplitude * std::pow(1.0 + freq_sq, -0.5 * decay);
}

double g_coefficient(const HeatExperimentConfig& cfg, double freq_sq) {
  if (freq_sq == 0.0 && !cfg.noise_includes_mean) return 0.0;
  return radial_coefficient(cfg.g_amplitude, cfg.g_decay, freq_sq);
}

// (1 - e^{-rho t})/rho, continuous through rho = 0.
double phi1(double rho, double t) {
  if (rho == 0.0) return t;
  return -std::expm1(-rho * t) / rho;
}

void validate_config(const HeatExperimentConfig& cfg) {
  require(cfg.d == 1 || cfg.d == 2, "heat: d must be 1 or 2");
  require(cfg.N >= 4 && (cfg.N & (cfg.N - 1)) == 0,
          "heat: N must be a power of two >= 4");
  require(cfg.T > 0.0, "heat: horizon must be positive");
  require(cfg.count >= 1, "heat: need at least one path");
  require(cfg.r_moment > 0.0 && cfg.p > 0.0 && cfg.q > 0.0,
          "heat: exponents must be positive");
  if (cfg.f_amplitude != 0.0)
    require(cfg.alpha() > 0.0,
            "heat: forcing decay maps to a nonpositive regularity exponent");
  if (cfg.g_amplitude != 0.0)
    require(cfg.beta() > 0.0,
            "heat: noise decay maps to a nonpositive regularity exponent");
  for (double t : cfg.times) {
    require(t >= 0.0 && t <= cfg.T * (1.0 + 1e-12),
            "heat: output time outside [0, T]");
    const double x = t / cfg.T * 1048576.0;  // dyadic with denominator 2^20
    require(std::abs(x - std::round(x)) <= 1e-6,
            "heat: output time is not a dyadic fraction of T");
  }
}

Eigen::ArrayXd build_time_grid(const HeatExperimentConfig& cfg) {
  std::vector<double> pts = cfg.times;
  pts.push_back(0.0);
  pts.push_back(cfg.T);
  std::sort(pts.begin(), pts.end());
  std::vector<double> unique_pts;
  for (double t : pts)
    if (unique_pts.empty() || t - unique_pts.back() > 1e-12 * cfg.T)
      unique_pts.push_back(t);
  Eigen::ArrayXd grid(unique_pts.size());
  for (std::size_t i = 0; i < unique_pts.size(); ++i) grid[i] = unique_pts[i];
  return grid;
}

}  // namespace

GridField SolutionEnsemble::field_at(int path, int time_index) const {
  return GridField::from_spectrum(config.d, config.N,
                                  spectra.at(path).at(time_index));
}

int SolutionEnsemble::time_index_of(double t) const {
  for (Eigen::Index i = 0; i < time_grid.size(); ++i)
    if (std::abs(time_grid[i] - t) <= 1e-12 * config.T)
      return static_cast<int>(i);
  throw ValidationError("heat: time is not on the ensemble grid");
}

SolutionEnsemble simulate_mild_solution(const HeatExperimentConfig& config) {
  validate_config(config);
  const ModeTable modes(config.d, config.N);
  const int size = modes.scratch.size();

  Eigen::ArrayXd f_coef(size), g_coef(size);
  for (int i = 0; i < size; ++i) {
    const double fs = modes.scratch.freq_sq(i);
    f_coef[i] = radial_coefficient(config.f_amplitude, config.f_decay, fs);
    g_coef[i] = g_coefficient(config, fs);
  }

  SolutionEnsemble ens;
  ens.config = config;
  ens.time_grid = build_time_grid(config);
  const Eigen::Index n_times = ens.time_grid.size();
  ens.spectra.resize(config.count);
  if (config.retain_increments) ens.increments.resize(config.count);

  CounterRng u0_root(config.seed, "heat-u0");
  CounterRng path_root(config.seed, "heat-paths");
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  for (std::int64_t path = 0; path < config.count; ++path) {
    // Initial spectrum per the configured law.
    Eigen::ArrayXcd u0 = Eigen::ArrayXcd::Zero(size);
    if (config.u0_law != U0Law::Zero) {
      CounterRng rng = u0_root.child(static_cast<std::uint64_t>(path));
      for (int i = 0; i < size; ++i) {
        if (!modes.canonical(i)) continue;
        double scale = 0.0;
        if (config.u0_law == U0Law::Stationary) {
          scale = modes.rho[i] > 0.0 && g_coef[i] > 0.0
                      ? g_coef[i] / std::sqrt(2.0 * modes.rho[i])
                      : 0.0;
        } else {
          scale = radial_coefficient(config.u0_amplitude, config.u0_decay,
                                     modes.scratch.freq_sq(i));
        }
        if (config.u0_law == U0Law::Deterministic) {
          u0[i] = scale;
        } else if (modes.self_conjugate(i)) {
          u0[i] = scale * rng.next_gaussian();
        } else {
          u0[i] = std::complex<double>(scale * inv_sqrt2 * rng.next_gaussian(),
                                       scale * inv_sqrt2 * rng.next_gaussian());
        }
        u0[modes.partner[i]] = std::conj(u0[i]);
      }
    }

    CounterRng rng = path_root.child(static_cast<std::uint64_t>(path));
    Eigen::ArrayXcd fluct = Eigen::ArrayXcd::Zero(size);
    ens.spectra[path].reserve(n_times);
    if (config.retain_increments) ens.increments[path].reserve(n_times - 1);

    for (Eigen::Index ti = 0; ti < n_times; ++ti) {
      const double t = ens.time_grid[ti];
      if (ti > 0) {
        // Advance the zero-mean fluctuation by one exact OU transition,
        // drawing (Brownian increment, convolution increment) jointly per
        // mode component so retained increments match the paths in law
        // and pathwise.
        const double dt = ens.time_grid[ti] - ens.time_grid[ti - 1];
        Eigen::ArrayXcd dw = Eigen::ArrayXcd::Zero(size);
        for (int i = 0; i < size; ++i) {
          if (!modes.canonical(i)) continue;
          const double rho = modes.rho[i];
          const double decay = std::exp(-rho * dt);
          std::complex<double> eta;
          if (modes.self_conjugate(i)) {
            const double v_w = dt;
            const double v_eta = rho > 0.0 ? phi1(2.0 * rho, dt) : dt;
            const double cov = phi1(rho, dt);
            const double a = rng.next_gaussian();
            const double b = rng.next_gaussian();
            const double w = std::sqrt(v_w) * a;
            eta = cov / std::sqrt(v_w) * a +
                  std::sqrt(std::max(0.0, v_eta - cov * cov / v_w)) * b;
            dw[i] = w;
          } else {
            const double v_w = 0.5 * dt;
            const double v_eta = rho > 0.0 ? 0.5 * phi1(2.0 * rho, dt) : v_w;
            const double cov = 0.5 * phi1(rho, dt);
            const double sd_w = std::sqrt(v_w);
            const double slope = cov / sd_w;
            const double resid =
                std::sqrt(std::max(0.0, v_eta - cov * cov / v_w));
            const double a = rng.next_gaussian();
            const double b = rng.next_gaussian();
            const double c = rng.next_gaussian();
            const double e = rng.next_gaussian();
            dw[i] = std::complex<double>(sd_w * a, sd_w * c);
            eta = std::complex<double>(slope * a + resid * b,
                                       slope * c + resid * e);
          }
          fluct[i] = decay * fluct[i] + g_coef[i] * eta;
          fluct[modes.partner[i]] = std::conj(fluct[i]);
          dw[modes.partner[i]] = std::conj(dw[i]);
        }
        if (config.retain_increments)
          ens.increments[path].push_back(std::move(dw));
      }

      // Deterministic component in closed form from t=0 (matching the heat
      // multiplier's float expression exactly), plus the fluctuation.
      Eigen::ArrayXcd spec(size);
      for (int i = 0; i < size; ++i) {
        const double fs = modes.scratch.freq_sq(i);
        const double m = std::exp(-4.0 * kPi * kPi * t * fs);
        spec[i] = u0[i] * m + f_coef[i] * phi1(modes.rho[i], t) + fluct[i];
      }
      ens.spectra[path].push_back(std::move(spec));
    }
  }
  return ens;
}

double mode_variance(double g_k, double rho, double t) {
  if (g_k == 0.0) return 0.0;
  return g_k * g_k * phi1(2.0 * rho, t);
}

namespace {

// Shared mode-sum evaluator: sum over |k| <= cutoff of weight(i) * var(i).
template <typename WeightFn, typename VarFn>
double mode_sum(const HeatExperimentConfig& cfg, double mode_cutoff,
                WeightFn weight, VarFn variance) {
  const ModeTable modes(cfg.d, cfg.N);
  double total = 0.0;
  for (int i = 0; i < modes.scratch.size(); ++i) {
    const double fs = modes.scratch.freq_sq(i);
    if (fs > mode_cutoff * mode_cutoff) continue;
    total += weight(i, fs) * variance(i, fs);
  }
  return total;
}

// Littlewood-Paley weight of one lattice mode for the B^sigma_{2,2} second
// moment: sum_b 4^{b sigma} window_b(k)^2.
Eigen::ArrayXd lp_weights(const HeatExperimentConfig& cfg, double sigma) {
  const LPWindowBank& bank = window_bank(cfg.d, cfg.N);
  Eigen::ArrayXd w = Eigen::ArrayXd::Zero(bank.window_on_lattice(0).size());
  for (int b = 0; b <= bank.k_max(); ++b)
    w += std::pow(4.0, b * sigma) * bank.window_on_lattice(b).square();
  return w;
}

}  // namespace

double predicted_l2_second_moment(const HeatExperimentConfig& config, double t,
                                  double mode_cutoff) {
  return mode_sum(config, mode_cutoff, [](int, double) { return 1.0; },
                  [&](int, double fs) {
                    return mode_variance(g_coefficient(config, fs),
                                         4.0 * kPi * kPi * fs, t);
                  });
}

double predicted_besov_second_moment(const HeatExperimentConfig& config,
                                     double sigma, double t,
                                     double mode_cutoff) {
  const Eigen::ArrayXd w = lp_weights(config, sigma);
  return mode_sum(config, mode_cutoff,
                  [&](int i, double) { return w[i]; },
                  [&](int, double fs) {
                    return mode_variance(g_coefficient(config, fs),
                                         4.0 * kPi * kPi * fs, t);
                  });
}

double predicted_increment_second_moment(const HeatExperimentConfig& config,
                                         double sigma_eff, double gap,
                                         double mode_cutoff) {
  const Eigen::ArrayXd w = lp_weights(config, sigma_eff);
  return mode_sum(config, mode_cutoff,
                  [&](int i, double) { return w[i]; },
                  [&](int, double fs) {
                    const double rho = 4.0 * kPi * kPi * fs;
                    const double g = g_coefficient(config, fs);
                    if (rho == 0.0 || g == 0.0) return 0.0;
                    // 2 * stationary variance * (1 - e^{-rho gap}).
                    return g * g / rho * -std::expm1(-rho * gap);
                  });
}

RegularityTable measure_space_regularity(const SolutionEnsemble& ensemble,
                                         const std::vector<double>& sigma_list,
                                         double p, double q, double r,
                                         std::vector<double> cutoffs) {
  require(!sigma_list.empty(), "regularity: empty sigma list");
  require(r > 0.0, "regularity: moment exponent must be positive");
  const HeatExperimentConfig& cfg = ensemble.config;
  const int n_paths = static_cast<int>(ensemble.spectra.size());
  const int n_times = static_cast<int>(ensemble.time_grid.size());

  RegularityTable table;
  for (double sigma : sigma_list) {
    for (int ti = 0; ti < n_times; ++ti) {
      std::vector<double> norms(n_paths);
      for (int i = 0; i < n_paths; ++i)
        norms[i] = besov_norm(ensemble.field_at(i, ti), sigma, p, q,
                              window_bank(cfg.d, cfg.N));
      RegularityCell cell;
      cell.sigma = sigma;
      cell.time = ensemble.time_grid[ti];
      cell.moment = estimate_moment(norms, r);
      table.cells.push_back(cell);
    }
  }

  if (cutoffs.empty())
    for (int c = std::max(cfg.N / 16, 2); c <= cfg.N / 2; c *= 2)
      cutoffs.push_back(c);
  table.cutoff_sigma = sigma_list.front();
  const ModeTable modes(cfg.d, cfg.N);
  for (double cutoff : cutoffs) {
    std::vector<double> norms(n_paths);
    for (int i = 0; i < n_paths; ++i) {
      Eigen::ArrayXcd spec = ensemble.spectra[i].back();
      for (int m = 0; m < modes.scratch.size(); ++m)
        if (modes.scratch.freq_sq(m) > cutoff * cutoff) spec[m] = 0.0;
      norms[i] = besov_norm(GridField::from_spectrum(cfg.d, cfg.N, spec),
                            table.cutoff_sigma, p, q,
                            window_bank(cfg.d, cfg.N));
    }
    CutoffRow row;
    row.cutoff = cutoff;
    row.moment = estimate_moment(norms, r);
    table.cutoff_rows.push_back(row);
  }
  return table;
}

HoelderTable measure_time_hoelder(const SolutionEnsemble& ensemble,
                                  double lambda, double sigma, double r,
                                  const std::vector<double>& anchors,
                                  const std::vector<double>& gaps) {
  require(lambda >= 0.0, "hoelder: lambda must be nonnegative");
  require(!anchors.empty() && !gaps.empty(), "hoelder: need anchors and gaps");
  const HeatExperimentConfig& cfg = ensemble.config;
  const int n_paths = static_cast<int>(ensemble.spectra.size());

  HoelderTable table;
  table.lambda = lambda;
  table.sigma_eff = sigma - 2.0 * lambda;
  double bound = std::numeric_limits<double>::infinity();
  if (cfg.f_amplitude != 0.0) bound = std::min(bound, cfg.alpha());
  if (cfg.g_amplitude != 0.0) bound = std::min(bound, cfg.beta());
  table.lambda_in_range = std::isfinite(bound) && lambda > 0.0 &&
                          lambda < bound;

  for (double gap : gaps) {
    // Per-path average of ||U(a+gap)-U(a)||^r over anchors, so standard
    // errors come from independent paths.
    std::vector<double> powers(n_paths, 0.0);
    for (double a : anchors) {
      const int ia = ensemble.time_index_of(a);
      const int ib = ensemble.time_index_of(a + gap);
      for (int i = 0; i < n_paths; ++i) {
        const Eigen::ArrayXcd diff =
            ensemble.spectra[i][ib] - ensemble.spectra[i][ia];
        const double norm =
            besov_norm(GridField::from_spectrum(cfg.d, cfg.N, diff),
                       table.sigma_eff, cfg.p, cfg.q,
                       window_bank(cfg.d, cfg.N));
        powers[i] += std::pow(norm, r) / static_cast<double>(anchors.size());
      }
    }
    double mean = 0.0, sq = 0.0;
    for (double v : powers) mean += v;
    mean /= n_paths;
    for (double v : powers) sq += (v - mean) * (v - mean);
    MomentEstimate est;
    est.p = r;
    est.count = n_paths;
    est.mean_power = mean;
    est.se_power = std::sqrt(sq / n_paths / n_paths);
    est.value = std::pow(mean, 1.0 / r);
    est.std_error =
        mean > 0.0 ? est.value / (r * mean) * est.se_power : 0.0;
    table.gaps.push_back(gap);
    table.moments.push_back(est);
  }

  std::vector<double> x(table.gaps.size()), y(table.gaps.size());
  for (std::size_t i = 0; i < table.gaps.size(); ++i) {
    x[i] = table.gaps[i];
    y[i] = table.moments[i].value;
  }
  table.slope = loglog_slope(x, y);
  return table;
}

WeightedNormResult weighted_lr_alpha_norm(const Eigen::ArrayXd& grid,
                                          const Eigen::ArrayXd& values,
                                          double alpha, double r, double t) {
  require(r > 0.0, "weighted norm: r must be positive");
  require(grid.size() == values.size() && grid.size() >= 2,
          "weighted norm: need one value per grid point");
  require(grid[0] >= 0.0 && grid[grid.size() - 1] <= t * (1.0 + 1e-12),
          "weighted norm: grid must lie in [0, t]");
  for (Eigen::Index i = 1; i < grid.size(); ++i)
    require(grid[i] > grid[i - 1], "weighted norm: grid must increase");

  const double ar = alpha * r;
  double sum = 0.0;
  for (Eigen::Index i = 0; i + 1 < grid.size(); ++i) {
    const double dt = grid[i + 1] - grid[i];
    const double mid = 0.5 * (grid[i] + grid[i + 1]);
    const double v = 0.5 * (values[i] + values[i + 1]);
    sum += dt * std::pow(t - mid, -ar) * std::pow(std::abs(v), r);
  }
  WeightedNormResult result;
  result.value = std::pow(sum, 1.0 / r);
  result.diverged =
      ar >= 1.0 && std::abs(values[values.size() - 1]) > 0.0;
  return result;
}

IdentityReport check_solution_identity(
    const HeatExperimentConfig& config,
    const std::vector<std::pair<int, int>>& test_modes,
    const std::vector<int>& refinements) {
  require(!test_modes.empty() && !refinements.empty(),
          "identity: need test modes and refinements");
  IdentityReport report;

  for (int steps : refinements) {
    require(steps >= 2 && (steps & (steps - 1)) == 0,
            "identity: refinements must be powers of two");
    HeatExperimentConfig cfg = config;
    cfg.times.clear();
    for (int i = 1; i < steps; ++i)
      cfg.times.push_back(config.T * i / static_cast<double>(steps));
    cfg.retain_increments = true;
    const SolutionEnsemble ens = simulate_mild_solution(cfg);
    const ModeTable modes(cfg.d, cfg.N);
    const int n_paths = static_cast<int>(ens.spectra.size());
    const Eigen::Index n_times = ens.time_grid.size();

    double worst = 0.0;
    for (const auto& [k0, k1] : test_modes) {
      const int idx = modes.scratch.index_of_freq(k0, k1);
      const double rho = modes.rho[idx];
      const double f_k = radial_coefficient(cfg.f_amplitude, cfg.f_decay,
                                            modes.scratch.freq_sq(idx));
      const double g_k = g_coefficient(cfg, modes.scratch.freq_sq(idx));
      double sq_sum = 0.0;
      for (int i = 0; i < n_paths; ++i) {
        // Trapezoid of int <U, Lap e_k> ds = -rho int U_k ds, exact f term,
        // and the Brownian term reconstructed from retained increments.
        std::complex<double> integral = 0.0;
        std::complex<double> wiener = 0.0;
        for (Eigen::Index s = 0; s + 1 < n_times; ++s) {
          const double dt = ens.time_grid[s + 1] - ens.time_grid[s];
          integral += 0.5 * dt *
                      (ens.spectra[i][s][idx] + ens.spectra[i][s + 1][idx]);
          wiener += ens.increments[i][s][idx];
        }
        const std::complex<double> residual =
            ens.spectra[i][n_times - 1][idx] - ens.spectra[i][0][idx] +
            rho * integral - f_k * cfg.T - g_k * wiener;
        sq_sum += std::norm(residual);
        if (rho == 0.0)
          report.zero_mode_residual =
              std::max(report.zero_mode_residual, std::abs(residual));
      }
      worst = std::max(worst, std::sqrt(sq_sum / n_paths));
    }
    report.steps.push_back(steps);
    report.residuals.push_back(worst);
  }

  std::vector<double> x(report.steps.size()), y(report.steps.size());
  for (std::size_t i = 0; i < report.steps.size(); ++i) {
    x[i] = 1.0 / report.steps[i];  // slope against the step size
    y[i] = report.residuals[i];
  }
  report.slope = loglog_slope(x, y);
  report.pass = report.slope >= 0.9;
  return report;
}

}  // namespace qlab
