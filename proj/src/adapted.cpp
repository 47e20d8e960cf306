#include "qlab/adapted.hpp"

#include <algorithm>
#include <cmath>

namespace qlab {

namespace {

void validate_partition(const Eigen::ArrayXd& partition) {
  require(partition.size() >= 2, "adapted: partition needs >= 2 points");
  require(partition[0] == 0.0, "adapted: partition must start at 0");
  for (Eigen::Index i = 1; i < partition.size(); ++i)
    require(partition[i] > partition[i - 1],
            "adapted: partition must be strictly increasing");
}

int step_of(const Eigen::ArrayXd& partition, double right_end) {
  for (Eigen::Index j = 1; j < partition.size(); ++j)
    if (right_end <= partition[j] + 1e-12 * partition[partition.size() - 1])
      return static_cast<int>(j) - 1;
  throw ValidationError("adapted: grid point beyond the horizon");
}

// Index of `t` in `grid`, required to be present (grid refines everything
// we evaluate at).
int grid_index_of(const Eigen::ArrayXd& grid, double t, double tol) {
  for (Eigen::Index i = 0; i < grid.size(); ++i)
    if (std::abs(grid[i] - t) <= tol) return static_cast<int>(i);
  throw ValidationError("adapted: time is not a grid point");
}

void validate_noise_grid(const Eigen::ArrayXd& partition,
                         const Eigen::ArrayXd& grid) {
  require(grid.size() >= 2 && grid[0] == 0.0,
          "adapted: noise grid must start at 0");
  for (Eigen::Index i = 1; i < grid.size(); ++i)
    require(grid[i] > grid[i - 1], "adapted: noise grid must increase");
  const double T = partition[partition.size() - 1];
  const double tol = 1e-12 * T;
  require(std::abs(grid[grid.size() - 1] - T) <= tol,
          "adapted: noise grid must end at the horizon");
  for (Eigen::Index j = 0; j < partition.size(); ++j)
    grid_index_of(grid, partition[j], tol);
}

// Cells of `grid` whose right endpoint lies at or before each step's
// cutoff t_{j-1}; rules for step j may read exactly this many rows.
std::vector<int> visible_cells_per_step(const Eigen::ArrayXd& partition,
                                        const Eigen::ArrayXd& grid) {
  const double tol = 1e-12 * partition[partition.size() - 1];
  std::vector<int> visible(partition.size() - 1);
  for (Eigen::Index j = 1; j < partition.size(); ++j)
    visible[j - 1] = grid_index_of(grid, partition[j - 1], tol);
  return visible;
}

// Realized coefficient table for one path: rules evaluated once per step
// against the truncated record of that path's primary increments.
std::vector<std::vector<const RVector*>> realize_coefficients(
    const ElementaryAdaptedProcess& phi, const Eigen::MatrixXd& dw,
    const std::vector<int>& visible) {
  std::vector<std::vector<const RVector*>> coeff(phi.rules.size());
  for (std::size_t j = 0; j < phi.rules.size(); ++j) {
    const PastRecord past(dw, visible[j]);
    coeff[j].reserve(phi.rules[j].size());
    for (const CoeffRule& rule : phi.rules[j])
      coeff[j].push_back(&rule.evaluate(past));
  }
  return coeff;
}

}  // namespace

double PastRecord::increment(int cell, int k) const {
  require_shape(cell >= 0 && cell < visible_,
                "past record: cell outside the visible range");
  require_shape(k >= 0 && k < static_cast<int>(dw_->cols()),
                "past record: component out of range");
  return (*dw_)(cell, k);
}

double PastRecord::running_sum(int k) const {
  require_shape(k >= 0 && k < static_cast<int>(dw_->cols()),
                "past record: component out of range");
  if (visible_ == 0) return 0.0;
  return dw_->col(k).head(visible_).sum();
}

CoeffRule CoeffRule::constant(RVector v) {
  CoeffRule rule;
  rule.kind = Kind::Constant;
  rule.base = std::move(v);
  rule.alt = rule.base;
  return rule;
}

CoeffRule CoeffRule::sign_flip(RVector v, int probe_k) {
  CoeffRule rule;
  rule.kind = Kind::SignFlip;
  rule.base = v;
  rule.alt = RVector(v.space, -v.data);
  rule.probe_k = probe_k;
  return rule;
}

CoeffRule CoeffRule::threshold(RVector below, RVector above, int probe_k,
                               double level) {
  CoeffRule rule;
  rule.kind = Kind::Threshold;
  rule.base = std::move(below);
  rule.alt = std::move(above);
  rule.probe_k = probe_k;
  rule.level = level;
  return rule;
}

const RVector& CoeffRule::evaluate(const PastRecord& past) const {
  switch (kind) {
    case Kind::Constant:
      return base;
    case Kind::SignFlip:
      return past.running_sum(probe_k) < 0.0 ? alt : base;
    case Kind::Threshold:
      return past.running_sum(probe_k) > level ? alt : base;
  }
  throw StructuralError("coeff rule: unknown kind");
}

ElementaryAdaptedProcess::ElementaryAdaptedProcess(
    Eigen::ArrayXd partition_, Eigen::MatrixXd ons_,
    std::vector<std::vector<CoeffRule>> rules_)
    : partition(std::move(partition_)),
      ons(std::move(ons_)),
      rules(std::move(rules_)) {
  validate_partition(partition);
  require_shape(ons.rows() >= ons.cols(),
                "adapted: more ONS vectors than Hilbert dimensions");
  const Eigen::Index K = ons.cols();
  require_shape(
      (ons.transpose() * ons - Eigen::MatrixXd::Identity(K, K)).norm() <=
          1e-10,
      "adapted: ONS columns must be orthonormal");
  require_shape(static_cast<int>(rules.size()) == steps(),
                "adapted: one rule row per step required");
  require(!rules.empty() && !rules[0].empty(), "adapted: empty rule table");
  const RSpaceDescriptor& sp = rules[0][0].base.space;
  for (const auto& row : rules) {
    require_shape(static_cast<Eigen::Index>(row.size()) == K,
                  "adapted: one rule per ONS vector required");
    for (const CoeffRule& rule : row) {
      require_shape(rule.base.space.same_as(sp) && rule.alt.space.same_as(sp),
                    "adapted: all rule values must share one space");
      require(rule.probe_k >= 0 && rule.probe_k < static_cast<int>(K),
              "adapted: probe component out of range");
    }
  }
  space = sp;
}

FiniteRankStepFunction ElementaryAdaptedProcess::freeze() const {
  std::vector<std::vector<RVector>> coeff(rules.size());
  for (std::size_t j = 0; j < rules.size(); ++j) {
    for (const CoeffRule& rule : rules[j]) {
      require(rule.kind == CoeffRule::Kind::Constant,
              "freeze: only constant rules have a deterministic value");
      coeff[j].push_back(rule.base);
    }
  }
  return FiniteRankStepFunction(partition, ons, std::move(coeff));
}

NoiseRecord make_noise(const Eigen::ArrayXd& grid, int K, std::int64_t count,
                       std::uint64_t seed) {
  require(grid.size() >= 2 && grid[0] == 0.0,
          "make_noise: grid must start at 0");
  for (Eigen::Index i = 1; i < grid.size(); ++i)
    require(grid[i] > grid[i - 1], "make_noise: grid must increase");
  require(K >= 1, "make_noise: need at least one component");
  require(count >= 1, "make_noise: need at least one path");

  NoiseRecord noise;
  noise.grid = grid;
  noise.K = K;
  noise.seed = seed;
  CounterRng primary_root(seed, "noise");
  CounterRng decoupled_root(seed, "decoupled");
  noise.primary.reserve(count);
  noise.decoupled.reserve(count);
  const Eigen::Index cells = grid.size() - 1;
  for (std::int64_t i = 0; i < count; ++i) {
    CounterRng rng_p = primary_root.child(static_cast<std::uint64_t>(i));
    CounterRng rng_d = decoupled_root.child(static_cast<std::uint64_t>(i));
    Eigen::MatrixXd dw_p(cells, K), dw_d(cells, K);
    for (Eigen::Index l = 0; l < cells; ++l) {
      const double sd = std::sqrt(grid[l + 1] - grid[l]);
      for (int k = 0; k < K; ++k) dw_p(l, k) = sd * rng_p.next_gaussian();
      for (int k = 0; k < K; ++k) dw_d(l, k) = sd * rng_d.next_gaussian();
    }
    noise.primary.push_back(std::move(dw_p));
    noise.decoupled.push_back(std::move(dw_d));
  }
  return noise;
}

namespace {

// Shared accumulation: coefficients realized from the primary increments,
// integration against `integrating` (primary or the decoupled copy).
IntegralPathEnsemble accumulate(const ElementaryAdaptedProcess& phi,
                                const NoiseRecord& noise,
                                const std::vector<Eigen::MatrixXd>& integrating) {
  require_shape(noise.K == phi.ons_size(),
                "adapted: noise component count must match the ONS");
  validate_noise_grid(phi.partition, noise.grid);
  const std::vector<int> visible =
      visible_cells_per_step(phi.partition, noise.grid);

  IntegralPathEnsemble ens;
  ens.space = phi.space;
  ens.grid = noise.grid;
  ens.seed = noise.seed;
  ens.paths.resize(noise.primary.size());
  ens.increments = integrating;
  const Eigen::Index cells = noise.grid.size() - 1;
  const int K = phi.ons_size();
  for (std::size_t i = 0; i < noise.primary.size(); ++i) {
    const auto coeff = realize_coefficients(phi, noise.primary[i], visible);
    const Eigen::MatrixXd& dw = integrating[i];
    Eigen::ArrayXd value = Eigen::ArrayXd::Zero(phi.space.size());
    ens.paths[i].reserve(noise.grid.size());
    ens.paths[i].push_back(value);
    for (Eigen::Index l = 0; l < cells; ++l) {
      const int j = step_of(phi.partition, noise.grid[l + 1]);
      for (int k = 0; k < K; ++k) value += coeff[j][k]->data * dw(l, k);
      ens.paths[i].push_back(value);
    }
  }
  return ens;
}

}  // namespace

IntegralPathEnsemble integrate_adapted(const ElementaryAdaptedProcess& phi,
                                       const NoiseRecord& noise) {
  return accumulate(phi, noise, noise.primary);
}

IntegralPathEnsemble decoupled_integral(const ElementaryAdaptedProcess& phi,
                                        const NoiseRecord& noise) {
  return accumulate(phi, noise, noise.decoupled);
}

IntegralPathEnsemble integrate_step_function(const FiniteRankStepFunction& phi,
                                             const NoiseRecord& noise) {
  std::vector<std::vector<CoeffRule>> rules(phi.coeff.size());
  for (std::size_t j = 0; j < phi.coeff.size(); ++j)
    for (const RVector& x : phi.coeff[j])
      rules[j].push_back(CoeffRule::constant(x));
  const ElementaryAdaptedProcess as_process(phi.partition, phi.ons,
                                            std::move(rules));
  return accumulate(as_process, noise, noise.primary);
}

DecouplingEstimate estimate_decoupling_constant(
    const std::vector<ElementaryAdaptedProcess>& family, double p,
    std::int64_t count, std::uint64_t seed) {
  require(!family.empty(), "decoupling: empty family");
  require(p > 0.0, "decoupling: moment exponent must be positive");
  CounterRng root(seed, "decoupling");

  DecouplingEstimate est;
  est.degenerate = true;
  for (std::size_t n = 0; n < family.size(); ++n) {
    const ElementaryAdaptedProcess& phi = family[n];
    const NoiseRecord noise =
        make_noise(phi.partition, phi.ons_size(), count, root.child(n).key());
    const IntegralPathEnsemble coupled = integrate_adapted(phi, noise);
    const IntegralPathEnsemble indep = decoupled_integral(phi, noise);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < coupled.paths.size(); ++i) {
      double sup = 0.0;
      for (const Eigen::ArrayXd& v : coupled.paths[i])
        sup = std::max(sup, rnorm(phi.space, v));
      num += std::pow(sup, p);
      den += std::pow(rnorm(phi.space, indep.paths[i].back()), p);
    }
    double ratio = 0.0;
    if (den > 0.0) {
      ratio = std::pow(num / den, 1.0 / p);
      est.degenerate = false;
    }
    est.per_process.push_back(ratio);
    est.value = std::max(est.value, ratio);
  }
  return est;
}

namespace {

struct MomentPair {
  double lhs = 0.0, se_lhs = 0.0;  // E sup ||path||^p
  double rhs = 0.0, se_rhs = 0.0;  // E ||R_Phi(omega)||_{gamma^p}^p
};

// Outer paths drive the coefficients; per path the realized operator's
// gamma norm moment comes from `inner` fresh Gaussian resamples.
MomentPair bdg_moments(const ElementaryAdaptedProcess& phi, double p,
                       std::int64_t count, std::uint64_t noise_seed,
                       std::uint64_t inner_seed, int inner) {
  const NoiseRecord noise =
      make_noise(phi.partition, phi.ons_size(), count, noise_seed);
  const IntegralPathEnsemble ens = integrate_adapted(phi, noise);
  const std::vector<int> visible =
      visible_cells_per_step(phi.partition, noise.grid);
  CounterRng inner_root(inner_seed, "bdg-inner");

  const int J = phi.steps();
  const int K = phi.ons_size();
  double sum_l = 0.0, sq_l = 0.0, sum_r = 0.0, sq_r = 0.0;
  for (std::size_t i = 0; i < ens.paths.size(); ++i) {
    double sup = 0.0;
    for (const Eigen::ArrayXd& v : ens.paths[i])
      sup = std::max(sup, rnorm(phi.space, v));
    const double lhs_i = std::pow(sup, p);

    const auto coeff = realize_coefficients(phi, noise.primary[i], visible);
    Eigen::MatrixXd images(phi.space.size(), J * K);
    for (int j = 0; j < J; ++j) {
      const double sd = std::sqrt(phi.partition[j + 1] - phi.partition[j]);
      for (int k = 0; k < K; ++k)
        images.col(j * K + k) = sd * coeff[j][k]->data.matrix();
    }
    const MomentEstimate me = gamma_matrix_norm(
        phi.space, images, p, inner, inner_root.child(i).key());
    const double rhs_i = me.mean_power;

    sum_l += lhs_i;
    sq_l += lhs_i * lhs_i;
    sum_r += rhs_i;
    sq_r += rhs_i * rhs_i;
  }
  const double n = static_cast<double>(ens.paths.size());
  MomentPair out;
  out.lhs = sum_l / n;
  out.rhs = sum_r / n;
  out.se_lhs = std::sqrt(std::max(0.0, sq_l / n - out.lhs * out.lhs) / n);
  out.se_rhs = std::sqrt(std::max(0.0, sq_r / n - out.rhs * out.rhs) / n);
  return out;
}

}  // namespace

BdgReport check_bdg(const ElementaryAdaptedProcess& phi, double p,
                    std::int64_t count, std::uint64_t seed, double c_hat,
                    int inner_resamples) {
  require(p > 0.0, "bdg: moment exponent must be positive");
  require(count >= 8, "bdg: need at least 8 paths");
  CounterRng root(seed, "bdg");

  BdgReport report;
  if (c_hat <= 0.0) {
    // Disjoint quarter-size subrun fixes the constant before the main run.
    const std::int64_t sub = std::max<std::int64_t>(count / 4, 32);
    const MomentPair cal =
        bdg_moments(phi, p, sub, root.child("calibrate-noise").key(),
                    root.child("calibrate-inner").key(), inner_resamples);
    c_hat = cal.rhs > 0.0 ? 1.5 * std::pow(cal.lhs / cal.rhs, 1.0 / p) : 1.5;
  }
  const MomentPair main =
      bdg_moments(phi, p, count, root.child("main-noise").key(),
                  root.child("main-inner").key(), inner_resamples);
  report.lhs = main.lhs;
  report.se_lhs = main.se_lhs;
  report.rhs = main.rhs;
  report.se_rhs = main.se_rhs;
  report.c_hat = c_hat;
  const double scale = std::pow(c_hat, p);
  report.pass =
      main.lhs <= scale * main.rhs + 3.0 * (main.se_lhs + scale * main.se_rhs);
  return report;
}

StoppedIntegralReport stopped_integral(const ElementaryAdaptedProcess& phi,
                                       const NoiseRecord& noise,
                                       const StopRule& rule) {
  const IntegralPathEnsemble ens = integrate_adapted(phi, noise);
  const std::vector<int> visible =
      visible_cells_per_step(phi.partition, noise.grid);
  const double T = phi.horizon();
  const double tol = 1e-12 * T;

  // Grid indices of the partition points, where stopping may happen.
  std::vector<int> stop_candidates(phi.partition.size());
  for (Eigen::Index j = 0; j < phi.partition.size(); ++j)
    stop_candidates[j] = grid_index_of(noise.grid, phi.partition[j], tol);
  if (rule.kind == StopRule::Kind::Fixed)
    grid_index_of(phi.partition, rule.value, tol);  // must be a partition point

  StoppedIntegralReport report;
  for (std::size_t i = 0; i < ens.paths.size(); ++i) {
    // tau: fixed partition time, or the first partition time at which the
    // running integral's norm exceeds the level ({tau <= t_j} reads only
    // the path up to t_j, so this is a legitimate stopping rule).
    int tau_idx = stop_candidates.back();
    if (rule.kind == StopRule::Kind::Fixed) {
      for (std::size_t j = 0; j < stop_candidates.size(); ++j)
        if (std::abs(phi.partition[j] - rule.value) <= tol)
          tau_idx = stop_candidates[j];
    } else {
      for (int g : stop_candidates)
        if (rnorm(phi.space, ens.paths[i][g]) > rule.value) {
          tau_idx = g;
          break;
        }
    }
    const double tau = noise.grid[tau_idx];
    report.stop_times.push_back(tau);

    // Truncated integrand, integrated to the horizon: same coefficients,
    // increments zeroed past tau.
    const auto coeff = realize_coefficients(phi, noise.primary[i], visible);
    Eigen::ArrayXd truncated = Eigen::ArrayXd::Zero(phi.space.size());
    for (Eigen::Index l = 0; l + 1 < noise.grid.size(); ++l) {
      if (noise.grid[l + 1] > tau + tol) continue;
      const int j = step_of(phi.partition, noise.grid[l + 1]);
      for (int k = 0; k < phi.ons_size(); ++k)
        truncated += coeff[j][k]->data * noise.primary[i](l, k);
    }
    const double diff =
        (ens.paths[i][tau_idx] - truncated).abs().maxCoeff();
    report.max_discrepancy = std::max(report.max_discrepancy, diff);
  }
  report.pass = report.max_discrepancy <= 1e-12;
  return report;
}

ElementaryAdaptedProcess approximate_adapted(const FiniteRankOperator& R,
                                             int n_components,
                                             int shift_level, int proj_level) {
  require(n_components >= 1, "approximate: need at least one component");
  require(shift_level >= 0 && proj_level >= shift_level,
          "approximate: projection level must be at least the shift level");
  const int M = R.hilbert_dim();
  require_shape(M % n_components == 0,
                "approximate: Hilbert dimension must split into components");
  const int fine_cells = M / n_components;
  int fine_level = 0;
  while ((1 << fine_level) < fine_cells) ++fine_level;
  require_shape((1 << fine_level) == fine_cells,
                "approximate: fine cell count must be a power of two");
  require(fine_level >= proj_level,
          "approximate: fine grid must refine the projection level");

  const int blocks = 1 << proj_level;
  const double block_len = 1.0 / blocks;
  // Fine cells per block, and the whole-cell shift 2^{-K} = shift_cells fine
  // cells (exact since fine_level >= shift_level).
  const int per_block = 1 << (fine_level - proj_level);
  const int shift_cells = 1 << (fine_level - shift_level);
  const double fine_weight = std::pow(2.0, -0.5 * fine_level);
  const double scale = static_cast<double>(blocks);

  Eigen::ArrayXd partition(blocks + 1);
  for (int j = 0; j <= blocks; ++j) partition[j] = j * block_len;

  std::vector<std::vector<CoeffRule>> rules(blocks);
  Eigen::VectorXd unit = Eigen::VectorXd::Zero(M);
  for (int j = 1; j <= blocks; ++j) {
    // Level-L block j shifted left by 2^{-K}, clipped to [0,1]: coefficient
    // X_{j,l} = 2^L R(1_block (x) h_l) reads R strictly before t_{j-1}.
    const int u_begin = std::max((j - 1) * per_block - shift_cells, 0);
    const int u_end = std::max(j * per_block - shift_cells, 0);
    for (int l = 0; l < n_components; ++l) {
      Eigen::ArrayXd x = Eigen::ArrayXd::Zero(R.space().size());
      for (int u = u_begin; u < u_end; ++u) {
        const int idx = u * n_components + l;
        unit[idx] = 1.0;
        x += R.apply(unit);
        unit[idx] = 0.0;
      }
      x *= scale * fine_weight;
      rules[j - 1].push_back(
          CoeffRule::constant(RVector(R.space(), std::move(x))));
    }
  }
  return ElementaryAdaptedProcess(
      partition, Eigen::MatrixXd::Identity(n_components, n_components),
      std::move(rules));
}

FiniteRankOperator represent_elementary_on_fine_basis(
    const ElementaryAdaptedProcess& phi, int n_components, int fine_level) {
  require_shape(phi.ons.rows() == n_components &&
                    phi.ons.cols() == n_components &&
                    phi.ons.isIdentity(1e-12),
                "represent: process ONS must be the identity");
  require(std::abs(phi.horizon() - 1.0) <= 1e-12,
          "represent: unit horizon required");
  const int fine_cells = 1 << fine_level;
  const double fine_weight = std::pow(2.0, -0.5 * fine_level);

  std::vector<RVector> vectors;
  vectors.reserve(static_cast<std::size_t>(fine_cells) * n_components);
  for (int u = 0; u < fine_cells; ++u) {
    const double right = (u + 1) * std::pow(2.0, -fine_level);
    const int j = step_of(phi.partition, right);
    for (int l = 0; l < n_components; ++l) {
      const CoeffRule& rule = phi.rules[j][l];
      require(rule.kind == CoeffRule::Kind::Constant,
              "represent: only constant rules define an operator");
      vectors.emplace_back(rule.base.space,
                           (fine_weight * rule.base.data).eval());
    }
  }
  const int M = fine_cells * n_components;
  return FiniteRankOperator(Eigen::MatrixXd::Identity(M, M),
                            std::move(vectors));
}

}  // namespace qlab
