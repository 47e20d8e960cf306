#include "qlab/wiener.hpp"

#include <algorithm>
#include <cmath>

namespace qlab {

namespace {

void validate_partition(const Eigen::ArrayXd& partition) {
  require(partition.size() >= 2, "step function: partition needs >= 2 points");
  require(partition[0] == 0.0, "step function: partition must start at 0");
  for (Eigen::Index i = 1; i < partition.size(); ++i)
    require(partition[i] > partition[i - 1],
            "step function: partition must be strictly increasing");
}

// Index j of the partition step (t_{j-1}, t_j] containing the cell that ends
// at grid point g (grid refines the partition, so no cell straddles a step).
int step_of(const Eigen::ArrayXd& partition, double right_end) {
  for (Eigen::Index j = 1; j < partition.size(); ++j)
    if (right_end <= partition[j] + 1e-12 * partition[partition.size() - 1])
      return static_cast<int>(j) - 1;
  throw ValidationError("step function: grid point beyond the horizon");
}

}  // namespace

FiniteRankStepFunction::FiniteRankStepFunction(
    Eigen::ArrayXd partition_, Eigen::MatrixXd ons_,
    std::vector<std::vector<RVector>> coeff_)
    : partition(std::move(partition_)),
      ons(std::move(ons_)),
      coeff(std::move(coeff_)) {
  validate_partition(partition);
  require_shape(ons.rows() >= ons.cols(),
                "step function: more ONS vectors than Hilbert dimensions");
  require_shape(static_cast<int>(coeff.size()) == steps(),
                "step function: one coefficient row per step required");
  const Eigen::Index K = ons.cols();
  const Eigen::MatrixXd gram = ons.transpose() * ons;
  require_shape(
      (gram - Eigen::MatrixXd::Identity(K, K)).cwiseAbs().maxCoeff() <= 1e-10,
      "step function: ONS Gram deviates from identity");
  space = coeff.front().front().space;
  for (const auto& row : coeff) {
    require_shape(static_cast<Eigen::Index>(row.size()) == K,
                  "step function: coefficient row length != ONS size");
    for (const auto& x : row)
      require_shape(x.space.same_as(space),
                    "step function: coefficients live in different spaces");
  }
}

FiniteRankOperator represent_operator(const FiniteRankStepFunction& phi) {
  const int J = phi.steps();
  const int K = phi.ons_size();
  std::vector<RVector> vectors;
  vectors.reserve(static_cast<size_t>(J) * K);
  for (int j = 0; j < J; ++j) {
    const double scale = std::sqrt(phi.partition[j + 1] - phi.partition[j]);
    for (int k = 0; k < K; ++k)
      vectors.emplace_back(phi.space,
                           scale * phi.coeff[static_cast<size_t>(j)]
                                       [static_cast<size_t>(k)]
                                           .data);
  }
  return FiniteRankOperator(
      Eigen::MatrixXd::Identity(J * K, J * K), std::move(vectors));
}

Eigen::ArrayXd refine_dyadic(const Eigen::ArrayXd& partition, int levels) {
  validate_partition(partition);
  require(levels >= 0, "refine_dyadic: levels must be nonnegative");
  const int per_step = 1 << levels;
  const Eigen::Index J = partition.size() - 1;
  Eigen::ArrayXd grid(J * per_step + 1);
  grid[0] = partition[0];
  Eigen::Index idx = 1;
  for (Eigen::Index j = 0; j < J; ++j)
    for (int s = 1; s <= per_step; ++s)
      grid[idx++] = partition[j] + (partition[j + 1] - partition[j]) *
                                       static_cast<double>(s) / per_step;
  return grid;
}

namespace {

void validate_grid(const FiniteRankStepFunction& phi,
                   const Eigen::ArrayXd& grid) {
  require(grid.size() >= 2 && grid[0] == 0.0,
          "simulate_paths: grid must start at 0");
  for (Eigen::Index i = 1; i < grid.size(); ++i)
    require(grid[i] > grid[i - 1], "simulate_paths: grid must increase");
  const double tol = 1e-12 * phi.horizon();
  require(std::abs(grid[grid.size() - 1] - phi.horizon()) <= tol,
          "simulate_paths: grid must end at the horizon");
  // Every partition point must appear in the grid (refinement).
  for (Eigen::Index j = 0; j < phi.partition.size(); ++j) {
    bool found = false;
    for (Eigen::Index i = 0; i < grid.size() && !found; ++i)
      found = std::abs(grid[i] - phi.partition[j]) <= tol;
    require(found, "simulate_paths: grid does not refine the partition");
  }
}

// One path's increments: rows = grid cells, cols = ONS indices.
Eigen::MatrixXd draw_increments(const Eigen::ArrayXd& grid, int K,
                                CounterRng& rng) {
  Eigen::MatrixXd dw(grid.size() - 1, K);
  for (Eigen::Index l = 0; l + 1 < grid.size(); ++l) {
    const double sd = std::sqrt(grid[l + 1] - grid[l]);
    for (int k = 0; k < K; ++k) dw(l, k) = sd * rng.next_gaussian();
  }
  return dw;
}

}  // namespace

IntegralPathEnsemble simulate_paths(const FiniteRankStepFunction& phi,
                                    const Eigen::ArrayXd& grid,
                                    std::int64_t count, std::uint64_t seed) {
  validate_grid(phi, grid);
  require(count > 0, "simulate_paths: count must be positive");
  const int K = phi.ons_size();
  const int size = phi.space.size();
  IntegralPathEnsemble ens;
  ens.space = phi.space;
  ens.grid = grid;
  ens.seed = seed;
  ens.paths.reserve(static_cast<size_t>(count));
  ens.increments.reserve(static_cast<size_t>(count));
  CounterRng root(seed, "wiener-paths");
  for (std::int64_t i = 0; i < count; ++i) {
    CounterRng rng = root.child(static_cast<std::uint64_t>(i));
    Eigen::MatrixXd dw = draw_increments(grid, K, rng);
    std::vector<Eigen::ArrayXd> path;
    path.reserve(static_cast<size_t>(grid.size()));
    Eigen::ArrayXd value = Eigen::ArrayXd::Zero(size);
    path.push_back(value);
    for (Eigen::Index l = 0; l + 1 < grid.size(); ++l) {
      const int j = step_of(phi.partition, grid[l + 1]);
      for (int k = 0; k < K; ++k)
        value += dw(l, k) *
                 phi.coeff[static_cast<size_t>(j)][static_cast<size_t>(k)].data;
      path.push_back(value);
    }
    ens.paths.push_back(std::move(path));
    ens.increments.push_back(std::move(dw));
  }
  return ens;
}

std::vector<double> final_value_norms(const FiniteRankStepFunction& phi,
                                      std::int64_t count, std::uint64_t seed) {
  require(count > 0, "final_value_norms: count must be positive");
  const int K = phi.ons_size();
  std::vector<double> norms;
  norms.reserve(static_cast<size_t>(count));
  CounterRng root(seed, "wiener-paths");
  for (std::int64_t i = 0; i < count; ++i) {
    CounterRng rng = root.child(static_cast<std::uint64_t>(i));
    Eigen::ArrayXd value = Eigen::ArrayXd::Zero(phi.space.size());
    for (int j = 0; j < phi.steps(); ++j) {
      const double sd = std::sqrt(phi.partition[j + 1] - phi.partition[j]);
      for (int k = 0; k < K; ++k)
        value += sd * rng.next_gaussian() *
                 phi.coeff[static_cast<size_t>(j)][static_cast<size_t>(k)].data;
    }
    norms.push_back(rnorm(phi.space, value));
  }
  return norms;
}

std::vector<double> sup_norms(const FiniteRankStepFunction& phi,
                              const Eigen::ArrayXd& grid, std::int64_t count,
                              std::uint64_t seed) {
  validate_grid(phi, grid);
  require(count > 0, "sup_norms: count must be positive");
  const int K = phi.ons_size();
  std::vector<double> sups;
  sups.reserve(static_cast<size_t>(count));
  CounterRng root(seed, "wiener-paths");
  for (std::int64_t i = 0; i < count; ++i) {
    CounterRng rng = root.child(static_cast<std::uint64_t>(i));
    Eigen::ArrayXd value = Eigen::ArrayXd::Zero(phi.space.size());
    double sup = 0.0;
    for (Eigen::Index l = 0; l + 1 < grid.size(); ++l) {
      const double sd = std::sqrt(grid[l + 1] - grid[l]);
      const int j = step_of(phi.partition, grid[l + 1]);
      for (int k = 0; k < K; ++k)
        value += sd * rng.next_gaussian() *
                 phi.coeff[static_cast<size_t>(j)][static_cast<size_t>(k)].data;
      sup = std::max(sup, rnorm(phi.space, value));
    }
    sups.push_back(sup);
  }
  return sups;
}

ItoBoundReport check_ito_bounds(const FiniteRankStepFunction& phi, double p,
                                std::int64_t count, std::uint64_t seed,
                                int ons_trials) {
  CounterRng root(seed, "ito-bounds");
  const FiniteRankOperator R = represent_operator(phi);
  ItoBoundReport rep;
  rep.gamma = gamma_sup_norm(R, p, ons_trials, count, root.child("gamma").key());
  rep.integral =
      estimate_moment(final_value_norms(phi, count, root.child("path").key()), p);
  rep.lower_constant = 1.0 / quasi_constant_for_r(std::min(phi.space.r, p));
  const double slack = 3.0 * (rep.integral.std_error + rep.gamma.std_error);
  rep.lower_pass =
      rep.lower_constant * rep.gamma.sup_value <= rep.integral.value + slack;
  rep.upper_pass = rep.integral.value <= rep.gamma.sup_value + slack;
  rep.pass = rep.lower_pass && rep.upper_pass;
  return rep;
}

SupBoundReport check_sup_bound(const FiniteRankStepFunction& phi, double p,
                               std::int64_t count, std::uint64_t seed,
                               int refine_levels, int ons_trials) {
  CounterRng root(seed, "sup-bound");
  const FiniteRankOperator R = represent_operator(phi);
  SupBoundReport rep;
  rep.gamma = gamma_sup_norm(R, p, ons_trials, count, root.child("gamma").key());
  const Eigen::ArrayXd grid = refine_dyadic(phi.partition, refine_levels);
  rep.sup_moment =
      estimate_moment(sup_norms(phi, grid, count, root.child("sup").key()), p);
  const double r = phi.space.r;
  rep.lower_constant = 1.0 / quasi_constant_for_r(std::min(r, p));
  rep.upper_constant = std::exp2(1.0 / p + 1.0 / r - 1.0);
  const double slack = 3.0 * (rep.sup_moment.std_error + rep.gamma.std_error);
  rep.lower_pass = rep.lower_constant * rep.gamma.sup_value <=
                   rep.sup_moment.value + slack;
  rep.upper_pass = rep.sup_moment.value <=
                   rep.upper_constant * rep.gamma.sup_value + slack;
  rep.pass = rep.lower_pass && rep.upper_pass;
  return rep;
}

SeriesExpansionReport check_series_expansion(const FiniteRankStepFunction& phi,
                                             std::int64_t count,
                                             std::uint64_t seed) {
  const IntegralPathEnsemble ens =
      simulate_paths(phi, phi.partition, count, seed);
  const int K = phi.ons_size();
  SeriesExpansionReport rep;
  for (size_t i = 0; i < ens.paths.size(); ++i) {
    // K scalar-component integrals R(.(x)h_k) . W(.(x)h_k), each accumulated
    // on its own, driven by the retained increments; their sum must
    // reproduce the direct path (the summation order genuinely differs).
    std::vector<Eigen::ArrayXd> component(
        static_cast<size_t>(K), Eigen::ArrayXd::Zero(phi.space.size()));
    for (Eigen::Index l = 0; l + 1 < ens.grid.size(); ++l) {
      const int j = step_of(phi.partition, ens.grid[l + 1]);
      for (int k = 0; k < K; ++k)
        component[static_cast<size_t>(k)] +=
            ens.increments[i](l, k) *
            phi.coeff[static_cast<size_t>(j)][static_cast<size_t>(k)].data;
      Eigen::ArrayXd total = Eigen::ArrayXd::Zero(phi.space.size());
      for (const auto& c : component) total += c;
      const double err =
          (total - ens.paths[i][static_cast<size_t>(l) + 1]).abs().maxCoeff();
      rep.max_discrepancy = std::max(rep.max_discrepancy, err);
    }
  }
  rep.pass = rep.max_discrepancy <= 1e-10;
  return rep;
}

}  // namespace qlab
