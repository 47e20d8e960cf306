#pragma once

#include <cstdint>
#include <vector>

#include "qlab/gammaop.hpp"
#include "qlab/qspace.hpp"

namespace qlab {

// Piecewise-constant operator-valued integrand
//   Phi(t) = sum_j 1_{(t_{j-1},t_j]}(t) sum_k h_k (x) x_{j,k}
// on 0 = t_0 < ... < t_J = T with h_1..h_K orthonormal in R^M.
struct FiniteRankStepFunction {
  Eigen::ArrayXd partition;                  // J+1 points
  Eigen::MatrixXd ons;                       // M x K orthonormal columns
  std::vector<std::vector<RVector>> coeff;   // [j][k]
  RSpaceDescriptor space;

  FiniteRankStepFunction(Eigen::ArrayXd partition_, Eigen::MatrixXd ons_,
                         std::vector<std::vector<RVector>> coeff_);

  int steps() const { return static_cast<int>(partition.size()) - 1; }
  int ons_size() const { return static_cast<int>(ons.cols()); }
  double horizon() const { return partition[partition.size() - 1]; }
};

// Simulated integral process: values on a refining time grid plus the
// Brownian increments that produced them (retained so coupled identities —
// series expansion, stopping, linearity — can be checked pathwise).
struct IntegralPathEnsemble {
  RSpaceDescriptor space;
  Eigen::ArrayXd grid;                             // starts at 0, ends at T
  std::vector<std::vector<Eigen::ArrayXd>> paths;  // [path][grid point]
  std::vector<Eigen::MatrixXd> increments;         // [path]: (cells) x K
  std::uint64_t seed = 0;
};

// The operator represented by Phi on the step-indicator basis of
// L^2(0,T;H): orthonormal member (j,k) maps to sqrt(t_j - t_{j-1}) x_{j,k}.
FiniteRankOperator represent_operator(const FiniteRankStepFunction& phi);

// Time grid = the partition refined dyadically `levels` times per step.
Eigen::ArrayXd refine_dyadic(const Eigen::ArrayXd& partition, int levels);

IntegralPathEnsemble simulate_paths(const FiniteRankStepFunction& phi,
                                    const Eigen::ArrayXd& grid,
                                    std::int64_t count, std::uint64_t seed);

// Streaming variants that avoid storing whole ensembles.
std::vector<double> final_value_norms(const FiniteRankStepFunction& phi,
                                      std::int64_t count, std::uint64_t seed);
std::vector<double> sup_norms(const FiniteRankStepFunction& phi,
                              const Eigen::ArrayXd& grid, std::int64_t count,
                              std::uint64_t seed);

// 2^{-(1-r^p)/(r^p)} ||R||_{gamma^p} <= ||path(T)||_{L^p} <= ||R||_{gamma^p}.
struct ItoBoundReport {
  MomentEstimate integral;    // ||path(T)||_{L^p}
  GammaNormEstimate gamma;    // gamma^p norm data of R_Phi
  double lower_constant = 1.0;
  bool lower_pass = false;
  bool upper_pass = false;
  bool pass = false;
};
ItoBoundReport check_ito_bounds(const FiniteRankStepFunction& phi, double p,
                                std::int64_t count, std::uint64_t seed,
                                int ons_trials = 12);

// 2^{-(1-r^p)/(r^p)} ||R||_{gamma^p}
//   <= (E sup_t ||path(t)||^p)^{1/p} <= 2^{1/p+1/r-1} ||R||_{gamma^p},
// the sup taken over a dyadic refinement of the partition.
struct SupBoundReport {
  MomentEstimate sup_moment;
  GammaNormEstimate gamma;
  double lower_constant = 1.0;
  double upper_constant = 1.0;
  bool lower_pass = false;
  bool upper_pass = false;
  bool pass = false;
};
SupBoundReport check_sup_bound(const FiniteRankStepFunction& phi, double p,
                               std::int64_t count, std::uint64_t seed,
                               int refine_levels = 4, int ons_trials = 12);

// Pathwise agreement (max abs coordinate error) between the direct integral
// and the sum over ONS indices of per-component integrals driven by the
// same retained increments.
struct SeriesExpansionReport {
  double max_discrepancy = 0.0;
  bool pass = false;  // max_discrepancy <= 1e-10
};
SeriesExpansionReport check_series_expansion(const FiniteRankStepFunction& phi,
                                             std::int64_t count,
                                             std::uint64_t seed);

}  // namespace qlab
