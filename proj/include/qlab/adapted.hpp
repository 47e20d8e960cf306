#pragma once

#include <cstdint>
#include <vector>

#include "qlab/wiener.hpp"

namespace qlab {

// What a coefficient rule is allowed to see: the increments of the cells
// that end at or before its cutoff.  Rules receive nothing else, so reading
// the future is impossible by construction, not by convention.
class PastRecord {
 public:
  PastRecord(const Eigen::MatrixXd& dw, int visible_cells)
      : dw_(&dw), visible_(visible_cells) {}
  int cells() const { return visible_; }
  double increment(int cell, int k) const;
  // W_k at the cutoff: sum of the visible increments of component k.
  double running_sum(int k) const;

 private:
  const Eigen::MatrixXd* dw_;
  int visible_;
};

// Past-measurable coefficient taking finitely many values.  `base`/`alt`
// are the two possible outcomes; the probe reads the running sum of one
// noise component at the cutoff.
struct CoeffRule {
  enum class Kind { Constant, SignFlip, Threshold };
  Kind kind = Kind::Constant;
  RVector base;
  RVector alt;
  int probe_k = 0;
  double level = 0.0;

  static CoeffRule constant(RVector v);
  // sign(W_probe(cutoff)) * v : base on nonnegative past sum, -v otherwise.
  static CoeffRule sign_flip(RVector v, int probe_k);
  // `above` when the past running sum exceeds `level`, `below` otherwise.
  static CoeffRule threshold(RVector below, RVector above, int probe_k,
                             double level);

  const RVector& evaluate(const PastRecord& past) const;
};

// Partition x ONS x rule table: the integrand whose coefficient (j,k) is
// computed from the noise record truncated at t_{j-1}.
struct ElementaryAdaptedProcess {
  Eigen::ArrayXd partition;
  Eigen::MatrixXd ons;                       // M x K orthonormal columns
  std::vector<std::vector<CoeffRule>> rules;  // [j][k]
  RSpaceDescriptor space;

  ElementaryAdaptedProcess(Eigen::ArrayXd partition_, Eigen::MatrixXd ons_,
                           std::vector<std::vector<CoeffRule>> rules_);

  int steps() const { return static_cast<int>(partition.size()) - 1; }
  int ons_size() const { return static_cast<int>(ons.cols()); }
  double horizon() const { return partition[partition.size() - 1]; }

  // The deterministic step function with the same coefficients; only valid
  // when every rule is constant.
  FiniteRankStepFunction freeze() const;
};

// Brownian increments per (grid cell, ONS index) per path, plus an
// independent copy of the same shape.  The two arrays come from child
// streams under distinct labels ("noise" / "decoupled"), which are disjoint
// counter ranges of the master seed by construction.
struct NoiseRecord {
  Eigen::ArrayXd grid;
  int K = 0;
  std::vector<Eigen::MatrixXd> primary;
  std::vector<Eigen::MatrixXd> decoupled;
  std::uint64_t seed = 0;
};
NoiseRecord make_noise(const Eigen::ArrayXd& grid, int K, std::int64_t count,
                       std::uint64_t seed);

// sum_{j,k} X_{j,k}(past of the same noise) * increment_{j,k}: the adapted
// integral, evaluated with the primary array.
IntegralPathEnsemble integrate_adapted(const ElementaryAdaptedProcess& phi,
                                       const NoiseRecord& noise);

// Same coefficients (still read from the primary array) but integrated
// against the independent copy.
IntegralPathEnsemble decoupled_integral(const ElementaryAdaptedProcess& phi,
                                        const NoiseRecord& noise);

// Deterministic integral of a step function against the primary array of an
// existing record — the coupling reference for the constant-rule identity.
IntegralPathEnsemble integrate_step_function(const FiniteRankStepFunction& phi,
                                             const NoiseRecord& noise);

// max over the family of (E sup_t ||coupled||^p / E ||decoupled(T)||^p)^{1/p},
// sup over the partition grid; empirical lower evidence for the decoupling
// constant.
struct DecouplingEstimate {
  double value = 0.0;
  bool degenerate = false;  // 0/0 on every member
  std::vector<double> per_process;
};
DecouplingEstimate estimate_decoupling_constant(
    const std::vector<ElementaryAdaptedProcess>& family, double p,
    std::int64_t count, std::uint64_t seed);

// One-sided bound  E sup_t ||path(t)||^p <= C^p E ||R_Phi||_{gamma^p}^p
// with the realized-coefficient gamma norm estimated per path by
// `inner_resamples` conditional Gaussian draws.  When c_hat <= 0, the
// constant is calibrated as 1.5 x the empirical ratio of a disjoint
// quarter-size subrun and reported in the result.
struct BdgReport {
  double lhs = 0.0;  // E sup ||path||^p
  double se_lhs = 0.0;
  double rhs = 0.0;  // E ||R_Phi(omega)||_{gamma^p}^p
  double se_rhs = 0.0;
  double c_hat = 0.0;
  bool pass = false;
};
BdgReport check_bdg(const ElementaryAdaptedProcess& phi, double p,
                    std::int64_t count, std::uint64_t seed, double c_hat = 0.0,
                    int inner_resamples = 256);

// First-hitting stopping rule evaluated on partition points: either a fixed
// partition time or the first time the running integral's norm exceeds a
// level (horizon if never).
struct StopRule {
  enum class Kind { Fixed, FirstExceedance };
  Kind kind = Kind::Fixed;
  double value = 0.0;  // Fixed: the time; FirstExceedance: the level
};

// Pathwise |Phi.W(tau) - (Phi P_tau).W(T)|: stopping the integral equals
// integrating the truncated integrand.  Exact up to float reordering.
struct StoppedIntegralReport {
  double max_discrepancy = 0.0;
  std::vector<double> stop_times;
  bool pass = false;  // max_discrepancy <= 1e-12
};
StoppedIntegralReport stopped_integral(const ElementaryAdaptedProcess& phi,
                                       const NoiseRecord& noise,
                                       const StopRule& rule);

// Shift-and-project approximation: R is a per-path operator on the fine
// tensor basis of L^2(0,1;H) — flat Hilbert index u*n_components + l for
// fine time cell u (2^fine_level cells) and component l — and the result is
// the elementary process on the dyadic level-L partition with constant
// coefficients X_{j,l} = 2^L R(1_{block_j shifted left by 2^-K} (x) h_l).
// Requires proj_level >= shift_level and fine_level >= proj_level.
ElementaryAdaptedProcess approximate_adapted(const FiniteRankOperator& R,
                                             int n_components,
                                             int shift_level, int proj_level);

// The operator on the same fine tensor basis represented by a constant-rule
// elementary process on a dyadic partition (for approximation distances).
FiniteRankOperator represent_elementary_on_fine_basis(
    const ElementaryAdaptedProcess& phi, int n_components, int fine_level);

}  // namespace qlab
