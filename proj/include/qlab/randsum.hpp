#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qlab/prng.hpp"
#include "qlab/qspace.hpp"

namespace qlab {

enum class SumKind { Gauss, Rademacher };

// Batch of draws of S = sum_n xi_n x_n with xi_n i.i.d. standard normal or
// Rademacher.  Draw i is produced on the child stream of index i, so chunked
// parallel generation is bitwise identical to the serial run.
struct SampleBatch {
  RSpaceDescriptor space;
  std::vector<Eigen::ArrayXd> samples;
  std::uint64_t seed = 0;
  std::string generator_id = kGeneratorId;
};

// (E||.||^p)^{1/p}; std_error is the delta-method propagation of the sample
// standard error of the p-th moment through the 1/p power.
struct MomentEstimate {
  double p = 2.0;
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t count = 0;
  double mean_power = 0.0;  // estimate of E||.||^p
  double se_power = 0.0;    // its standard error
};

SampleBatch sample_sum(SumKind kind, const std::vector<RVector>& vectors,
                       std::int64_t count, std::uint64_t seed);
SampleBatch sample_gaussian_sum(const std::vector<RVector>& vectors,
                                std::int64_t count, std::uint64_t seed);
SampleBatch sample_rademacher_sum(const std::vector<RVector>& vectors,
                                  std::int64_t count, std::uint64_t seed);

std::vector<double> batch_norms(const SampleBatch& batch);
MomentEstimate estimate_moment(const std::vector<double>& norms, double p);

// Exact E|| sum_n eps_n x_n ||^p over all 2^N sign patterns.  N <= 20.
double rademacher_enumerate(const std::vector<RVector>& vectors, double p);

// Gauss-Hermite rule transformed to the standard normal weight:
// E f(gamma) ~= sum_i weights[i] * f(nodes[i]),  sum of weights = 1.
struct GaussHermiteRule {
  Eigen::ArrayXd nodes;
  Eigen::ArrayXd weights;
};
GaussHermiteRule gauss_hermite(int n);

// E|| gamma H coeff_x + gamma V coeff_y ||^p over two independent standard
// normals by tensor Gauss-Hermite quadrature, `nodes` points per axis (>=16).
double quadrature_expectation_2d(const RVector& coeff_x,
                                 const RVector& coeff_y, double p,
                                 int nodes = 96);

// Specification of one random sum for the inequality checks.
struct SumSpec {
  SumKind kind = SumKind::Gauss;
  std::vector<RVector> vectors;
};

// ||X||_{L^p} <= 2^{(1-(r^p))/(r^p)} ||X+Y||_{L^p} for symmetric independent
// Y (r^p meaning r AND p, the smaller).  Exact enumeration is used when both
// sums are Rademacher with at most 20 summands total; otherwise Monte Carlo
// on disjoint seed streams with 3-standard-error slack.
struct SymmetrizationReport {
  MomentEstimate lhs;       // ||X||_{L^p}
  MomentEstimate rhs;       // ||X+Y||_{L^p}
  double bound_constant = 1.0;
  double ratio = 0.0;       // lhs.value / rhs.value
  bool exact = false;
  bool pass = false;
};
SymmetrizationReport check_symmetrization(const SumSpec& X, const SumSpec& Y,
                                          double p, std::int64_t count,
                                          std::uint64_t seed);

// Two tail forms of the Levy inequality at one threshold:
//   P(max_k ||S_k|| > t)  and  P(max_k ||X_k|| > t)
// each against 2 P(||S_N|| > 2^{1-1/r} t), with binomial standard errors.
struct LevyTailRecord {
  double threshold = 0.0;
  double tail_max_partial = 0.0;
  double se_max_partial = 0.0;
  double tail_max_summand = 0.0;
  double se_max_summand = 0.0;
  double tail_final_rescaled = 0.0;  // P(||S_N|| > 2^{1-1/r} t)
  double se_final = 0.0;
  bool pass_partial = false;
  bool pass_summand = false;
};
// Moment form:  E max_k ||S_k||^p <= 2^{1+p/r-p} E ||S_N||^p.
struct LevyMomentRecord {
  double p = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double se_lhs = 0.0;
  double se_rhs = 0.0;
  bool pass = false;
};
struct LevyReport {
  std::vector<LevyTailRecord> tails;
  std::vector<LevyMomentRecord> moments;
  bool pass = false;
};
LevyReport check_levy(SumKind kind, const std::vector<RVector>& vectors,
                      const std::vector<double>& thresholds,
                      std::int64_t count, std::uint64_t seed,
                      const std::vector<double>& moment_ps = {1.0, 2.0});

// Empirical || S ||_{L^p} / || S ||_{L^q} on a shared sample batch; lower
// evidence for the p-to-q moment comparison constant.
struct KahaneEstimate {
  MomentEstimate numerator;
  MomentEstimate denominator;
  double ratio = 0.0;
  double std_error = 0.0;
};
KahaneEstimate estimate_kahane_constant(const std::vector<RVector>& vectors,
                                        double p, double q, std::int64_t count,
                                        std::uint64_t seed,
                                        SumKind kind = SumKind::Gauss);

// Max over `trials` random length-n sequences of
//   (sum_n ||x_n||^q)^{1/q} / (E|| sum_n eps_n x_n ||^2)^{1/2}
// with the Rademacher expectation enumerated exactly (n <= 12).
double estimate_cotype_constant(const RSpaceDescriptor& space, double q,
                                int trials, int n_vectors,
                                std::uint64_t seed);

}  // namespace qlab
