#pragma once

#include <cstdint>
#include <vector>

#include "qlab/besovlp.hpp"
#include "qlab/randsum.hpp"

namespace qlab {

// R = sum_n h_n (x) x_n : R^M -> E.  Columns of `ons` are the h_n; a Gram
// deviation beyond 1e-10 triggers re-orthonormalization on construction
// (thin QR), since Gram drift compounds inside Gaussian sums.
class FiniteRankOperator {
 public:
  FiniteRankOperator(Eigen::MatrixXd ons, std::vector<RVector> vectors);
  static FiniteRankOperator rank_one(const Eigen::VectorXd& h,
                                     const RVector& x);

  int hilbert_dim() const { return static_cast<int>(ons_.rows()); }
  int rank() const { return static_cast<int>(ons_.cols()); }
  const Eigen::MatrixXd& ons() const { return ons_; }
  const std::vector<RVector>& vectors() const { return vectors_; }
  const RSpaceDescriptor& space() const { return space_; }
  // Coordinate columns of the x_n, one column per rank index.
  const Eigen::MatrixXd& coeff() const { return coeff_; }

  // sum_n <h_n, v> x_n for an arbitrary Hilbert vector v.
  Eigen::ArrayXd apply(const Eigen::VectorXd& v) const;

 private:
  Eigen::MatrixXd ons_;            // M x N, orthonormal columns
  std::vector<RVector> vectors_;   // N vectors in E
  Eigen::MatrixXd coeff_;          // size(E) x N
  RSpaceDescriptor space_;
};

// MC (E|| images * gamma ||^p)^{1/p}: `images` holds the operator's values
// on an orthonormal family, one column per member; gamma is standard normal.
MomentEstimate gamma_matrix_norm(const RSpaceDescriptor& space,
                                 const Eigen::MatrixXd& images, double p,
                                 std::int64_t count, std::uint64_t seed);

// Gaussian sum over the stored system: (E|| sum_n gamma_n x_n ||^p)^{1/p} —
// the lower member of the two-sided test-against-a-basis estimate.
MomentEstimate gamma_basis_norm(const FiniteRankOperator& R, double p,
                                std::int64_t count, std::uint64_t seed);

struct GammaNormEstimate {
  double p = 2.0;
  double basis_value = 0.0;  // Gaussian sum over the stored system
  double sup_value = 0.0;    // max over sampled orthonormal systems
  double std_error = 0.0;    // MC error at the maximizing system
  int arg_trial = -1;        // -1: the stored system itself
};

// Max over `ons_trials` random orthonormal systems (orthonormalized Gaussian
// matrices of random size 1..M) of the Gaussian-sum L^p norm of R applied to
// the system; the stored system is always included as a candidate.
GammaNormEstimate gamma_sup_norm(const FiniteRankOperator& R, double p,
                                 int ons_trials, std::int64_t count,
                                 std::uint64_t seed);

// basis <= sup * (1+3SE) and sup <= 2^{(1-r^p)/(r^p)} * basis * (1+3SE),
// r^p the smaller of the space exponent r and p.
struct SandwichReport {
  GammaNormEstimate estimate;
  double bound_constant = 1.0;
  bool lower_pass = false;
  bool upper_pass = false;
  bool pass = false;
};
SandwichReport check_gamma_sandwich(const FiniteRankOperator& R, double p,
                                    int ons_trials, std::int64_t count,
                                    std::uint64_t seed);

// Largest observed rnorm(to, U x) / rnorm(from, x): multi-start ascent with
// a duality-map step where the source exponent allows it and pure candidate
// search where it does not (quasi-norm balls are non-convex, so every
// iterate only ever contributes to a running max — the result is always a
// valid lower bound of the true operator quasi-norm).
double operator_quasi_norm(const Eigen::MatrixXd& U,
                           const RSpaceDescriptor& from,
                           const RSpaceDescriptor& to, int restarts = 20,
                           int iters = 40, std::uint64_t seed = 0xA11CEULL);

// Spectral norm by the same machinery specialized to p=2 (power iteration).
double spectral_norm(const Eigen::MatrixXd& A);

// || sum_i gamma_i sum_j a_ij x_j ||_{L^p}
//   <= 2^{(1-r^p)/(r^p)} ||A||_{2->2} || sum_j gamma_j x_j ||_{L^p}.
struct ContractionReport {
  MomentEstimate lhs;
  MomentEstimate rhs;
  double op_norm = 0.0;
  double bound_constant = 1.0;
  double ratio = 0.0;  // lhs / (op_norm * rhs): >1 rules out constant 1
  bool pass = false;
};
ContractionReport check_matrix_contraction(const Eigen::MatrixXd& A,
                                           const std::vector<RVector>& vectors,
                                           double p, std::int64_t count,
                                           std::uint64_t seed);

// || U R V ||_{gamma^p} <= 2^{(1-r^p)/(r^p)} ||U|| ||R||_{gamma^p} ||V||,
// U a coordinate matrix E -> target, V a Hilbert matrix R^{M'} -> R^M;
// r is the exponent of R's own target space E.
struct IdealReport {
  MomentEstimate lhs;        // composite operator
  MomentEstimate rhs_gamma;  // ||R||_{gamma^p}
  double u_norm = 0.0;
  double v_norm = 0.0;
  double bound_constant = 1.0;
  double ratio = 0.0;
  bool pass = false;
};
IdealReport check_ideal_property(const Eigen::MatrixXd& U,
                                 const RSpaceDescriptor& target,
                                 const FiniteRankOperator& R,
                                 const Eigen::MatrixXd& V, double p,
                                 std::int64_t count, std::uint64_t seed);

// || s -> (sum_n kernel(s,n)^2)^{1/2} ||_{E(S)} for a kernel matrix with one
// row per point of the finite index set S.  For kernels over a time grid
// (L^2 in time per index), scale each column by sqrt of its time weight
// before calling, which turns the inner sum into the Riemann integral.
double square_function_norm(const RSpaceDescriptor& space_s,
                            const Eigen::MatrixXd& kernel);

// H-valued Besov norm of a component family: pointwise ell^2 over the
// components inside the L^p grid norm, then the weighted block sum.
double besov_gamma_norm(const std::vector<GridField>& components, double sigma,
                        double p, double q);

// L^p norms of the partial Gaussian sums sum_{n<=k} gamma_n x_n, k = 1..N,
// with the draws shared across k (each sample extends its own prefix).
std::vector<MomentEstimate> basis_test_partial_sums(
    const FiniteRankOperator& R, double p, std::int64_t count,
    std::uint64_t seed);

}  // namespace qlab
