#include "qlab/gammaop.hpp"

#include <algorithm>
#include <cmath>

namespace qlab {

namespace {

Eigen::MatrixXd thin_q(const Eigen::MatrixXd& A) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
  return qr.householderQ() *
         Eigen::MatrixXd::Identity(A.rows(), A.cols());
}

Eigen::VectorXd gaussian_vector(CounterRng& rng, Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.next_gaussian();
  return v;
}

}  // namespace

FiniteRankOperator::FiniteRankOperator(Eigen::MatrixXd ons,
                                       std::vector<RVector> vectors)
    : ons_(std::move(ons)), vectors_(std::move(vectors)) {
  require(!vectors_.empty(), "FiniteRankOperator: empty vector list");
  require_shape(ons_.cols() == static_cast<Eigen::Index>(vectors_.size()),
                "FiniteRankOperator: one Hilbert vector per E vector required");
  require_shape(ons_.rows() >= ons_.cols(),
                "FiniteRankOperator: rank exceeds the Hilbert dimension");
  space_ = vectors_.front().space;
  for (const auto& v : vectors_)
    require_shape(v.space.same_as(space_),
                  "FiniteRankOperator: vectors live in different spaces");
  const Eigen::MatrixXd gram = ons_.transpose() * ons_;
  const double drift =
      (gram - Eigen::MatrixXd::Identity(rank(), rank())).cwiseAbs().maxCoeff();
  if (drift > 1e-10) ons_ = thin_q(ons_);
  coeff_.resize(space_.size(), rank());
  for (int n = 0; n < rank(); ++n)
    coeff_.col(n) = vectors_[static_cast<size_t>(n)].data.matrix();
}

FiniteRankOperator FiniteRankOperator::rank_one(const Eigen::VectorXd& h,
                                                const RVector& x) {
  Eigen::MatrixXd ons(h.size(), 1);
  ons.col(0) = h / h.norm();
  return FiniteRankOperator(std::move(ons), {x});
}

Eigen::ArrayXd FiniteRankOperator::apply(const Eigen::VectorXd& v) const {
  require_shape(v.size() == ons_.rows(),
                "FiniteRankOperator: Hilbert dimension mismatch");
  return (coeff_ * (ons_.transpose() * v)).array();
}

MomentEstimate gamma_matrix_norm(const RSpaceDescriptor& space,
                                 const Eigen::MatrixXd& images, double p,
                                 std::int64_t count, std::uint64_t seed) {
  require_shape(images.rows() == space.size(),
                "gamma_matrix_norm: image rows do not match the space");
  require(count > 0, "gamma_matrix_norm: count must be positive");
  CounterRng root(seed, "gamma-matrix");
  std::vector<double> norms;
  norms.reserve(static_cast<size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) {
    CounterRng rng = root.child(static_cast<std::uint64_t>(i));
    const Eigen::VectorXd g = gaussian_vector(rng, images.cols());
    norms.push_back(rnorm(space, (images * g).array()));
  }
  return estimate_moment(norms, p);
}

MomentEstimate gamma_basis_norm(const FiniteRankOperator& R, double p,
                                std::int64_t count, std::uint64_t seed) {
  return gamma_matrix_norm(R.space(), R.coeff(), p, count, seed);
}

GammaNormEstimate gamma_sup_norm(const FiniteRankOperator& R, double p,
                                 int ons_trials, std::int64_t count,
                                 std::uint64_t seed) {
  require(ons_trials >= 1, "gamma_sup_norm: need at least one trial system");
  const int M = R.hilbert_dim();
  CounterRng root(seed, "gamma-sup");

  GammaNormEstimate est;
  est.p = p;
  const MomentEstimate base =
      gamma_basis_norm(R, p, count, root.child("base").key());
  est.basis_value = base.value;
  est.sup_value = base.value;
  est.std_error = base.std_error;

  for (int t = 0; t < ons_trials; ++t) {
    CounterRng rng = root.child(static_cast<std::uint64_t>(t));
    const int m = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(M));
    Eigen::MatrixXd G(M, m);
    for (int j = 0; j < m; ++j) G.col(j) = gaussian_vector(rng, M);
    const Eigen::MatrixXd ons = thin_q(G);
    // R applied to the system: columns x_n weighted by <h_n, f_j>.
    const Eigen::MatrixXd images = R.coeff() * (R.ons().transpose() * ons);
    const MomentEstimate trial =
        gamma_matrix_norm(R.space(), images, p, count, rng.child("mc").key());
    if (trial.value > est.sup_value) {
      est.sup_value = trial.value;
      est.std_error = trial.std_error;
      est.arg_trial = t;
    }
  }
  return est;
}

SandwichReport check_gamma_sandwich(const FiniteRankOperator& R, double p,
                                    int ons_trials, std::int64_t count,
                                    std::uint64_t seed) {
  SandwichReport rep;
  rep.estimate = gamma_sup_norm(R, p, ons_trials, count, seed);
  rep.bound_constant = quasi_constant_for_r(std::min(R.space().r, p));
  const double b = rep.estimate.basis_value;
  const double s = rep.estimate.sup_value;
  const double se = rep.estimate.std_error;
  rep.lower_pass = b <= s + 3.0 * se + 1e-12;
  rep.upper_pass = s <= rep.bound_constant * b + 3.0 * se * (1.0 + rep.bound_constant);
  rep.pass = rep.lower_pass && rep.upper_pass;
  return rep;
}

double operator_quasi_norm(const Eigen::MatrixXd& U,
                           const RSpaceDescriptor& from,
                           const RSpaceDescriptor& to, int restarts, int iters,
                           std::uint64_t seed) {
  require_shape(U.rows() == to.size() && U.cols() == from.size(),
                "operator_quasi_norm: matrix shape does not match the spaces");
  auto ratio = [&](const Eigen::VectorXd& x) {
    const double nx = rnorm(from, x.array());
    if (!(nx > 0.0)) return 0.0;
    return rnorm(to, (U * x).array()) / nx;
  };

  double best = 0.0;
  for (Eigen::Index j = 0; j < U.cols(); ++j)
    best = std::max(best, ratio(Eigen::VectorXd::Unit(U.cols(), j)));

  const bool dual_step_ok = to.kind != RSpaceKind::BesovGrid;
  CounterRng root(seed, "op-norm");
  for (int t = 0; t < restarts; ++t) {
    CounterRng rng = root.child(static_cast<std::uint64_t>(t));
    Eigen::VectorXd x = gaussian_vector(rng, U.cols());
    for (int it = 0; it < iters; ++it) {
      best = std::max(best, ratio(x));
      if (!dual_step_ok) {
        x = gaussian_vector(rng, U.cols());
        continue;
      }
      // Ascent direction: gradient of ||Ux||_to taken coordinatewise, then
      // the Hoelder-extremal source point for that linear functional (the
      // best single coordinate when the source exponent is <= 1).
      const Eigen::VectorXd y = U * x;
      Eigen::VectorXd g(y.size());
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double a = std::abs(y[i]);
        g[i] = (a > 1e-12) ? ((y[i] > 0 ? 1.0 : -1.0) * std::pow(a, to.p - 1.0))
                           : 0.0;
      }
      Eigen::VectorXd z = U.transpose() * g;
      if (z.cwiseAbs().maxCoeff() == 0.0) break;
      if (from.p > 1.0) {
        for (Eigen::Index i = 0; i < z.size(); ++i) {
          const double a = std::abs(z[i]);
          z[i] = (z[i] > 0 ? 1.0 : -1.0) * std::pow(a, 1.0 / (from.p - 1.0));
        }
        x = z / z.norm();
      } else {
        Eigen::Index imax = 0;
        z.cwiseAbs().maxCoeff(&imax);
        x = Eigen::VectorXd::Unit(U.cols(), imax) * (z[imax] > 0 ? 1.0 : -1.0);
      }
    }
    best = std::max(best, ratio(x));
  }
  return best;
}

double spectral_norm(const Eigen::MatrixXd& A) {
  return operator_quasi_norm(
      A, RSpaceDescriptor::finite_lr(static_cast<int>(A.cols()), 2.0),
      RSpaceDescriptor::finite_lr(static_cast<int>(A.rows()), 2.0),
      /*restarts=*/4, /*iters=*/100);
}

ContractionReport check_matrix_contraction(const Eigen::MatrixXd& A,
                                           const std::vector<RVector>& vectors,
                                           double p, std::int64_t count,
                                           std::uint64_t seed) {
  require(!vectors.empty(), "check_matrix_contraction: empty vector list");
  require_shape(A.cols() == static_cast<Eigen::Index>(vectors.size()),
                "check_matrix_contraction: matrix columns != vector count");
  const auto& space = vectors.front().space;
  Eigen::MatrixXd X(space.size(), vectors.size());
  for (size_t j = 0; j < vectors.size(); ++j) {
    require_shape(vectors[j].space.same_as(space),
                  "check_matrix_contraction: mismatched spaces");
    X.col(static_cast<Eigen::Index>(j)) = vectors[j].data.matrix();
  }
  CounterRng root(seed, "contraction");
  ContractionReport rep;
  rep.lhs = gamma_matrix_norm(space, X * A.transpose(), p, count,
                              root.child("lhs").key());
  rep.rhs = gamma_matrix_norm(space, X, p, count, root.child("rhs").key());
  rep.op_norm = spectral_norm(A);
  rep.bound_constant = quasi_constant_for_r(std::min(space.r, p));
  const double denom = rep.op_norm * rep.rhs.value;
  rep.ratio = (denom > 0.0) ? rep.lhs.value / denom : 0.0;
  const double rel = ((rep.lhs.value > 0) ? rep.lhs.std_error / rep.lhs.value : 0.0) +
                     ((rep.rhs.value > 0) ? rep.rhs.std_error / rep.rhs.value : 0.0);
  rep.pass = rep.lhs.value <=
             rep.bound_constant * denom * (1.0 + 3.0 * rel) + 1e-12;
  return rep;
}

IdealReport check_ideal_property(const Eigen::MatrixXd& U,
                                 const RSpaceDescriptor& target,
                                 const FiniteRankOperator& R,
                                 const Eigen::MatrixXd& V, double p,
                                 std::int64_t count, std::uint64_t seed) {
  require_shape(U.cols() == R.space().size(),
                "check_ideal_property: U columns != operator space size");
  require_shape(U.rows() == target.size(),
                "check_ideal_property: U rows != target space size");
  require_shape(V.rows() == R.hilbert_dim(),
                "check_ideal_property: V rows != Hilbert dimension");
  CounterRng root(seed, "ideal");
  // Images of the composite on the source basis: U X (H^T V).
  const Eigen::MatrixXd B = U * (R.coeff() * (R.ons().transpose() * V));
  IdealReport rep;
  rep.lhs = gamma_matrix_norm(target, B, p, count, root.child("lhs").key());
  rep.rhs_gamma = gamma_basis_norm(R, p, count, root.child("rhs").key());
  rep.u_norm = operator_quasi_norm(U, R.space(), target, 20, 40,
                                   root.child("unorm").key());
  rep.v_norm = spectral_norm(V);
  rep.bound_constant = quasi_constant_for_r(std::min(R.space().r, p));
  const double denom = rep.u_norm * rep.v_norm * rep.rhs_gamma.value;
  rep.ratio = (denom > 0.0) ? rep.lhs.value / denom : 0.0;
  const double rel =
      ((rep.lhs.value > 0) ? rep.lhs.std_error / rep.lhs.value : 0.0) +
      ((rep.rhs_gamma.value > 0)
           ? rep.rhs_gamma.std_error / rep.rhs_gamma.value
           : 0.0);
  rep.pass = rep.lhs.value <=
             rep.bound_constant * denom * (1.0 + 3.0 * rel) + 1e-12;
  return rep;
}

double square_function_norm(const RSpaceDescriptor& space_s,
                            const Eigen::MatrixXd& kernel) {
  require(space_s.kind != RSpaceKind::BesovGrid,
          "square_function_norm: index-set space must be a coordinate space");
  require_shape(kernel.rows() == space_s.size(),
                "square_function_norm: kernel rows != index set size");
  return rnorm(space_s, kernel.rowwise().norm().array());
}

double besov_gamma_norm(const std::vector<GridField>& components, double sigma,
                        double p, double q) {
  require(!components.empty(), "besov_gamma_norm: empty component list");
  return besov_norm(components, sigma, p, q,
                    window_bank(components.front().d(), components.front().N()));
}

std::vector<MomentEstimate> basis_test_partial_sums(
    const FiniteRankOperator& R, double p, std::int64_t count,
    std::uint64_t seed) {
  require(count > 0, "basis_test_partial_sums: count must be positive");
  const int N = R.rank();
  CounterRng root(seed, "partial-sums");
  std::vector<std::vector<double>> norms(static_cast<size_t>(N));
  for (auto& v : norms) v.reserve(static_cast<size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) {
    CounterRng rng = root.child(static_cast<std::uint64_t>(i));
    Eigen::ArrayXd s = Eigen::ArrayXd::Zero(R.space().size());
    for (int n = 0; n < N; ++n) {
      s += rng.next_gaussian() * R.coeff().col(n).array();
      norms[static_cast<size_t>(n)].push_back(rnorm(R.space(), s));
    }
  }
  std::vector<MomentEstimate> out;
  out.reserve(static_cast<size_t>(N));
  for (const auto& v : norms) out.push_back(estimate_moment(v, p));
  return out;
}

}  // namespace qlab
