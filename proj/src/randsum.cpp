#include "qlab/randsum.hpp"

#include <algorithm>
#include <cmath>

namespace qlab {

namespace {

void validate_family(const std::vector<RVector>& vectors) {
  require(!vectors.empty(), "random sum: empty vector list");
  for (const auto& v : vectors) {
    require_shape(v.space.same_as(vectors.front().space),
                  "random sum: vectors live in different spaces");
    require_shape(v.data.size() == vectors.front().space.size(),
                  "random sum: coordinate count does not match the space");
    require(v.data.isFinite().all(), "random sum: non-finite coordinate");
  }
}

double draw_coefficient(SumKind kind, CounterRng& rng) {
  return (kind == SumKind::Gauss) ? rng.next_gaussian() : rng.next_sign();
}

}  // namespace

SampleBatch sample_sum(SumKind kind, const std::vector<RVector>& vectors,
                       std::int64_t count, std::uint64_t seed) {
  validate_family(vectors);
  require(count > 0, "random sum: count must be positive");
  SampleBatch batch;
  batch.space = vectors.front().space;
  batch.seed = seed;
  batch.samples.reserve(static_cast<size_t>(count));
  CounterRng root(seed, kind == SumKind::Gauss ? "gauss-sum" : "rademacher-sum");
  const Eigen::Index dim = vectors.front().data.size();
  for (std::int64_t i = 0; i < count; ++i) {
    CounterRng rng = root.child(static_cast<std::uint64_t>(i));
    Eigen::ArrayXd s = Eigen::ArrayXd::Zero(dim);
    for (const auto& v : vectors) s += draw_coefficient(kind, rng) * v.data;
    batch.samples.push_back(std::move(s));
  }
  return batch;
}

SampleBatch sample_gaussian_sum(const std::vector<RVector>& vectors,
                                std::int64_t count, std::uint64_t seed) {
  return sample_sum(SumKind::Gauss, vectors, count, seed);
}

SampleBatch sample_rademacher_sum(const std::vector<RVector>& vectors,
                                  std::int64_t count, std::uint64_t seed) {
  return sample_sum(SumKind::Rademacher, vectors, count, seed);
}

std::vector<double> batch_norms(const SampleBatch& batch) {
  std::vector<double> norms;
  norms.reserve(batch.samples.size());
  for (const auto& s : batch.samples) norms.push_back(rnorm(batch.space, s));
  return norms;
}

MomentEstimate estimate_moment(const std::vector<double>& norms, double p) {
  require(p > 0.0, "estimate_moment: p must be positive");
  require(!norms.empty(), "estimate_moment: empty sample");
  const auto n = static_cast<double>(norms.size());
  double mean = 0.0;
  for (double v : norms) mean += std::pow(v, p);
  mean /= n;
  double var = 0.0;
  for (double v : norms) {
    const double d = std::pow(v, p) - mean;
    var += d * d;
  }
  var = (norms.size() > 1) ? var / (n - 1.0) : 0.0;
  MomentEstimate est;
  est.p = p;
  est.count = static_cast<std::int64_t>(norms.size());
  est.mean_power = mean;
  est.se_power = std::sqrt(var / n);
  if (mean > 0.0) {
    est.value = std::pow(mean, 1.0 / p);
    est.std_error = est.value / (p * mean) * est.se_power;
  }
  return est;
}

double rademacher_enumerate(const std::vector<RVector>& vectors, double p) {
  validate_family(vectors);
  require(p > 0.0, "rademacher_enumerate: p must be positive");
  const size_t n = vectors.size();
  if (n > 20) throw CapacityError("rademacher_enumerate: more than 20 vectors");
  const auto& space = vectors.front().space;
  const Eigen::Index dim = vectors.front().data.size();
  const std::uint64_t patterns = 1ULL << n;
  double acc = 0.0;
  Eigen::ArrayXd s(dim);
  for (std::uint64_t mask = 0; mask < patterns; ++mask) {
    s.setZero();
    for (size_t i = 0; i < n; ++i)
      s += ((mask >> i) & 1ULL) ? vectors[i].data : -vectors[i].data;
    acc += std::pow(rnorm(space, s), p);
  }
  return acc / static_cast<double>(patterns);
}

GaussHermiteRule gauss_hermite(int n) {
  require(n >= 1, "gauss_hermite: need at least one node");
  // Golub-Welsch on the physicists' Hermite recurrence (weight e^{-x^2}):
  // Jacobi matrix has zero diagonal and off-diagonal sqrt(k/2).  Eigenvalues
  // are the nodes t_i; weights are sqrt(pi) * (first eigenvector row)^2.
  // Rescaled to the standard normal weight: node sqrt(2) t_i, weight row^2.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = std::sqrt(static_cast<double>(k) / 2.0);
    J(k, k - 1) = b;
    J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  GaussHermiteRule rule;
  rule.nodes = std::sqrt(2.0) * es.eigenvalues().array();
  rule.weights = es.eigenvectors().row(0).array().square();
  return rule;
}

double quadrature_expectation_2d(const RVector& coeff_x,
                                 const RVector& coeff_y, double p, int nodes) {
  require_shape(coeff_x.space.same_as(coeff_y.space),
                "quadrature_expectation_2d: mismatched spaces");
  require(p > 0.0, "quadrature_expectation_2d: p must be positive");
  require(nodes >= 16, "quadrature_expectation_2d: need at least 16 nodes");
  require(coeff_x.data.isFinite().all() && coeff_y.data.isFinite().all(),
          "quadrature_expectation_2d: non-finite coordinate");
  const GaussHermiteRule rule = gauss_hermite(nodes);
  const auto& space = coeff_x.space;
  double acc = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const Eigen::ArrayXd part = rule.nodes[i] * coeff_x.data;
    double row = 0.0;
    for (int j = 0; j < nodes; ++j) {
      const Eigen::ArrayXd s = part + rule.nodes[j] * coeff_y.data;
      row += rule.weights[j] * std::pow(rnorm(space, s), p);
    }
    acc += rule.weights[i] * row;
  }
  return acc;
}

SymmetrizationReport check_symmetrization(const SumSpec& X, const SumSpec& Y,
                                          double p, std::int64_t count,
                                          std::uint64_t seed) {
  require(p > 0.0, "check_symmetrization: p must be positive");
  validate_family(X.vectors);
  if (!Y.vectors.empty())
    for (const auto& v : Y.vectors)
      require_shape(v.space.same_as(X.vectors.front().space),
                    "check_symmetrization: X and Y in different spaces");

  const auto& space = X.vectors.front().space;
  SymmetrizationReport rep;
  rep.bound_constant = quasi_constant_for_r(std::min(space.r, p));

  std::vector<RVector> joint = X.vectors;
  joint.insert(joint.end(), Y.vectors.begin(), Y.vectors.end());

  const bool enumerable = X.kind == SumKind::Rademacher &&
                          (Y.vectors.empty() || Y.kind == SumKind::Rademacher) &&
                          joint.size() <= 20;
  if (enumerable) {
    rep.exact = true;
    rep.lhs.p = rep.rhs.p = p;
    rep.lhs.value = std::pow(rademacher_enumerate(X.vectors, p), 1.0 / p);
    rep.rhs.value = std::pow(rademacher_enumerate(joint, p), 1.0 / p);
    rep.lhs.count = rep.rhs.count = 1LL << joint.size();
  } else {
    // Independence of X and Y via disjoint child streams of the same seed.
    CounterRng rootx = CounterRng(seed, "symmetrization").child("X");
    CounterRng rooty = CounterRng(seed, "symmetrization").child("Y");
    const Eigen::Index dim = X.vectors.front().data.size();
    std::vector<double> norms_x, norms_xy;
    norms_x.reserve(static_cast<size_t>(count));
    norms_xy.reserve(static_cast<size_t>(count));
    for (std::int64_t i = 0; i < count; ++i) {
      CounterRng rx = rootx.child(static_cast<std::uint64_t>(i));
      CounterRng ry = rooty.child(static_cast<std::uint64_t>(i));
      Eigen::ArrayXd sx = Eigen::ArrayXd::Zero(dim);
      for (const auto& v : X.vectors) sx += draw_coefficient(X.kind, rx) * v.data;
      Eigen::ArrayXd sy = Eigen::ArrayXd::Zero(dim);
      for (const auto& v : Y.vectors) sy += draw_coefficient(Y.kind, ry) * v.data;
      norms_x.push_back(rnorm(space, sx));
      norms_xy.push_back(rnorm(space, sx + sy));
    }
    rep.lhs = estimate_moment(norms_x, p);
    rep.rhs = estimate_moment(norms_xy, p);
  }
  rep.ratio = (rep.rhs.value > 0.0) ? rep.lhs.value / rep.rhs.value : 0.0;
  const double rel_se =
      ((rep.lhs.value > 0.0 ? rep.lhs.std_error / rep.lhs.value : 0.0) +
       (rep.rhs.value > 0.0 ? rep.rhs.std_error / rep.rhs.value : 0.0));
  rep.pass = rep.lhs.value <=
             rep.bound_constant * rep.rhs.value * (1.0 + 3.0 * rel_se) + 1e-12;
  return rep;
}

LevyReport check_levy(SumKind kind, const std::vector<RVector>& vectors,
                      const std::vector<double>& thresholds,
                      std::int64_t count, std::uint64_t seed,
                      const std::vector<double>& moment_ps) {
  validate_family(vectors);
  require(!thresholds.empty(), "check_levy: empty threshold list");
  require(count > 1, "check_levy: need at least two samples");
  const auto& space = vectors.front().space;
  const double r = space.r;
  const double rescale = std::exp2(1.0 - 1.0 / r);  // 2^{1-1/r} <= 1

  const auto n = static_cast<size_t>(count);
  std::vector<double> max_partial(n), max_summand(n), final_norm(n);
  CounterRng root(seed, "levy");
  const Eigen::Index dim = vectors.front().data.size();
  for (size_t i = 0; i < n; ++i) {
    CounterRng rng = root.child(static_cast<std::uint64_t>(i));
    Eigen::ArrayXd s = Eigen::ArrayXd::Zero(dim);
    double mp = 0.0, ms = 0.0, fin = 0.0;
    for (const auto& v : vectors) {
      const double c = draw_coefficient(kind, rng);
      ms = std::max(ms, rnorm(space, c * v.data));
      s += c * v.data;
      fin = rnorm(space, s);
      mp = std::max(mp, fin);
    }
    max_partial[i] = mp;
    max_summand[i] = ms;
    final_norm[i] = fin;
  }

  auto tail = [&](const std::vector<double>& xs, double t) {
    double c = 0.0;
    for (double x : xs)
      if (x > t) c += 1.0;
    const double prob = c / static_cast<double>(n);
    const double se = std::sqrt(prob * (1.0 - prob) / static_cast<double>(n));
    return std::make_pair(prob, se);
  };

  LevyReport rep;
  rep.pass = true;
  for (double t : thresholds) {
    LevyTailRecord rec;
    rec.threshold = t;
    std::tie(rec.tail_max_partial, rec.se_max_partial) = tail(max_partial, t);
    std::tie(rec.tail_max_summand, rec.se_max_summand) = tail(max_summand, t);
    std::tie(rec.tail_final_rescaled, rec.se_final) =
        tail(final_norm, rescale * t);
    const double rhs = 2.0 * rec.tail_final_rescaled;
    const double slack_p =
        3.0 * std::sqrt(rec.se_max_partial * rec.se_max_partial +
                        4.0 * rec.se_final * rec.se_final);
    const double slack_s =
        3.0 * std::sqrt(rec.se_max_summand * rec.se_max_summand +
                        4.0 * rec.se_final * rec.se_final);
    rec.pass_partial = rec.tail_max_partial <= rhs + slack_p;
    rec.pass_summand = rec.tail_max_summand <= rhs + slack_s;
    rep.pass = rep.pass && rec.pass_partial && rec.pass_summand;
    rep.tails.push_back(rec);
  }

  auto moment = [&](const std::vector<double>& xs, double p) {
    double mean = 0.0;
    for (double x : xs) mean += std::pow(x, p);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double x : xs) {
      const double d = std::pow(x, p) - mean;
      var += d * d;
    }
    var /= static_cast<double>(n - 1);
    return std::make_pair(mean, std::sqrt(var / static_cast<double>(n)));
  };

  for (double p : moment_ps) {
    LevyMomentRecord rec;
    rec.p = p;
    const double scale = std::exp2(1.0 + p / r - p);  // 2^{1+p/r-p}
    auto [ml, sl] = moment(max_partial, p);
    auto [mf, sf] = moment(final_norm, p);
    rec.lhs = ml;
    rec.se_lhs = sl;
    rec.rhs = scale * mf;
    rec.se_rhs = scale * sf;
    rec.pass = rec.lhs <= rec.rhs + 3.0 * std::sqrt(sl * sl + rec.se_rhs * rec.se_rhs);
    rep.pass = rep.pass && rec.pass;
    rep.moments.push_back(rec);
  }
  return rep;
}

KahaneEstimate estimate_kahane_constant(const std::vector<RVector>& vectors,
                                        double p, double q, std::int64_t count,
                                        std::uint64_t seed, SumKind kind) {
  require(p > 0.0 && q > 0.0, "estimate_kahane_constant: exponents must be positive");
  const SampleBatch batch = sample_sum(kind, vectors, count, seed);
  const std::vector<double> norms = batch_norms(batch);
  KahaneEstimate est;
  est.numerator = estimate_moment(norms, p);
  est.denominator = estimate_moment(norms, q);
  if (est.denominator.value > 0.0) {
    est.ratio = est.numerator.value / est.denominator.value;
    const double rel_n = (est.numerator.value > 0.0)
                             ? est.numerator.std_error / est.numerator.value
                             : 0.0;
    const double rel_d = est.denominator.std_error / est.denominator.value;
    est.std_error = est.ratio * std::sqrt(rel_n * rel_n + rel_d * rel_d);
  }
  return est;
}

double estimate_cotype_constant(const RSpaceDescriptor& space, double q,
                                int trials, int n_vectors,
                                std::uint64_t seed) {
  require(q >= 2.0, "estimate_cotype_constant: q must be >= 2");
  require(trials >= 1, "estimate_cotype_constant: need at least one trial");
  require(n_vectors >= 1, "estimate_cotype_constant: need at least one vector");
  if (n_vectors > 12)
    throw CapacityError("estimate_cotype_constant: enumeration capped at 12 vectors");
  CounterRng root(seed, "cotype");
  double best = 0.0;
  for (int t = 0; t < trials; ++t) {
    CounterRng rng = root.child(static_cast<std::uint64_t>(t));
    std::vector<RVector> xs;
    Eigen::ArrayXd norms(n_vectors);
    for (int j = 0; j < n_vectors; ++j) {
      Eigen::ArrayXd v(space.size());
      for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.next_gaussian();
      xs.emplace_back(space, v);
      norms[j] = rnorm(space, v);
    }
    const double numerator = scaled_power_sum(norms, 1.0, q);
    const double denominator = std::sqrt(rademacher_enumerate(xs, 2.0));
    if (denominator > 0.0) best = std::max(best, numerator / denominator);
  }
  return best;
}

}  // namespace qlab
