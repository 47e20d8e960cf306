#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qlab/prng.hpp"
#include "qlab/randsum.hpp"

using namespace qlab;

namespace {

RVector rv(const RSpaceDescriptor& s, std::initializer_list<double> vals) {
  Eigen::ArrayXd v(static_cast<int>(vals.size()));
  int i = 0;
  for (double x : vals) v[i++] = x;
  return RVector(s, v);
}

std::vector<RVector> random_vectors(const RSpaceDescriptor& s, int n,
                                    std::uint64_t seed) {
  CounterRng rng(seed, "vectors");
  std::vector<RVector> out;
  for (int i = 0; i < n; ++i) {
    Eigen::ArrayXd v(s.size());
    for (int j = 0; j < s.size(); ++j) v[j] = rng.next_gaussian();
    out.emplace_back(s, v);
  }
  return out;
}

}  // namespace

TEST_CASE("gauss-hermite rule integrates low normal moments exactly") {
  const GaussHermiteRule rule = gauss_hermite(16);
  CHECK(rule.weights.sum() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK((rule.weights * rule.nodes.square()).sum() ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK((rule.weights * rule.nodes.pow(4)).sum() ==
        doctest::Approx(3.0).epsilon(1e-10));
  // Odd moments vanish by symmetry of the rule.
  CHECK(std::abs((rule.weights * rule.nodes.pow(3)).sum()) <= 1e-12);
}

TEST_CASE("two-normal quadrature is exact on a Euclidean second moment") {
  // E || g1 x + g2 y ||_2^2 = |x|^2 + |y|^2: polynomial, so quadrature-exact.
  const auto l2 = RSpaceDescriptor::finite_lr(2, 2.0);
  const double v =
      quadrature_expectation_2d(rv(l2, {1, 0}), rv(l2, {0, 2}), 2.0, 32);
  CHECK(v == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("concentrated and sign-split summands give the known moments") {
  // In l^{1/2}_2 the normalized summand (1/4,1/4) has unit second moment;
  // adding the small sign-split summand lowers it to about 0.987.
  const auto half2 = RSpaceDescriptor::finite_lr(2, 0.5);
  const RVector x = rv(half2, {0.25, 0.25});
  const RVector y = rv(half2, {0.0625, -0.0625});
  const RVector zero = rv(half2, {0.0, 0.0});
  CHECK(quadrature_expectation_2d(x, zero, 2.0, 96) ==
        doctest::Approx(1.0).epsilon(1e-9));
  const double mixed = quadrature_expectation_2d(x, y, 2.0, 96);
  CHECK(mixed == doctest::Approx(0.987).epsilon(2e-3));
  // Frozen at 96 nodes; the value moved < 1e-3 when the rule was halved.
  CHECK(mixed == doctest::Approx(0.986765).epsilon(1e-4));
}

TEST_CASE("rademacher enumeration reproduces closed-form sign sums") {
  const auto l1 = RSpaceDescriptor::finite_lr(2, 1.0);
  const std::vector<RVector> basis = {rv(l1, {1, 0}), rv(l1, {0, 1})};
  // || +-e1 +- e2 ||_1 = 2 for every pattern.
  for (double p : {1.0, 2.0, 4.0})
    CHECK(rademacher_enumerate(basis, p) ==
          doctest::Approx(std::pow(2.0, p)).epsilon(1e-13));

  // The (1,1)/(1,-1) pair in l^{1/2}_2: the single summand has norm 4, the
  // pair sum always has norm 2, so the moments are 4^p and 2^p exactly.
  const auto half2 = RSpaceDescriptor::finite_lr(2, 0.5);
  const RVector a = rv(half2, {1, 1});
  const RVector b = rv(half2, {1, -1});
  for (double p : {1.0, 2.0, 4.0}) {
    CHECK(rademacher_enumerate({a}, p) ==
          doctest::Approx(std::pow(4.0, p)).epsilon(1e-13));
    CHECK(rademacher_enumerate({a, b}, p) ==
          doctest::Approx(std::pow(2.0, p)).epsilon(1e-13));
  }
}

TEST_CASE("rademacher enumeration rejects oversized families") {
  const auto l1 = RSpaceDescriptor::finite_lr(2, 1.0);
  std::vector<RVector> many(21, rv(l1, {1, 0}));
  CHECK_THROWS_AS(rademacher_enumerate(many, 2.0), CapacityError);
}

TEST_CASE("symmetrization bound is attained exactly on the sign pair") {
  const auto half2 = RSpaceDescriptor::finite_lr(2, 0.5);
  SumSpec X{SumKind::Rademacher, {rv(half2, {1, 1})}};
  SumSpec Y{SumKind::Rademacher, {rv(half2, {1, -1})}};
  for (double p : {0.5, 1.0, 2.0, 4.0}) {
    const auto rep = check_symmetrization(X, Y, p, 0, 7);
    CHECK(rep.exact);
    CHECK(rep.pass);
    // r = 1/2 <= p, so the constant is 2^{(1-1/2)/(1/2)} = 2, met exactly.
    CHECK(rep.bound_constant == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(rep.ratio == doctest::Approx(2.0).epsilon(1e-12));
  }
}

TEST_CASE("symmetrization holds by monte carlo in a Hilbert space") {
  const auto l2 = RSpaceDescriptor::finite_lr(4, 2.0);
  SumSpec X{SumKind::Gauss, random_vectors(l2, 3, 11)};
  SumSpec Y{SumKind::Gauss, random_vectors(l2, 3, 12)};
  const auto rep = check_symmetrization(X, Y, 2.0, 20000, 13);
  CHECK_FALSE(rep.exact);
  CHECK(rep.bound_constant == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(rep.pass);
}

TEST_CASE("first-passage bounds are trivially tight on one summand") {
  // With a single summand every partial max equals the final sum, so both
  // tail forms and both moment records must pass at any threshold.
  const auto l2 = RSpaceDescriptor::finite_lr(4, 2.0);
  const auto rep = check_levy(SumKind::Gauss, random_vectors(l2, 1, 21),
                              {0.5, 1.0, 2.0}, 20000, 22);
  CHECK(rep.pass);
  CHECK(rep.tails.size() == 3);
  CHECK(rep.moments.size() == 2);
  for (const auto& m : rep.moments) {
    CHECK(m.pass);
    // r = 1: the moment constant 2^{1+p/r-p} reduces to 2.
    CHECK(m.rhs > 0.0);
    CHECK(m.lhs <= 2.0 * m.rhs * (1.0 + 1e-12));
  }
}

TEST_CASE("first-passage bounds hold on a random multi-summand family") {
  const auto l1 = RSpaceDescriptor::finite_lr(4, 1.0);
  const auto vectors = random_vectors(l1, 6, 31);
  const auto rep =
      check_levy(SumKind::Rademacher, vectors, {1.0, 2.0, 4.0}, 20000, 32);
  CHECK(rep.pass);
  for (const auto& t : rep.tails) {
    CHECK(t.pass_partial);
    CHECK(t.pass_summand);
  }
}

TEST_CASE("moment-comparison ratio matches the one-summand closed form") {
  // S = g x: ||S||_{L^p} = |x| (E|g|^p)^{1/p}, so L^4/L^2 = 3^{1/4} and
  // L^2/L^1 = sqrt(pi/2).
  const auto l2 = RSpaceDescriptor::finite_lr(3, 2.0);
  const auto vectors = random_vectors(l2, 1, 41);
  const auto r42 = estimate_kahane_constant(vectors, 4.0, 2.0, 40000, 42);
  CHECK(std::abs(r42.ratio - std::pow(3.0, 0.25)) <=
        4.0 * r42.std_error + 1e-3);
  const auto r21 = estimate_kahane_constant(vectors, 2.0, 1.0, 40000, 43);
  CHECK(std::abs(r21.ratio - std::sqrt(3.14159265358979324 / 2.0)) <=
        4.0 * r21.std_error + 1e-3);
}

TEST_CASE("cotype-2 constant is exactly one in Hilbert coordinates") {
  // (sum |x_n|^2)^{1/2} equals the enumerated Rademacher L^2 norm exactly.
  const double c =
      estimate_cotype_constant(RSpaceDescriptor::finite_lr(6, 2.0), 2.0, 8, 5,
                               51);
  CHECK(c == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("sample batches are chunk-stable and reproducible") {
  const auto l2 = RSpaceDescriptor::finite_lr(4, 2.0);
  const auto vectors = random_vectors(l2, 3, 61);
  const auto a = sample_gaussian_sum(vectors, 100, 62);
  const auto b = sample_gaussian_sum(vectors, 100, 62);
  const auto prefix = sample_gaussian_sum(vectors, 50, 62);
  REQUIRE(a.samples.size() == 100);
  for (int i = 0; i < 100; ++i)
    CHECK((a.samples[i] == b.samples[i]).all());
  // Draw i depends only on (seed, i): shorter runs are prefixes.
  for (int i = 0; i < 50; ++i)
    CHECK((a.samples[i] == prefix.samples[i]).all());
  const auto r = sample_rademacher_sum(vectors, 64, 63);
  CHECK(r.samples.size() == 64);
}

TEST_CASE("moment estimation applies the delta method consistently") {
  const std::vector<double> norms = {1.0, 2.0};
  const auto est = estimate_moment(norms, 2.0);
  CHECK(est.count == 2);
  CHECK(est.mean_power == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(est.value == doctest::Approx(std::sqrt(2.5)).epsilon(1e-14));
  CHECK(est.se_power == doctest::Approx(1.5).epsilon(1e-12));
  // std_error = se_power * value / (p * mean_power).
  CHECK(est.std_error ==
        doctest::Approx(est.se_power * est.value / (2.0 * est.mean_power))
            .epsilon(1e-12));
}
