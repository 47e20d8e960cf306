#include "qlab/qspace.hpp"

#include <algorithm>
#include <cmath>

#include "qlab/besovlp.hpp"

namespace qlab {

RSpaceDescriptor RSpaceDescriptor::finite_lr(int dim, double p) {
  require(dim > 0, "finite_lr: dim must be positive");
  require(p > 0.0, "finite_lr: exponent must be positive");
  RSpaceDescriptor s;
  s.kind = RSpaceKind::FiniteLr;
  s.p = p;
  s.r = std::min(p, 1.0);
  s.dim = dim;
  return s;
}

RSpaceDescriptor RSpaceDescriptor::grid_lr(int d, int N, double p) {
  require(d == 1 || d == 2, "grid_lr: d must be 1 or 2");
  require(N > 0 && (N & (N - 1)) == 0, "grid_lr: N must be a power of two");
  require(p > 0.0, "grid_lr: exponent must be positive");
  RSpaceDescriptor s;
  s.kind = RSpaceKind::GridLr;
  s.p = p;
  s.r = std::min(p, 1.0);
  s.d = d;
  s.N = N;
  return s;
}

RSpaceDescriptor RSpaceDescriptor::besov_grid(int d, int N, double sigma,
                                              double p, double q) {
  require(d == 1 || d == 2, "besov_grid: d must be 1 or 2");
  require(N > 0 && (N & (N - 1)) == 0, "besov_grid: N must be a power of two");
  require(p > 0.0 && q > 0.0, "besov_grid: exponents must be positive");
  RSpaceDescriptor s;
  s.kind = RSpaceKind::BesovGrid;
  s.p = p;
  s.q = q;
  s.r = std::min({p, q, 1.0});
  s.d = d;
  s.N = N;
  s.sigma = sigma;
  return s;
}

int RSpaceDescriptor::size() const {
  switch (kind) {
    case RSpaceKind::FiniteLr:
      return dim;
    case RSpaceKind::GridLr:
    case RSpaceKind::BesovGrid: {
      int n = 1;
      for (int i = 0; i < d; ++i) n *= N;
      return n;
    }
  }
  return 0;
}

bool RSpaceDescriptor::same_as(const RSpaceDescriptor& o) const {
  return kind == o.kind && p == o.p && r == o.r && dim == o.dim && d == o.d &&
         N == o.N && sigma == o.sigma && q == o.q;
}

std::string RSpaceDescriptor::label() const {
  auto num = [](double v) {
    std::string t = std::to_string(v);
    t.erase(t.find_last_not_of('0') + 1);
    if (!t.empty() && t.back() == '.') t.pop_back();
    return t;
  };
  switch (kind) {
    case RSpaceKind::FiniteLr:
      return "l^" + num(p) + "_" + std::to_string(dim);
    case RSpaceKind::GridLr:
      return "L^" + num(p) + "(T^" + std::to_string(d) + ",N=" +
             std::to_string(N) + ")";
    case RSpaceKind::BesovGrid:
      return "B^" + num(sigma) + "_{" + num(p) + "," + num(q) + "}(T^" +
             std::to_string(d) + ",N=" + std::to_string(N) + ")";
  }
  return "?";
}

RVector::RVector(const RSpaceDescriptor& s, Eigen::ArrayXd v)
    : space(s), data(std::move(v)) {
  require_shape(static_cast<int>(data.size()) == s.size(),
                "RVector: data length does not match the space shape");
  require(data.isFinite().all(), "RVector: non-finite entry");
}

double scaled_power_sum(const Eigen::ArrayXd& absvals, double weight,
                        double p) {
  if (absvals.size() == 0) return 0.0;
  const double m = absvals.maxCoeff();
  if (m == 0.0 || !(m > 0.0)) return 0.0;
  const double s = ((absvals / m).pow(p) * weight).sum();
  return m * std::pow(s, 1.0 / p);
}

double rnorm(const RSpaceDescriptor& space, const Eigen::ArrayXd& x) {
  require_shape(static_cast<int>(x.size()) == space.size(),
                "rnorm: data length does not match the space shape");
  require(x.isFinite().all(), "rnorm: non-finite entry");
  switch (space.kind) {
    case RSpaceKind::FiniteLr:
      return scaled_power_sum(x.abs(), 1.0, space.p);
    case RSpaceKind::GridLr: {
      const double vol = 1.0 / static_cast<double>(space.size());
      return scaled_power_sum(x.abs(), vol, space.p);
    }
    case RSpaceKind::BesovGrid:
      return besov_norm_for_space(space, x);
  }
  return 0.0;
}

double rnorm(const RVector& x) { return rnorm(x.space, x.data); }

double quasi_constant_for_r(double r) {
  require(r > 0.0 && r <= 1.0, "quasi_constant: r must be in (0,1]");
  return std::exp2((1.0 - r) / r);
}

double quasi_constant(const RSpaceDescriptor& space) {
  return quasi_constant_for_r(space.r);
}

double aoki_rolewicz_exponent(double C) {
  require(C >= 1.0, "aoki_rolewicz_exponent: C must be >= 1");
  return 1.0 / std::log2(2.0 * C);
}

}  // namespace qlab
