#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "qlab/common.hpp"

namespace qlab {

enum class RSpaceKind { FiniteLr, GridLr, BesovGrid };

// A concrete r-normed coordinate space.
//
//   FiniteLr  : ell^p on `dim` coordinates, norm (sum |x_i|^p)^{1/p}.
//   GridLr    : L^p of a sampled field on the periodic unit torus, uniform
//               cells of volume N^-d, norm (sum vol*|x_i|^p)^{1/p}.
//   BesovGrid : B^sigma_{p,q} of a GridField (values array of a d-dim grid);
//               norm evaluation is the Littlewood-Paley block sum.
//
// `p` is the full norm exponent (any positive real; ell^3 etc. allowed).
// `r` is the derived r-norm exponent: p ∧ 1 for Lr kinds, p ∧ q ∧ 1 for
// BesovGrid.  Only r enters the quasi-norm constants.
struct RSpaceDescriptor {
  RSpaceKind kind = RSpaceKind::FiniteLr;
  double p = 2.0;    // norm exponent (Lr kinds); L^p block exponent (Besov)
  double r = 1.0;    // r-norm exponent, always in (0,1]
  int dim = 1;       // FiniteLr: coordinate count
  int d = 1;         // GridLr/BesovGrid: grid dimension (1 or 2)
  int N = 1;         // GridLr/BesovGrid: points per axis (power of two)
  double sigma = 0;  // BesovGrid smoothness
  double q = 2.0;    // BesovGrid summation exponent

  static RSpaceDescriptor finite_lr(int dim, double p);
  static RSpaceDescriptor grid_lr(int d, int N, double p);
  static RSpaceDescriptor besov_grid(int d, int N, double sigma, double p,
                                     double q);

  // Number of coordinates an RVector in this space carries.
  int size() const;
  bool same_as(const RSpaceDescriptor& o) const;
  std::string label() const;
};

// Element of an r-normed space: descriptor + coordinate array.
struct RVector {
  RSpaceDescriptor space;
  Eigen::ArrayXd data;

  RVector() = default;
  RVector(const RSpaceDescriptor& s, Eigen::ArrayXd v);
};

// (sum w_i |x_i|^p)^{1/p} with the max-magnitude coordinate factored out
// before powering, so small exponents cannot underflow/overflow.
double rnorm(const RSpaceDescriptor& space, const Eigen::ArrayXd& x);
double rnorm(const RVector& x);

// Quasi-triangle constant induced by the r-norm: 2^{(1-r)/r}.
double quasi_constant(const RSpaceDescriptor& space);
double quasi_constant_for_r(double r);

// r solving (2C)^r = 2, the exponent recovered from a quasi-norm constant.
double aoki_rolewicz_exponent(double C);

// Scale-free p-th power sum used by rnorm and the Besov block sum:
// (sum w_i |x_i|^p)^{1/p} evaluated as M * (sum w_i (|x_i|/M)^p)^{1/p}.
double scaled_power_sum(const Eigen::ArrayXd& absvals, double weight, double p);

}  // namespace qlab
