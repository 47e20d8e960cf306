#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "qlab/common.hpp"
#include "qlab/qspace.hpp"

namespace qlab {

// Periodic sampled field on the unit torus, d in {1,2}, N points per axis
// (power of two).  Values are real; the discrete Fourier coefficients are
// cached on first use.  Spectral convention: values[x] = sum_k F[k] e^{2πi k·x/N},
// i.e. F[k] is the coefficient of the torus mode e^{2πi k·ξ}; forward
// transform carries the 1/N^d factor.  Frequencies per axis live in
// [-N/2, N/2), stored in natural FFT order (index i -> k = i < N/2 ? i : i-N).
class GridField {
 public:
  GridField() = default;
  GridField(int d, int N);  // zero field

  static GridField from_values(int d, int N, Eigen::ArrayXd values);
  static GridField from_spectrum(int d, int N, Eigen::ArrayXcd spectrum);

  int d() const { return d_; }
  int N() const { return N_; }
  int size() const { return static_cast<int>(values_.size()); }

  const Eigen::ArrayXd& values() const;
  const Eigen::ArrayXcd& spectrum() const;

  // Integer frequency of spectral index i along `axis`.
  int freq(int index, int axis) const;
  // |k|^2 of flat spectral index i.
  double freq_sq(int index) const;
  // Flat spectral index of an axis-frequency tuple.
  int index_of_freq(int k0, int k1 = 0) const;

  // Largest |k| with a nonzero coefficient (0 for the zero field).
  double band_limit() const;

  GridField multiplied(const Eigen::ArrayXd& multiplier) const;

 private:
  int d_ = 1;
  int N_ = 1;
  mutable Eigen::ArrayXd values_;
  mutable Eigen::ArrayXcd spectrum_;
  mutable bool have_values_ = false;
  mutable bool have_spectrum_ = false;
};

// Littlewood-Paley window bank on the frequency lattice of an N-point grid.
// The profile is a smooth cutoff with plateau 1 on |ξ|<=1 and support in
// |ξ|<3/2; window k>=1 is profile(2^-k ξ) - profile(2^-k+1 ξ), window 0 is
// the profile itself.  Windows 0..k_max sum to 1 on |ξ| <= N/3, and every
// field this library produces is band-limited below N/3.
class LPWindowBank {
 public:
  LPWindowBank(int d, int N);

  int d() const { return d_; }
  int N() const { return N_; }
  int k_max() const { return k_max_; }

  // Window k evaluated at radius |ξ| (exact profile arithmetic).
  double window(int k, double xi_abs) const;
  // Smooth cutoff profile at radius |ξ|.
  static double profile(double xi_abs);

  // Window k sampled on the flat spectral lattice of a matching field.
  const Eigen::ArrayXd& window_on_lattice(int k) const;

 private:
  int d_;
  int N_;
  int k_max_;
  std::vector<Eigen::ArrayXd> lattice_windows_;
};

const LPWindowBank& window_bank(int d, int N);  // cached per (d, N)

// Frequency-annulus pieces of f: block k = inverse transform of window_k *
// spectrum.  Blocks 0..k_max sum back to f for band-limited fields.
std::vector<GridField> lp_blocks(const GridField& f, const LPWindowBank& bank);

// ( sum_k (2^{k sigma} ||block_k||_{L^p})^q )^{1/q}.  The H-valued variant
// takes the pointwise ell^2 norm over components inside the L^p norm.
double besov_norm(const GridField& f, double sigma, double p, double q,
                  const LPWindowBank& bank);
double besov_norm(const std::vector<GridField>& components, double sigma,
                  double p, double q, const LPWindowBank& bank);

// rnorm dispatch target for BesovGrid descriptors (data = grid values).
double besov_norm_for_space(const RSpaceDescriptor& space,
                            const Eigen::ArrayXd& values);

// Heat semigroup: spectrum scaled by e^{-4π² t |k|²}; t = 0 is the identity.
GridField heat_multiply(const GridField& f, double t);

// Bessel-type lift: spectrum scaled by (1+|k|²)^alpha.
GridField bessel_lift(const GridField& f, double alpha);

// L^p norm of a field over the unit torus (uniform cell weights).
double grid_lp_norm(const GridField& f, double p);

// Hardy-Littlewood maximal function of |f|^r on the periodic grid: at each
// point, the largest exact discrete-ball average of |f|^r over ball radii
// 0, 1/N, 2/N, ..., (N/2)/N (ball membership by cell center, min-image
// metric).  Returns the grid of maxima of the averages (not ^{1/r}).
GridField maximal_function(const GridField& f, double r_exponent);

struct HeatBoundPoint {
  double t = 0;
  double s = 0;  // increment form only
  double constant = 0;
};

struct HeatBoundReport {
  std::vector<HeatBoundPoint> points;
  double max_constant = 0;
  double min_constant = 0;
  bool pass = false;
};

// Pointwise heat-multiplier bound: for each t, the empirical constant
//   sup_x |J^alpha (K_t f)(x)| / ( t^{-(alpha ∨ 0)} e^{5π² t} M(|f|^r)(x)^{1/r} )
// must be finite and vary by less than ratio_cap across t_list.  f must be
// spectrally supported in one LP annulus or the base ball.
HeatBoundReport check_pointwise_heat_bound(const GridField& f, double alpha,
                                           double r_exponent,
                                           const std::vector<double>& t_list,
                                           double ratio_cap = 2.0);

// Increment form: |J^alpha (K_t f - K_s f)| against
// s^{(-alpha-lambda) ∧ 0} (t-s)^lambda e^{6π² t} M(|f|^r)^{1/r}.
HeatBoundReport check_pointwise_heat_increment_bound(
    const GridField& f, double alpha, double lambda, double r_exponent,
    const std::vector<std::pair<double, double>>& st_list,
    double ratio_cap = 2.0);

struct VectorMaximalReport {
  double lhs = 0;
  double rhs = 0;
  double constant = 0;  // lhs / rhs
};

// Vector-valued maximal inequality data:
//   || ( sum_j M(|f_j|^r)^{q/r} )^{1/q} ||_{L^p}  vs  || (sum_j |f_j|^q)^{1/q} ||_{L^p}.
VectorMaximalReport check_fefferman_stein(const std::vector<GridField>& fields,
                                          double p, double q,
                                          double r_exponent);

struct SmoothingReport {
  std::vector<double> gaps;
  std::vector<double> values;     // ||(K_t - K_s) f||_{B^{sigma-2 lambda}}
  std::vector<double> bound_rhs;  // (t-s)^lambda e^{6π² t} ||f||_{B^sigma}
  double slope = 0;               // log-log fit of values vs gaps
  double max_constant = 0;        // max values/bound_rhs
  bool pass = false;
};

// Heat-increment smoothing on the Besov scale: values must scale at least
// like (t-s)^lambda (fitted slope >= lambda - 0.05) and stay below an
// empirical multiple of the bound.
SmoothingReport check_besov_smoothing(
    const GridField& f, double sigma, double lambda,
    const std::vector<std::pair<double, double>>& st_pairs, double p, double q);

// Least-squares slope of log(y) against log(x); ignores non-positive y.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace qlab
