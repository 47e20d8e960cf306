#include "qlab/besovlp.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace qlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

// FFTW plan creation is not thread safe; execution on distinct buffers is.
std::mutex& fft_mutex() {
  static std::mutex m;
  return m;
}

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  ~PlanPair() {
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

// Plans are created once per (d, N) on an internal buffer and executed via
// fftw_execute_dft on caller buffers (same alignment contract: we always
// allocate with fftw_malloc-compatible alignment through Eigen's aligned
// allocator; to stay safe we execute on a scratch buffer guarded per call).
PlanPair& plans_for(int d, int N) {
  static std::map<std::pair<int, int>, std::unique_ptr<PlanPair>> cache;
  std::lock_guard<std::mutex> lock(fft_mutex());
  auto key = std::make_pair(d, N);
  auto it = cache.find(key);
  if (it == cache.end()) {
    auto pp = std::make_unique<PlanPair>();
    const int size = (d == 1) ? N : N * N;
    std::vector<std::complex<double>> buf(size);
    auto* ptr = reinterpret_cast<fftw_complex*>(buf.data());
    if (d == 1) {
      pp->forward = fftw_plan_dft_1d(N, ptr, ptr, FFTW_FORWARD, FFTW_ESTIMATE);
      pp->backward = fftw_plan_dft_1d(N, ptr, ptr, FFTW_BACKWARD, FFTW_ESTIMATE);
    } else {
      pp->forward = fftw_plan_dft_2d(N, N, ptr, ptr, FFTW_FORWARD, FFTW_ESTIMATE);
      pp->backward = fftw_plan_dft_2d(N, N, ptr, ptr, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    it = cache.emplace(key, std::move(pp)).first;
  }
  return *it->second;
}

void run_fft(int d, int N, std::complex<double>* data, bool forward) {
  PlanPair& pp = plans_for(d, N);
  auto* ptr = reinterpret_cast<fftw_complex*>(data);
  // fftw_execute_dft is thread safe for distinct buffers, but the new-array
  // execute requires the same alignment as the plan buffer; std::complex
  // vectors from the default allocator are 16-byte aligned in practice.
  // Serialize defensively: transforms here are never the hot path.
  std::lock_guard<std::mutex> lock(fft_mutex());
  fftw_execute_dft(forward ? pp.forward : pp.backward, ptr, ptr);
}

}  // namespace

GridField::GridField(int d, int N) : d_(d), N_(N) {
  require(d == 1 || d == 2, "GridField: d must be 1 or 2");
  require(N > 0 && (N & (N - 1)) == 0, "GridField: N must be a power of two");
  const int size = (d == 1) ? N : N * N;
  values_ = Eigen::ArrayXd::Zero(size);
  spectrum_ = Eigen::ArrayXcd::Zero(size);
  have_values_ = have_spectrum_ = true;
}

GridField GridField::from_values(int d, int N, Eigen::ArrayXd values) {
  GridField f(d, N);
  require_shape(values.size() == f.values_.size(),
                "GridField: values length does not match d, N");
  require(values.isFinite().all(), "GridField: non-finite value");
  f.values_ = std::move(values);
  f.have_values_ = true;
  f.have_spectrum_ = false;
  return f;
}

GridField GridField::from_spectrum(int d, int N, Eigen::ArrayXcd spectrum) {
  GridField f(d, N);
  require_shape(spectrum.size() == f.spectrum_.size(),
                "GridField: spectrum length does not match d, N");
  f.spectrum_ = std::move(spectrum);
  f.have_spectrum_ = true;
  f.have_values_ = false;
  return f;
}

const Eigen::ArrayXd& GridField::values() const {
  if (!have_values_) {
    std::vector<std::complex<double>> buf(spectrum_.data(),
                                          spectrum_.data() + spectrum_.size());
    run_fft(d_, N_, buf.data(), /*forward=*/false);
    values_.resize(static_cast<Eigen::Index>(buf.size()));
    for (size_t i = 0; i < buf.size(); ++i) values_[static_cast<Eigen::Index>(i)] = buf[i].real();
    have_values_ = true;
  }
  return values_;
}

const Eigen::ArrayXcd& GridField::spectrum() const {
  if (!have_spectrum_) {
    std::vector<std::complex<double>> buf(values_.size());
    for (Eigen::Index i = 0; i < values_.size(); ++i) buf[static_cast<size_t>(i)] = values_[i];
    run_fft(d_, N_, buf.data(), /*forward=*/true);
    const double scale = 1.0 / static_cast<double>(buf.size());
    spectrum_.resize(values_.size());
    for (size_t i = 0; i < buf.size(); ++i)
      spectrum_[static_cast<Eigen::Index>(i)] = buf[i] * scale;
    have_spectrum_ = true;
  }
  return spectrum_;
}

int GridField::freq(int index, int axis) const {
  int i = (d_ == 1) ? index : (axis == 0 ? index / N_ : index % N_);
  return (i < N_ / 2) ? i : i - N_;
}

double GridField::freq_sq(int index) const {
  if (d_ == 1) {
    const double k = freq(index, 0);
    return k * k;
  }
  const double k0 = freq(index, 0);
  const double k1 = freq(index, 1);
  return k0 * k0 + k1 * k1;
}

int GridField::index_of_freq(int k0, int k1) const {
  auto wrap = [this](int k) { return (k % N_ + N_) % N_; };
  return (d_ == 1) ? wrap(k0) : wrap(k0) * N_ + wrap(k1);
}

double GridField::band_limit() const {
  const auto& sp = spectrum();
  double b = 0.0;
  for (Eigen::Index i = 0; i < sp.size(); ++i)
    if (std::abs(sp[i]) > 1e-14) b = std::max(b, std::sqrt(freq_sq(static_cast<int>(i))));
  return b;
}

GridField GridField::multiplied(const Eigen::ArrayXd& multiplier) const {
  require_shape(multiplier.size() == spectrum().size(),
                "GridField: multiplier length mismatch");
  return from_spectrum(d_, N_, spectrum() * multiplier.cast<std::complex<double>>());
}

// --- window bank ------------------------------------------------------

double LPWindowBank::profile(double xi_abs) {
  // Smooth step from the standard e^{-1/x} bump: h(u) = psi(u)/(psi(u)+psi(1-u))
  // rises 0 -> 1 on [0,1]; the profile is h(3 - 2|ξ|): plateau 1 on |ξ|<=1,
  // support |ξ| < 3/2.
  auto psi = [](double u) { return (u > 0.0) ? std::exp(-1.0 / u) : 0.0; };
  const double u = 3.0 - 2.0 * xi_abs;
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double a = psi(u);
  const double b = psi(1.0 - u);
  return a / (a + b);
}

double LPWindowBank::window(int k, double xi_abs) const {
  if (k == 0) return profile(xi_abs);
  return profile(std::ldexp(xi_abs, -k)) - profile(std::ldexp(xi_abs, -k + 1));
}

LPWindowBank::LPWindowBank(int d, int N) : d_(d), N_(N) {
  require(d == 1 || d == 2, "LPWindowBank: d must be 1 or 2");
  require(N >= 8 && (N & (N - 1)) == 0, "LPWindowBank: N must be a power of two >= 8");
  k_max_ = static_cast<int>(std::floor(std::log2(static_cast<double>(N) / 3.0))) + 1;
  GridField probe(d, N);
  const int size = probe.size();
  lattice_windows_.resize(static_cast<size_t>(k_max_) + 1);
  for (int k = 0; k <= k_max_; ++k) {
    Eigen::ArrayXd w(size);
    for (int i = 0; i < size; ++i) w[i] = window(k, std::sqrt(probe.freq_sq(i)));
    lattice_windows_[static_cast<size_t>(k)] = std::move(w);
  }
}

const Eigen::ArrayXd& LPWindowBank::window_on_lattice(int k) const {
  require(k >= 0 && k <= k_max_, "LPWindowBank: window index out of range");
  return lattice_windows_[static_cast<size_t>(k)];
}

const LPWindowBank& window_bank(int d, int N) {
  static std::map<std::pair<int, int>, std::unique_ptr<LPWindowBank>> cache;
  static std::mutex m;
  std::lock_guard<std::mutex> lock(m);
  auto key = std::make_pair(d, N);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, std::make_unique<LPWindowBank>(d, N)).first;
  return *it->second;
}

// --- blocks and norms --------------------------------------------------

std::vector<GridField> lp_blocks(const GridField& f, const LPWindowBank& bank) {
  require_shape(f.d() == bank.d() && f.N() == bank.N(),
                "lp_blocks: bank does not match the grid");
  std::vector<GridField> blocks;
  blocks.reserve(static_cast<size_t>(bank.k_max()) + 1);
  for (int k = 0; k <= bank.k_max(); ++k)
    blocks.push_back(f.multiplied(bank.window_on_lattice(k)));
  return blocks;
}

double grid_lp_norm(const GridField& f, double p) {
  const double vol = 1.0 / static_cast<double>(f.size());
  return scaled_power_sum(f.values().abs(), vol, p);
}

namespace {

double besov_from_block_norms(const std::vector<double>& block_lp, double sigma,
                              double q) {
  Eigen::ArrayXd terms(static_cast<Eigen::Index>(block_lp.size()));
  for (size_t k = 0; k < block_lp.size(); ++k)
    terms[static_cast<Eigen::Index>(k)] =
        std::exp2(sigma * static_cast<double>(k)) * block_lp[k];
  return scaled_power_sum(terms, 1.0, q);
}

}  // namespace

double besov_norm(const GridField& f, double sigma, double p, double q,
                  const LPWindowBank& bank) {
  require(p > 0.0 && q > 0.0, "besov_norm: exponents must be positive");
  std::vector<double> block_lp;
  block_lp.reserve(static_cast<size_t>(bank.k_max()) + 1);
  for (const GridField& b : lp_blocks(f, bank)) block_lp.push_back(grid_lp_norm(b, p));
  return besov_from_block_norms(block_lp, sigma, q);
}

double besov_norm(const std::vector<GridField>& components, double sigma,
                  double p, double q, const LPWindowBank& bank) {
  require(!components.empty(), "besov_norm: empty component list");
  require(p > 0.0 && q > 0.0, "besov_norm: exponents must be positive");
  for (const auto& c : components)
    require_shape(c.d() == bank.d() && c.N() == bank.N(),
                  "besov_norm: component grid does not match the bank");
  const int size = components.front().size();
  const double vol = 1.0 / static_cast<double>(size);
  std::vector<double> block_lp;
  for (int k = 0; k <= bank.k_max(); ++k) {
    Eigen::ArrayXd sq = Eigen::ArrayXd::Zero(size);
    for (const auto& c : components) {
      GridField b = c.multiplied(bank.window_on_lattice(k));
      sq += b.values().square();
    }
    block_lp.push_back(scaled_power_sum(sq.sqrt(), vol, p));
  }
  return besov_from_block_norms(block_lp, sigma, q);
}

double besov_norm_for_space(const RSpaceDescriptor& space,
                            const Eigen::ArrayXd& values) {
  require_shape(space.kind == RSpaceKind::BesovGrid,
                "besov_norm_for_space: descriptor is not BesovGrid");
  GridField f = GridField::from_values(space.d, space.N, values);
  return besov_norm(f, space.sigma, space.p, space.q, window_bank(space.d, space.N));
}

// --- multipliers --------------------------------------------------------

GridField heat_multiply(const GridField& f, double t) {
  require(t >= 0.0, "heat_multiply: t must be nonnegative");
  if (t == 0.0) return f;
  Eigen::ArrayXd m(f.size());
  for (int i = 0; i < f.size(); ++i)
    m[i] = std::exp(-4.0 * kPi * kPi * t * f.freq_sq(i));
  return f.multiplied(m);
}

GridField bessel_lift(const GridField& f, double alpha) {
  if (alpha == 0.0) return f;
  Eigen::ArrayXd m(f.size());
  for (int i = 0; i < f.size(); ++i) m[i] = std::pow(1.0 + f.freq_sq(i), alpha);
  return f.multiplied(m);
}

// --- maximal function ----------------------------------------------------

GridField maximal_function(const GridField& f, double r_exponent) {
  require(r_exponent > 0.0 && r_exponent <= 1.0,
          "maximal_function: exponent must be in (0,1]");
  const int N = f.N();
  const int size = f.size();
  Eigen::ArrayXd g = f.values().abs().pow(r_exponent);
  Eigen::ArrayXd best = g;  // radius 0: the cell itself
  Eigen::ArrayXd running = g;
  double count = 1.0;

  if (f.d() == 1) {
    // Grow the ball one ring at a time; ring m adds offsets ±m (dedup at N/2).
    for (int m = 1; m <= N / 2; ++m) {
      for (int x = 0; x < N; ++x) {
        const int lo = (x - m + N) % N;
        const int hi = (x + m) % N;
        running[x] += g[lo];
        if (hi != lo) running[x] += g[hi];
      }
      count += (m == N / 2) ? 1.0 : 2.0;
      best = best.max(running / count);
    }
  } else {
    // Precompute ring offset lists: ring m = {(a,b): (m-1)^2 < a^2+b^2 <= m^2}
    // within the min-image box (-N/2, N/2].
    for (int m = 1; m <= N / 2; ++m) {
      std::vector<std::pair<int, int>> ring;
      const int lo2 = (m - 1) * (m - 1);
      const int hi2 = m * m;
      for (int a = -m; a <= m; ++a)
        for (int b = -m; b <= m; ++b) {
          if (a <= -N / 2 || b <= -N / 2) continue;  // outside min-image box
          const int d2 = a * a + b * b;
          if (d2 > lo2 && d2 <= hi2) ring.emplace_back(a, b);
        }
      for (int x0 = 0; x0 < N; ++x0)
        for (int x1 = 0; x1 < N; ++x1) {
          double acc = 0.0;
          for (auto [a, b] : ring) {
            const int y0 = (x0 + a + N) % N;
            const int y1 = (x1 + b + N) % N;
            acc += g[y0 * N + y1];
          }
          running[x0 * N + x1] += acc;
        }
      count += static_cast<double>(ring.size());
      best = best.max(running / count);
    }
  }
  (void)size;
  return GridField::from_values(f.d(), N, best);
}

// --- pointwise heat bounds ----------------------------------------------

namespace {

bool single_band_support(const GridField& f) {
  // Spectrum confined to |ξ| <= 3/2 or to one annulus 2^{n-1} <= |ξ| <= 3·2^{n-1}.
  const auto& sp = f.spectrum();
  double lo = 1e300, hi = 0.0;
  for (Eigen::Index i = 0; i < sp.size(); ++i) {
    if (std::abs(sp[i]) > 1e-14) {
      const double a = std::sqrt(f.freq_sq(static_cast<int>(i)));
      lo = std::min(lo, a);
      hi = std::max(hi, a);
    }
  }
  if (hi == 0.0) return true;       // zero field
  if (hi <= 1.5) return true;       // base ball
  for (int n = 1; n <= 30; ++n) {
    const double a = std::ldexp(1.0, n - 1);
    if (lo >= a && hi <= 3.0 * a) return true;
  }
  return false;
}

double empirical_heat_constant(const GridField& f, const GridField& lhs_field,
                               double prefactor, const Eigen::ArrayXd& m_pow) {
  const Eigen::ArrayXd lhs = lhs_field.values().abs();
  double c = 0.0;
  for (Eigen::Index i = 0; i < lhs.size(); ++i) {
    const double denom = prefactor * m_pow[i];
    if (denom > 0.0) c = std::max(c, lhs[i] / denom);
  }
  (void)f;
  return c;
}

}  // namespace

HeatBoundReport check_pointwise_heat_bound(const GridField& f, double alpha,
                                           double r_exponent,
                                           const std::vector<double>& t_list,
                                           double ratio_cap) {
  require(single_band_support(f),
          "check_pointwise_heat_bound: field is not band-limited to one annulus");
  require(!t_list.empty(), "check_pointwise_heat_bound: empty t list");
  const Eigen::ArrayXd m_pow =
      maximal_function(f, r_exponent).values().pow(1.0 / r_exponent);
  HeatBoundReport rep;
  for (double t : t_list) {
    require(t > 0.0 || alpha <= 0.0,
            "check_pointwise_heat_bound: t=0 requires alpha <= 0");
    GridField lhs = bessel_lift(heat_multiply(f, t), alpha);
    const double pre = std::pow(t > 0.0 ? t : 1.0, -(std::max(alpha, 0.0))) *
                       std::exp(5.0 * kPi * kPi * t);
    HeatBoundPoint pt;
    pt.t = t;
    pt.constant = empirical_heat_constant(f, lhs, pre, m_pow);
    rep.points.push_back(pt);
  }
  rep.max_constant = rep.points.front().constant;
  rep.min_constant = rep.points.front().constant;
  for (const auto& pt : rep.points) {
    rep.max_constant = std::max(rep.max_constant, pt.constant);
    rep.min_constant = std::min(rep.min_constant, pt.constant);
  }
  rep.pass = std::isfinite(rep.max_constant) && rep.max_constant > 0.0 &&
             rep.max_constant / std::max(rep.min_constant, 1e-300) < ratio_cap;
  return rep;
}

HeatBoundReport check_pointwise_heat_increment_bound(
    const GridField& f, double alpha, double lambda, double r_exponent,
    const std::vector<std::pair<double, double>>& st_list, double ratio_cap) {
  require(single_band_support(f),
          "check_pointwise_heat_increment_bound: field is not band-limited to one annulus");
  require(lambda >= 0.0 && lambda < 1.0,
          "check_pointwise_heat_increment_bound: lambda must be in [0,1)");
  const Eigen::ArrayXd m_pow =
      maximal_function(f, r_exponent).values().pow(1.0 / r_exponent);
  HeatBoundReport rep;
  for (auto [s, t] : st_list) {
    require(0.0 <= s && s < t, "check_pointwise_heat_increment_bound: need 0 <= s < t");
    require(s > 0.0 || alpha <= -lambda,
            "check_pointwise_heat_increment_bound: s=0 requires alpha <= -lambda");
    GridField diff = GridField::from_spectrum(
        f.d(), f.N(), heat_multiply(f, t).spectrum() - heat_multiply(f, s).spectrum());
    GridField lhs = bessel_lift(diff, alpha);
    const double s_pow =
        std::pow(s > 0.0 ? s : 1.0, std::min(-alpha - lambda, 0.0));
    const double pre =
        s_pow * std::pow(t - s, lambda) * std::exp(6.0 * kPi * kPi * t);
    HeatBoundPoint pt;
    pt.t = t;
    pt.s = s;
    pt.constant = empirical_heat_constant(f, lhs, pre, m_pow);
    rep.points.push_back(pt);
  }
  rep.max_constant = rep.points.front().constant;
  rep.min_constant = rep.points.front().constant;
  for (const auto& pt : rep.points) {
    rep.max_constant = std::max(rep.max_constant, pt.constant);
    rep.min_constant = std::min(rep.min_constant, pt.constant);
  }
  rep.pass = std::isfinite(rep.max_constant) && rep.max_constant > 0.0 &&
             rep.max_constant / std::max(rep.min_constant, 1e-300) < ratio_cap;
  return rep;
}

VectorMaximalReport check_fefferman_stein(const std::vector<GridField>& fields,
                                          double p, double q,
                                          double r_exponent) {
  require(!fields.empty(), "check_fefferman_stein: empty family");
  require(r_exponent > 0.0 && r_exponent <= 1.0 && r_exponent < std::min(p, q),
          "check_fefferman_stein: need r in (0, p ∧ q) ∩ (0,1]");
  const int size = fields.front().size();
  const double vol = 1.0 / static_cast<double>(size);
  Eigen::ArrayXd lhs_q = Eigen::ArrayXd::Zero(size);
  Eigen::ArrayXd rhs_q = Eigen::ArrayXd::Zero(size);
  for (const auto& f : fields) {
    require_shape(f.size() == size && f.d() == fields.front().d(),
                  "check_fefferman_stein: mismatched grids");
    lhs_q += maximal_function(f, r_exponent).values().pow(q / r_exponent);
    rhs_q += f.values().abs().pow(q);
  }
  VectorMaximalReport rep;
  rep.lhs = scaled_power_sum(lhs_q.pow(1.0 / q), vol, p);
  rep.rhs = scaled_power_sum(rhs_q.pow(1.0 / q), vol, p);
  rep.constant = (rep.rhs > 0.0) ? rep.lhs / rep.rhs : 0.0;
  return rep;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    if (!(y[i] > 0.0) || !(x[i] > 0.0)) continue;
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  require(n >= 2, "loglog_slope: need at least two positive points");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

SmoothingReport check_besov_smoothing(
    const GridField& f, double sigma, double lambda,
    const std::vector<std::pair<double, double>>& st_pairs, double p,
    double q) {
  require(lambda >= 0.0 && lambda < 1.0,
          "check_besov_smoothing: lambda must be in [0,1)");
  require(!st_pairs.empty(), "check_besov_smoothing: empty pair list");
  const LPWindowBank& bank = window_bank(f.d(), f.N());
  const double base = besov_norm(f, sigma, p, q, bank);
  SmoothingReport rep;
  for (auto [s, t] : st_pairs) {
    require(0.0 <= s && s <= t, "check_besov_smoothing: need 0 <= s <= t");
    GridField diff = GridField::from_spectrum(
        f.d(), f.N(), heat_multiply(f, t).spectrum() - heat_multiply(f, s).spectrum());
    const double v = besov_norm(diff, sigma - 2.0 * lambda, p, q, bank);
    rep.gaps.push_back(t - s);
    rep.values.push_back(v);
    rep.bound_rhs.push_back(std::pow(t - s, lambda) *
                            std::exp(6.0 * kPi * kPi * t) * base);
  }
  rep.max_constant = 0.0;
  for (size_t i = 0; i < rep.values.size(); ++i)
    if (rep.bound_rhs[i] > 0.0)
      rep.max_constant = std::max(rep.max_constant, rep.values[i] / rep.bound_rhs[i]);
  rep.slope = (lambda > 0.0) ? loglog_slope(rep.gaps, rep.values) : 0.0;
  rep.pass = std::isfinite(rep.max_constant) &&
             (lambda == 0.0 || rep.slope >= lambda - 0.05);
  return rep;
}

}  // namespace qlab
