#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace qlab {

// Counter-based stream generator: output i of stream `key` is mix64(key, i).
// Any chunk [a,b) of a stream can be generated independently of the rest, so
// parallel workers that split the counter range reproduce the serial results
// bit for bit.  Streams are split by hashing a label or child index into the
// key; distinct labels give disjoint streams for all practical purposes.
//
// The mixer is the 64-bit finalizer from splitmix64 (Stafford mix13),
// applied to key ^ (counter * golden-ratio increment).
inline std::uint64_t mix64(std::uint64_t key, std::uint64_t counter) {
  std::uint64_t z = key ^ (counter * 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t hash_label(std::string_view label) {
  // FNV-1a, then one mix round to spread low entropy labels.
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : label) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001B3ULL;
  }
  return mix64(h, 0x5851F42D4C957F2DULL);
}

// Inverse standard-normal CDF (Wichura's PPND16 rational approximations).
// Absolute error below 1e-15 over (0,1); used so that one uniform draw maps
// to exactly one Gaussian variate, preserving the counter discipline.
inline double inverse_normal_cdf(double p) {
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) *
                    r +
                4.5921953931549871457e4) *
                   r +
               1.3731693765509461125e4) *
                  r +
              1.9715909503065514427e3) *
                 r +
             1.3314166789178437745e2) *
                r +
            3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) *
                    r +
                2.1213794301586595867e4) *
                   r +
               5.3941960214247511077e3) *
                  r +
              6.8718700749205790830e2) *
                 r +
             4.2313330701600911252e1) *
                r +
            1.0);
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double v;
  if (r <= 5.0) {
    r -= 1.6;
    v = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) *
                 r +
             1.27045825245236838258e0) *
                r +
            3.64784832476320460504e0) *
               r +
           5.76949722146069140550e0) *
              r +
          4.63033784615654529590e0) *
             r +
         1.42343711074968357734e0) /
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) *
                 r +
             1.48103976427480074590e-1) *
                r +
            6.89767334985100004550e-1) *
               r +
           1.67638483018380384940e0) *
              r +
          2.05319162663775882187e0) *
             r +
         1.0);
  } else {
    r -= 5.0;
    v = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) *
                 r +
             2.65321895265761230930e-2) *
                r +
            2.96560571828504891230e-1) *
               r +
           1.78482653991729133580e0) *
              r +
          5.46378491116411436990e0) *
             r +
         6.65790464350110377720e0) /
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) *
                  r +
              1.84631831751005468180e-5) *
                 r +
             7.86869131145613259100e-4) *
                r +
            1.48753612908506148525e-2) *
               r +
           1.36929880922735805310e-1) *
              r +
          5.99832206555887937690e-1) *
             r +
         1.0);
  }
  return (q < 0.0) ? -v : v;
}

// One stream of the counter generator.  Copyable; copies advance separately.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::string_view label)
      : key_(mix64(seed, hash_label(label))), counter_(0) {}
  CounterRng(std::uint64_t seed, std::string_view label, std::uint64_t index)
      : key_(mix64(mix64(seed, hash_label(label)), index ^ 0xA0761D6478BD642FULL)),
        counter_(0) {}

  // Child stream: disjoint from this one and from other labels/indices.
  CounterRng child(std::string_view label) const {
    CounterRng c(*this);
    c.key_ = mix64(key_, hash_label(label));
    c.counter_ = 0;
    return c;
  }
  CounterRng child(std::uint64_t index) const {
    CounterRng c(*this);
    c.key_ = mix64(key_, index ^ 0xA0761D6478BD642FULL);
    c.counter_ = 0;
    return c;
  }

  std::uint64_t next_u64() { return mix64(key_, counter_++); }

  // Uniform on (0,1): 53 mantissa bits, offset so 0 and 1 are unreachable.
  double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double next_gaussian() { return inverse_normal_cdf(next_uniform()); }

  // Rademacher sign.
  double next_sign() { return (next_u64() >> 63) ? 1.0 : -1.0; }

  void skip(std::uint64_t n) { counter_ += n; }
  std::uint64_t counter() const { return counter_; }
  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

inline constexpr const char* kGeneratorId = "mix13-counter-v1";

}  // namespace qlab
