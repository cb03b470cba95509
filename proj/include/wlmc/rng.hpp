/**
 * @file rng.hpp
 * @brief Deterministic random streams keyed on (seed, index...).
 *
 * Every loop, ensemble and simulation owns an independent sub-stream whose
 * seed is a pure function of the run seed and its integer coordinates, so
 * results never depend on evaluation order or on the number of workers.
 */
#ifndef WLMC_RNG_HPP
#define WLMC_RNG_HPP

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

#include <boost/random/normal_distribution.hpp>

namespace wlmc {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of the sub-stream at coordinates `keys` below `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed,
                                    std::initializer_list<std::uint64_t> keys) noexcept {
  std::uint64_t h = splitmix64(seed);
  for (std::uint64_t k : keys) h = splitmix64(h ^ splitmix64(k + 0x632be59bd9b4e019ULL));
  return h;
}

/// Normal variates with density proportional to exp(-w^2), i.e. variance 1/2.
///
/// All loop algorithms draw through this one sampler (the Boost ziggurat on a
/// 64-bit Mersenne Twister), so comparisons between algorithms never compare
/// samplers, and the stream is the same on every standard library.
class NormalStream {
 public:
  static constexpr double kStdDev = 0.70710678118654752440;

  explicit NormalStream(std::uint64_t seed) : engine_(seed), dist_(0.0, kStdDev) {}

  double operator()() { return dist_(engine_); }

  std::uint64_t raw() { return engine_(); }

  double uniform() { return std::generate_canonical<double, 53>(engine_); }

 private:
  std::mt19937_64 engine_;
  boost::random::normal_distribution<double> dist_;
};

/// One draw of a d-dimensional vector with i.i.d. N(0, 1/2) components.
template <class Source>
std::vector<double> gaussian_vector(Source& rng, int dim) {
  std::vector<double> out(static_cast<std::size_t>(dim));
  for (double& c : out) c = rng();
  return out;
}

}  // namespace wlmc

#endif  // WLMC_RNG_HPP
