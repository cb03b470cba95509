/**
 * @file loops.hpp
 * @brief Unit loops with Dirichlet endpoints and the three generators
 *        (vloop, yloop, LSOL) that sample them.
 *
 * A unit loop is the dimensionless fluctuation q(u), u in [0,1], sampled at
 * u_i = i/N_p with q_0 = q_{N_p} = 0 and weight
 * exp(-(N_p/2) * sum_i (q_i - q_{i-1})^2). Physical trajectories follow from
 * x(u) = y + (x - y) u + sqrt(t/m) q(u).
 */
#ifndef WLMC_LOOPS_HPP
#define WLMC_LOOPS_HPP

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <new>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wlmc/errors.hpp"
#include "wlmc/parallel.hpp"
#include "wlmc/rng.hpp"

namespace wlmc {

enum class LoopAlgorithm { VLoop, YLoop, Lsol };

constexpr std::string_view to_string(LoopAlgorithm a) noexcept {
  switch (a) {
    case LoopAlgorithm::VLoop: return "vloop";
    case LoopAlgorithm::YLoop: return "yloop";
    case LoopAlgorithm::Lsol: return "lsol";
  }
  return "?";
}

inline LoopAlgorithm parse_algorithm(std::string_view name) {
  if (name == "vloop") return LoopAlgorithm::VLoop;
  if (name == "yloop") return LoopAlgorithm::YLoop;
  if (name == "lsol") return LoopAlgorithm::Lsol;
  throw Error(ErrorCode::InvalidArgument, "unknown loop algorithm '" + std::string(name) + "'");
}

/// Flat storage of (N_p + 1) points in R^d; point i occupies [i*d, (i+1)*d).
class UnitLoop {
 public:
  UnitLoop() = default;

  UnitLoop(std::size_t n_points, int dim) { reset(n_points, dim); }

  void reset(std::size_t n_points, int dim) {
    detail::require(n_points >= 1, ErrorCode::InvalidPointCount, "N_p must be >= 1");
    detail::require(dim >= 1, ErrorCode::InvalidArgument, "dimension must be >= 1");
    n_points_ = n_points;
    dim_ = dim;
    data_.assign((n_points + 1) * static_cast<std::size_t>(dim), 0.0);
  }

  std::size_t n_points() const noexcept { return n_points_; }
  int dim() const noexcept { return dim_; }

  std::span<const double> point(std::size_t i) const noexcept {
    return {data_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  std::span<double> point(std::size_t i) noexcept {
    return {data_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  friend bool operator==(const UnitLoop&, const UnitLoop&) = default;

 private:
  std::size_t n_points_ = 0;
  int dim_ = 0;
  std::vector<double> data_;
};

template <class S>
concept NormalSource = requires(S& s) {
  { s() } -> std::convertible_to<double>;
};

// Each generator writes into `loop`, which must already be sized; endpoints
// are forced to exact zeros. Draw order is point-major, component-minor.

/// Dirichlet vloop: diagonalisation in velocity space.
template <NormalSource Source>
void fill_vloop(UnitLoop& loop, Source& omega) {
  const std::size_t np = loop.n_points();
  const int d = loop.dim();
  const double n = static_cast<double>(np);
  auto q = loop.data();
  std::fill(q.begin(), q.end(), 0.0);
  if (np < 2) return;

  std::vector<double> vbar1(static_cast<std::size_t>(d));
  for (int c = 0; c < d; ++c) vbar1[c] = omega() / std::sqrt(n);

  // v_i is parked in q[i] until the final prefix sum; vsum holds v_{i,1}.
  std::vector<double> vsum(static_cast<std::size_t>(d), 0.0);
  for (std::size_t i = 2; i + 1 <= np; ++i) {
    const double fi = static_cast<double>(i);
    const double scale = std::sqrt(2.0 / n) * std::sqrt((n + 1.0 - fi) / (n + 2.0 - fi));
    const double back = 1.0 / (n + 2.0 - fi);
    for (int c = 0; c < d; ++c) {
      const double vbar = scale * omega();
      const double v = vbar - back * vsum[c];
      vsum[c] += v;
      q[i * d + c] = v;
    }
  }
  for (int c = 0; c < d; ++c) q[d + c] = vbar1[c] - 0.5 * vsum[c];
  for (std::size_t i = 2; i + 1 <= np; ++i)
    for (int c = 0; c < d; ++c) q[i * d + c] += q[(i - 1) * d + c];
  for (int c = 0; c < d; ++c) q[np * d + c] = 0.0;
}

/// yloop: diagonalisation directly on the positions.
template <NormalSource Source>
void fill_yloop(UnitLoop& loop, Source& omega) {
  const std::size_t np = loop.n_points();
  const int d = loop.dim();
  const double n = static_cast<double>(np);
  auto q = loop.data();
  std::fill(q.begin(), q.end(), 0.0);
  for (std::size_t i = 1; i + 1 <= np; ++i) {
    const double fi = static_cast<double>(i);
    const double ratio = (n - fi) / (n + 1.0 - fi);
    const double scale = std::sqrt(2.0 / n) * std::sqrt(ratio);
    for (int c = 0; c < d; ++c) {
      const double qbar = scale * omega();
      q[i * d + c] = qbar + ratio * q[(i - 1) * d + c];
    }
  }
}

/// LSOL: open Gaussian walk closed by a linear shift.
template <NormalSource Source>
void fill_lsol(UnitLoop& loop, Source& omega) {
  const std::size_t np = loop.n_points();
  const int d = loop.dim();
  const double n = static_cast<double>(np);
  const double step = std::sqrt(2.0 / n);
  auto q = loop.data();
  for (int c = 0; c < d; ++c) q[c] = 0.0;
  for (std::size_t i = 1; i <= np; ++i)
    for (int c = 0; c < d; ++c) q[i * d + c] = q[(i - 1) * d + c] + step * omega();
  for (int c = 0; c < d; ++c) {
    const double end = q[np * d + c];
    for (std::size_t i = 1; i < np; ++i) q[i * d + c] -= (static_cast<double>(i) / n) * end;
    q[np * d + c] = 0.0;
  }
}

template <NormalSource Source>
void fill_loop(LoopAlgorithm algorithm, UnitLoop& loop, Source& omega) {
  switch (algorithm) {
    case LoopAlgorithm::VLoop: fill_vloop(loop, omega); return;
    case LoopAlgorithm::YLoop: fill_yloop(loop, omega); return;
    case LoopAlgorithm::Lsol: fill_lsol(loop, omega); return;
  }
}

template <NormalSource Source>
UnitLoop generate_vloop(std::size_t n_points, int dim, Source& omega) {
  UnitLoop loop(n_points, dim);
  fill_vloop(loop, omega);
  return loop;
}

template <NormalSource Source>
UnitLoop generate_yloop(std::size_t n_points, int dim, Source& omega) {
  UnitLoop loop(n_points, dim);
  fill_yloop(loop, omega);
  return loop;
}

template <NormalSource Source>
UnitLoop generate_lsol(std::size_t n_points, int dim, Source& omega) {
  UnitLoop loop(n_points, dim);
  fill_lsol(loop, omega);
  return loop;
}

/// Everything needed to regenerate an ensemble bit-identically.
struct EnsembleSpec {
  LoopAlgorithm algorithm = LoopAlgorithm::Lsol;
  std::size_t n_loops = 0;
  std::size_t n_points = 0;
  int dim = 1;
  std::uint64_t seed = 0;

  friend bool operator==(const EnsembleSpec&, const EnsembleSpec&) = default;
};

inline void validate(const EnsembleSpec& spec) {
  detail::require(spec.n_loops >= 1, ErrorCode::EmptyEnsemble, "N_l must be >= 1");
  detail::require(spec.n_points >= 1, ErrorCode::InvalidPointCount, "N_p must be >= 1");
  detail::require(spec.dim >= 1, ErrorCode::InvalidArgument, "dimension must be >= 1");
}

/// Loop k of the ensemble described by `spec`, written into `loop`.
inline void fill_member(const EnsembleSpec& spec, std::size_t k, UnitLoop& loop) {
  if (loop.n_points() != spec.n_points || loop.dim() != spec.dim) loop.reset(spec.n_points, spec.dim);
  NormalStream rng(derive_seed(spec.seed, {static_cast<std::uint64_t>(k)}));
  fill_loop(spec.algorithm, loop, rng);
}

/// Ensemble whose loops are regenerated on demand; O(1) memory.
class LazyEnsemble {
 public:
  explicit LazyEnsemble(EnsembleSpec spec) : spec_(spec) { validate(spec_); }

  const EnsembleSpec& spec() const noexcept { return spec_; }
  std::size_t size() const noexcept { return spec_.n_loops; }

  const UnitLoop& loop(std::size_t k, UnitLoop& scratch) const {
    fill_member(spec_, k, scratch);
    return scratch;
  }

 private:
  EnsembleSpec spec_;
};

/// Materialised ensemble; immutable once built.
class LoopEnsemble {
 public:
  LoopEnsemble(EnsembleSpec spec, std::vector<UnitLoop> loops)
      : spec_(spec), loops_(std::move(loops)) {}

  const EnsembleSpec& spec() const noexcept { return spec_; }
  std::size_t size() const noexcept { return loops_.size(); }

  const UnitLoop& operator[](std::size_t k) const noexcept { return loops_[k]; }
  const UnitLoop& loop(std::size_t k, UnitLoop& /*scratch*/) const noexcept { return loops_[k]; }

  auto begin() const noexcept { return loops_.begin(); }
  auto end() const noexcept { return loops_.end(); }

  friend bool operator==(const LoopEnsemble&, const LoopEnsemble&) = default;

 private:
  EnsembleSpec spec_;
  std::vector<UnitLoop> loops_;
};

template <class E>
concept LoopSource = requires(const E& e, std::size_t k, UnitLoop& scratch) {
  { e.spec() } -> std::convertible_to<const EnsembleSpec&>;
  { e.size() } -> std::convertible_to<std::size_t>;
  { e.loop(k, scratch) } -> std::convertible_to<const UnitLoop&>;
};

inline LoopEnsemble generate_ensemble(const EnsembleSpec& spec, Execution exec = {}) {
  validate(spec);
  std::vector<UnitLoop> loops;
  try {
    loops.resize(spec.n_loops);
  } catch (const std::bad_alloc&) {
    throw Error(ErrorCode::AllocationFailure, "cannot allocate ensemble storage");
  } catch (const std::length_error&) {
    throw Error(ErrorCode::AllocationFailure, "ensemble size exceeds addressable storage");
  }
  parallel_blocks(spec.n_loops, exec, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      try {
        fill_member(spec, k, loops[k]);
      } catch (const std::bad_alloc&) {
        throw Error(ErrorCode::AllocationFailure, "cannot allocate loop storage");
      }
    }
  });
  return LoopEnsemble(spec, std::move(loops));
}

inline LoopEnsemble generate_ensemble(LoopAlgorithm algorithm, std::size_t n_loops,
                                      std::size_t n_points, int dim, std::uint64_t seed,
                                      Execution exec = {}) {
  return generate_ensemble(EnsembleSpec{algorithm, n_loops, n_points, dim, seed}, exec);
}

/// y + (x - y) i/N_p + sqrt(t/m) q_i, written into `out` (size d).
inline void scale_point_into(const UnitLoop& loop, std::size_t i, std::span<const double> y,
                             std::span<const double> x, double t, double m, std::span<double> out) {
  const double u = static_cast<double>(i) / static_cast<double>(loop.n_points());
  const double s = std::sqrt(t / m);
  auto q = loop.point(i);
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = y[c] + (x[c] - y[c]) * u + s * q[c];
}

inline std::vector<double> scale_point(const UnitLoop& loop, std::size_t i,
                                       std::span<const double> y, std::span<const double> x,
                                       double t, double m) {
  detail::require(t > 0.0 && m > 0.0, ErrorCode::NonPositiveScale, "t and m must be positive");
  detail::require(i <= loop.n_points(), ErrorCode::InvalidArgument, "point index out of range");
  detail::require(y.size() == static_cast<std::size_t>(loop.dim()) && x.size() == y.size(),
                  ErrorCode::DimensionMismatch, "endpoint dimension differs from loop dimension");
  std::vector<double> out(y.size());
  if (i == 0) {
    out.assign(y.begin(), y.end());
  } else if (i == loop.n_points()) {
    out.assign(x.begin(), x.end());
  } else {
    scale_point_into(loop, i, y, x, t, m, out);
  }
  return out;
}

/// All N_p + 1 physical positions of the scaled path, flat like UnitLoop.
/// Endpoints are copied exactly from y and x. `fluctuation_sign` = -1 uses -q.
inline void scale_path_into(const UnitLoop& loop, std::span<const double> y,
                            std::span<const double> x, double t, double m,
                            std::vector<double>& out, double fluctuation_sign = 1.0) {
  const std::size_t np = loop.n_points();
  const std::size_t d = static_cast<std::size_t>(loop.dim());
  out.resize((np + 1) * d);
  const double s = fluctuation_sign * std::sqrt(t / m);
  const double n = static_cast<double>(np);
  auto q = loop.data();
  for (std::size_t c = 0; c < d; ++c) out[c] = y[c];
  for (std::size_t i = 1; i < np; ++i) {
    const double u = static_cast<double>(i) / n;
    for (std::size_t c = 0; c < d; ++c)
      out[i * d + c] = y[c] + (x[c] - y[c]) * u + s * q[i * d + c];
  }
  for (std::size_t c = 0; c < d; ++c) out[np * d + c] = x[c];
}

}  // namespace wlmc

#endif  // WLMC_LOOPS_HPP
