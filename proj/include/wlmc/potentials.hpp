/**
 * @file potentials.hpp
 * @brief Potentials and the line integral v = \int_0^1 du V(x(u)) along a
 *        discretised trajectory, including the smoothing rules for 1/r
 *        singularities and the crossing rule for a delta well.
 *
 * Sign convention: v is the plain line integral (negative for attractive
 * potentials); the Monte Carlo weight is always W = exp(-t v).
 */
#ifndef WLMC_POTENTIALS_HPP
#define WLMC_POTENTIALS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <type_traits>
#include <variant>

#include "wlmc/errors.hpp"

namespace wlmc {

struct Free {};

/// V = m omega^2 |x|^2 / 2
struct Harmonic {
  double m = 1.0;
  double omega = 1.0;
};

/// V = -(a^2 / 2m) nu (nu + 1) / cosh^2(a x), one-dimensional.
struct PoschlTeller {
  double a = 1.0;
  int nu = 1;
  double m = 1.0;
};

/// V = -g delta(x), g > 0, one-dimensional.
struct DeltaWell {
  double g = 1.0;
};

/// V = -alpha / r
struct Coulomb {
  double alpha = 1.0;
};

/// V = -alpha exp(-mu r) / r
struct Yukawa {
  double alpha = 1.0;
  double mu = 0.0;
};

using PotentialSpec = std::variant<Free, Harmonic, PoschlTeller, DeltaWell, Coulomb, Yukawa>;

/// Critical Yukawa screening (approximate), in units of alpha * m.
inline constexpr double kYukawaCriticalScreening = 1.19;

inline std::string potential_name(const PotentialSpec& p) {
  constexpr const char* names[] = {"free", "harmonic", "poschl-teller", "delta", "coulomb", "yukawa"};
  return names[p.index()];
}

inline void validate(const PotentialSpec& p) {
  std::visit(
      [](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Harmonic>) {
          detail::require(v.m > 0 && v.omega > 0, ErrorCode::InvalidArgument,
                          "harmonic: m and omega must be positive");
        } else if constexpr (std::is_same_v<T, PoschlTeller>) {
          detail::require(v.a > 0 && v.m > 0 && v.nu >= 1, ErrorCode::InvalidArgument,
                          "poschl-teller: a, m positive and nu a positive integer");
        } else if constexpr (std::is_same_v<T, DeltaWell>) {
          detail::require(v.g > 0, ErrorCode::InvalidArgument, "delta: g must be positive");
        } else if constexpr (std::is_same_v<T, Coulomb>) {
          detail::require(v.alpha > 0, ErrorCode::InvalidArgument, "coulomb: alpha must be positive");
        } else if constexpr (std::is_same_v<T, Yukawa>) {
          detail::require(v.alpha > 0 && v.mu >= 0, ErrorCode::InvalidArgument,
                          "yukawa: alpha > 0 and mu >= 0 required");
        }
      },
      p);
}

/// True for potentials symmetric under x -> -x.
inline bool is_parity_even(const PotentialSpec& p) {
  return std::holds_alternative<Free>(p) || std::holds_alternative<Harmonic>(p) ||
         std::holds_alternative<PoschlTeller>(p) || std::holds_alternative<DeltaWell>(p);
}

namespace detail {

inline double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double c : x) s += c * c;
  return s;
}

inline double radius_checked(std::span<const double> x) {
  const double r = std::sqrt(norm2(x));
  require(r > 0.0, ErrorCode::SingularPoint, "potential evaluated at its singularity r = 0");
  return r;
}

inline double eval_one(const Free&, std::span<const double>) { return 0.0; }
inline double eval_one(const Harmonic& h, std::span<const double> x) {
  return 0.5 * h.m * h.omega * h.omega * norm2(x);
}
inline double eval_one(const PoschlTeller& p, std::span<const double> x) {
  const double c = std::cosh(p.a * x[0]);
  return -(p.a * p.a / (2.0 * p.m)) * p.nu * (p.nu + 1.0) / (c * c);
}
inline double eval_one(const DeltaWell&, std::span<const double>) {
  throw Error(ErrorCode::DeltaPointwise, "the delta well has no pointwise value; use CrossingCount");
}
inline double eval_one(const Coulomb& c, std::span<const double> x) { return -c.alpha / radius_checked(x); }
inline double eval_one(const Yukawa& y, std::span<const double> x) {
  const double r = radius_checked(x);
  return -y.alpha * std::exp(-y.mu * r) / r;
}

}  // namespace detail

/// V(position).
inline double eval(const PotentialSpec& p, std::span<const double> position) {
  return std::visit([&](const auto& v) { return detail::eval_one(v, position); }, p);
}

// ---------------------------------------------------------------------------
// Line-integral methods

struct Pointwise {};
/// Exact line average of 1/r over each segment (Coulomb only).
struct SmoothedAnalytic {};
/// Midpoint-rule line average over each segment (Yukawa; Coulomb for checks).
struct SmoothedNumeric {
  int n_sub = 4;
};
/// Origin-crossing rule for the delta well (d = 1).
struct CrossingCount {};

using LineIntegralMethod = std::variant<Pointwise, SmoothedAnalytic, SmoothedNumeric, CrossingCount>;

inline std::string method_name(const LineIntegralMethod& m) {
  constexpr const char* names[] = {"pointwise", "smoothed-analytic", "smoothed-numeric", "crossing-count"};
  return names[m.index()];
}

/// Segments shorter than this fall back to the pointwise value.
inline constexpr double kDegenerateSegment = 1e-12;

inline void check_method(const PotentialSpec& p, const LineIntegralMethod& method, int dim) {
  const bool delta = std::holds_alternative<DeltaWell>(p);
  if (std::holds_alternative<SmoothedAnalytic>(method)) {
    detail::require(std::holds_alternative<Coulomb>(p), ErrorCode::MethodMismatch,
                    "smoothed-analytic applies to the Coulomb potential only");
  } else if (const auto* n = std::get_if<SmoothedNumeric>(&method)) {
    detail::require(std::holds_alternative<Yukawa>(p) || std::holds_alternative<Coulomb>(p),
                    ErrorCode::MethodMismatch, "smoothed-numeric applies to Yukawa or Coulomb only");
    detail::require(n->n_sub >= 1, ErrorCode::InvalidArgument, "n_sub must be >= 1");
  } else if (std::holds_alternative<CrossingCount>(method)) {
    detail::require(delta, ErrorCode::MethodMismatch, "crossing-count applies to the delta well only");
    detail::require(dim == 1, ErrorCode::DimensionMismatch, "crossing-count requires d = 1");
  } else if (delta) {
    throw Error(ErrorCode::DeltaPointwise, "the delta well requires the crossing-count method");
  }
  if (std::holds_alternative<PoschlTeller>(p))
    detail::require(dim == 1, ErrorCode::DimensionMismatch, "poschl-teller is one-dimensional");
}

/// Result of a smoothed segment average; `degenerate` marks the pointwise fallback.
struct SegmentAverage {
  double value = 0.0;
  bool degenerate = false;
};

namespace detail {

/// Geometry of the segment a + b l, l in [0,1], relative to the origin:
/// p = a.b/|b| (signed start coordinate along the segment) and h, the
/// distance of the carrier line from the origin.
struct SegmentGeometry {
  double length;
  double p;
  double h;
  double r_prev;
  double r_cur;
};

inline SegmentGeometry segment_geometry(std::span<const double> prev, std::span<const double> cur) {
  double bb = 0.0, ab = 0.0;
  for (std::size_t c = 0; c < prev.size(); ++c) {
    const double b = cur[c] - prev[c];
    bb += b * b;
    ab += prev[c] * b;
  }
  SegmentGeometry g{};
  g.length = std::sqrt(bb);
  g.r_prev = std::sqrt(norm2(prev));
  g.r_cur = std::sqrt(norm2(cur));
  if (g.length == 0.0) return g;
  g.p = ab / g.length;
  double hh = 0.0;
  for (std::size_t c = 0; c < prev.size(); ++c) {
    const double perp = prev[c] - g.p * (cur[c] - prev[c]) / g.length;
    hh += perp * perp;
  }
  g.h = std::sqrt(hh);
  return g;
}

/// \int_0^1 dl / |a + b l| evaluated without cancellation.
inline double inverse_distance_average(const SegmentGeometry& g) {
  const double p0 = g.p;
  const double p1 = g.p + g.length;
  if (p0 >= 0.0) return std::log((p1 + g.r_cur) / (p0 + g.r_prev)) / g.length;
  if (p1 <= 0.0) return std::log((g.r_prev - p0) / (g.r_cur - p1)) / g.length;
  // Closest approach lies inside the segment.
  require(g.h > 0.0, ErrorCode::LogarithmicSingularity, "segment passes through the singularity");
  return (std::asinh(p1 / g.h) + std::asinh(-p0 / g.h)) / g.length;
}

inline bool crosses_origin_exactly(const SegmentGeometry& g) {
  return g.h == 0.0 && g.p < 0.0 && g.p + g.length > 0.0;
}

}  // namespace detail

/// Line average of -alpha/r over the straight segment prev -> cur.
inline SegmentAverage segment_smoothed_coulomb(std::span<const double> prev, std::span<const double> cur,
                                               double alpha) {
  const auto g = detail::segment_geometry(prev, cur);
  if (g.length < kDegenerateSegment) {
    detail::require(g.r_cur > 0.0, ErrorCode::SingularPoint, "degenerate segment at the singularity");
    return {-alpha / g.r_cur, true};
  }
  detail::require(g.r_prev > 0.0 && g.r_cur > 0.0, ErrorCode::SingularPoint,
                  "segment endpoint at the singularity");
  return {-alpha * detail::inverse_distance_average(g), false};
}

/// Midpoint-rule line average of -alpha exp(-mu r)/r over prev -> cur.
inline SegmentAverage segment_smoothed_yukawa(std::span<const double> prev, std::span<const double> cur,
                                              double alpha, double mu, int n_sub) {
  detail::require(n_sub >= 1, ErrorCode::InvalidArgument, "n_sub must be >= 1");
  const auto g = detail::segment_geometry(prev, cur);
  if (g.length < kDegenerateSegment) {
    detail::require(g.r_cur > 0.0, ErrorCode::SingularPoint, "degenerate segment at the singularity");
    return {-alpha * std::exp(-mu * g.r_cur) / g.r_cur, true};
  }
  detail::require(g.r_prev > 0.0 && g.r_cur > 0.0, ErrorCode::SingularPoint,
                  "segment endpoint at the singularity");
  detail::require(!detail::crosses_origin_exactly(g), ErrorCode::LogarithmicSingularity,
                  "segment passes through the singularity");
  // |a + b l|^2 = r_prev^2 + 2 p L l + L^2 l^2
  const double a2 = g.r_prev * g.r_prev;
  const double two_pl = 2.0 * g.p * g.length;
  const double l2 = g.length * g.length;
  double sum = 0.0;
  for (int j = 0; j < n_sub; ++j) {
    const double l = (j + 0.5) / n_sub;
    const double r = std::sqrt(std::max(a2 + two_pl * l + l2 * l * l, g.h * g.h));
    detail::require(r > 0.0, ErrorCode::SingularPoint, "quadrature node at the singularity");
    sum += std::exp(-mu * r) / r;
  }
  return {-alpha * sum / n_sub, false};
}

struct LineIntegralResult {
  double v = 0.0;
  std::size_t n_singular_events = 0;
};

/// Crossing rule for V = -g delta(x) on a 1-d path of N_p + 1 points.
///
/// Each sign change between x_{i-1} and x_i contributes -g / (N_p |x_i - x_{i-1}|),
/// i.e. 1/|dx/du| with a backwards difference. An interior point that is
/// exactly zero counts once, through the segment that reaches it; endpoints
/// sitting at the origin are not crossings.
inline LineIntegralResult delta_crossings(std::span<const double> path, double g) {
  detail::require(path.size() >= 3, ErrorCode::InvalidPointCount, "delta crossing rule needs N_p >= 2");
  const std::size_t np = path.size() - 1;
  const double inv_np = 1.0 / static_cast<double>(np);
  LineIntegralResult out;
  for (std::size_t i = 1; i <= np; ++i) {
    const double a = path[i - 1];
    const double b = path[i];
    const bool strict = (a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0);
    const bool lands_on_zero = (i < np && b == 0.0 && a != 0.0);
    if (!strict && !lands_on_zero) continue;
    const double contribution = inv_np / std::abs(b - a);
    detail::require(std::isfinite(contribution), ErrorCode::DegenerateCrossing,
                    "zero-length segment at an origin crossing");
    out.v -= g * contribution;
    if (lands_on_zero) ++out.n_singular_events;
  }
  return out;
}

namespace detail {

template <class Pot>
LineIntegralResult pointwise_sum(const Pot& pot, std::span<const double> path, std::size_t d) {
  const std::size_t np = path.size() / d - 1;
  double sum = 0.0;
  for (std::size_t i = 1; i <= np; ++i) sum += eval_one(pot, path.subspan(i * d, d));
  return {sum / static_cast<double>(np), 0};
}

template <class SegmentFn>
LineIntegralResult segment_sum(std::span<const double> path, std::size_t d, SegmentFn&& seg) {
  const std::size_t np = path.size() / d - 1;
  LineIntegralResult out;
  double sum = 0.0;
  for (std::size_t i = 1; i <= np; ++i) {
    const SegmentAverage s = seg(path.subspan((i - 1) * d, d), path.subspan(i * d, d));
    sum += s.value;
    if (s.degenerate) ++out.n_singular_events;
  }
  out.v = sum / static_cast<double>(np);
  return out;
}

}  // namespace detail

/// v = \int_0^1 du V(x(u)) for a path of N_p + 1 points in R^dim (flat layout).
inline LineIntegralResult line_integral(const PotentialSpec& potential, std::span<const double> path,
                                        int dim, const LineIntegralMethod& method) {
  detail::require(dim >= 1 && path.size() % static_cast<std::size_t>(dim) == 0 &&
                      path.size() / static_cast<std::size_t>(dim) >= 2,
                  ErrorCode::InvalidPointCount, "path must hold N_p + 1 >= 2 points");
  check_method(potential, method, dim);
  const std::size_t d = static_cast<std::size_t>(dim);

  if (std::holds_alternative<CrossingCount>(method))
    return delta_crossings(path, std::get<DeltaWell>(potential).g);

  if (std::holds_alternative<SmoothedAnalytic>(method)) {
    const double alpha = std::get<Coulomb>(potential).alpha;
    return detail::segment_sum(path, d, [alpha](auto a, auto b) { return segment_smoothed_coulomb(a, b, alpha); });
  }
  if (const auto* numeric = std::get_if<SmoothedNumeric>(&method)) {
    double alpha = 0.0, mu = 0.0;
    if (const auto* y = std::get_if<Yukawa>(&potential)) {
      alpha = y->alpha;
      mu = y->mu;
    } else {
      alpha = std::get<Coulomb>(potential).alpha;
    }
    const int n_sub = numeric->n_sub;
    return detail::segment_sum(
        path, d, [=](auto a, auto b) { return segment_smoothed_yukawa(a, b, alpha, mu, n_sub); });
  }
  return std::visit([&](const auto& pot) { return detail::pointwise_sum(pot, path, d); }, potential);
}

}  // namespace wlmc

#endif  // WLMC_POTENTIALS_HPP
