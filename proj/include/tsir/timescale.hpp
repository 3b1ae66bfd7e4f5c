#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace tsir {

using Time = double;
using Duration = double;
using ScalarFn = std::function<double(Time)>;

/// Query times within this distance of the domain are snapped onto it.
inline constexpr double kMembershipTolerance = 1e-12;
/// Minimum gap between distinct segments of a canonical time scale.
inline constexpr double kMinSegmentGap = 1e-9;
/// Default quadrature / grid step on continuous segments.
inline constexpr Duration kDefaultStep = 1e-3;

/// A closed interval [lo, hi]; lo == hi denotes an isolated point.
struct Segment {
  Time lo = 0;
  Time hi = 0;

  static Segment interval(Time lo, Time hi) { return {lo, hi}; }
  static Segment point(Time t) { return {t, t}; }

  bool is_point() const { return lo == hi; }
  friend bool operator==(const Segment&, const Segment&) = default;
};

enum class PointKind { RightDense, RightScattered, Max };

struct GridPoint {
  Time t = 0;
  Time sigma_t = 0;
  Duration mu_t = 0;
  PointKind kind = PointKind::RightDense;
};

/// Hybrid time domain: a finite, ordered, pairwise-disjoint union of closed
/// intervals and isolated points. Immutable once built.
class TimeScale {
public:
  /// Sorts, merges touching/overlapping pieces, absorbs points lying in
  /// intervals and collapses degenerate intervals.
  static TimeScale canonicalize(std::vector<Segment> raw);

  const std::vector<Segment>& segments() const { return segments_; }
  Time min() const { return segments_.front().lo; }
  Time max() const { return segments_.back().hi; }

  bool contains(Time t) const;
  /// Index of the segment holding t; throws NotInDomain.
  std::size_t locate(Time t) const;
  /// t snapped onto the domain (within kMembershipTolerance); throws NotInDomain.
  Time snap(Time t) const;

  /// True when every segment is an integer point and neighbours are 1 apart.
  bool is_integer_range() const;
  bool is_single_interval() const { return segments_.size() == 1 && !segments_.front().is_point(); }

  friend bool operator==(const TimeScale&, const TimeScale&) = default;

private:
  explicit TimeScale(std::vector<Segment> segments) : segments_(std::move(segments)) {}
  std::vector<Segment> segments_;
};

Time sigma(const TimeScale& ts, Time t);
Duration mu(const TimeScale& ts, Time t);
GridPoint grid_point(const TimeScale& ts, Time t);

/// All scattered points of ts in [t0, t1] plus every interval sampled on the
/// lattice lo + k (hi - lo) / n, n = ceil((hi - lo) / h), clipped to [t0, t1].
std::vector<GridPoint> grid(const TimeScale& ts, Time t0, Time t1, Duration h);

/// Simpson's rule on one panel, using the panel midpoint.
template <class F>
double simpson(const F& f, double a, double b) {
  return (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
}

/// Simpson on a panel of the continuous part. The right endpoint is sampled
/// one ulp inside the panel: an integrand built from the local graininess
/// (p (+) q, say) then sees its left limit at the end of an interval, where
/// mu jumps to the gap size.
template <class F>
double dense_simpson(const F& f, double a, double b) {
  const double b_in = b > a ? std::nextafter(b, a) : b;
  return (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b_in));
}

/// Delta integral over [a, b]: mu-weighted sum at right-scattered points plus
/// dense_simpson on the continuous panels of the grid.
double delta_integral(const TimeScale& ts, const ScalarFn& f, Time a, Time b, Duration h = kDefaultStep);

/// Literal syntax: comma-separated `[lo,hi]`, `lo..hi` (integer points) or a bare point.
TimeScale parse_timescale(std::string_view literal);
std::string format_timescale(const TimeScale& ts);

}  // namespace tsir
