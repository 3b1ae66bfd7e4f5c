#include "tsir/timescale.hpp"

#include <algorithm>
#include <cmath>

#include "tsir/errors.hpp"
#include "tsir/number_format.hpp"

namespace tsir {

namespace {

double node_tolerance(double t) { return kMembershipTolerance * std::max(1.0, std::abs(t)); }

std::string describe(Time t) { return format_shortest(t); }

}  // namespace

TimeScale TimeScale::canonicalize(std::vector<Segment> raw) {
  if (raw.empty()) throw Error(Errc::DomainEmpty, "time scale has no segments");
  for (const auto& s : raw) {
    if (!std::isfinite(s.lo) || !std::isfinite(s.hi))
      throw Error(Errc::InvalidEndpoint, "segment endpoints must be finite");
    if (s.lo > s.hi)
      throw Error(Errc::InvalidEndpoint, "interval [" + describe(s.lo) + "," + describe(s.hi) + "] has lo > hi");
  }
  std::sort(raw.begin(), raw.end(), [](const Segment& a, const Segment& b) {
    return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
  });

  std::vector<Segment> merged;
  Segment cur = raw.front();
  for (std::size_t i = 1; i < raw.size(); ++i) {
    const Segment& next = raw[i];
    if (next.lo <= cur.hi + node_tolerance(cur.hi)) {
      cur.hi = std::max(cur.hi, next.hi);
    } else {
      merged.push_back(cur);
      cur = next;
    }
  }
  merged.push_back(cur);

  for (std::size_t i = 1; i < merged.size(); ++i) {
    if (merged[i].lo - merged[i - 1].hi < kMinSegmentGap)
      throw Error(Errc::AccumulationPoint,
                  "segments closer than the minimum gap near t=" + describe(merged[i].lo), merged[i].lo);
  }
  return TimeScale(std::move(merged));
}

std::size_t TimeScale::locate(Time t) const {
  if (!std::isfinite(t)) throw Error(Errc::NotInDomain, "time is not finite");
  const double tol = node_tolerance(t);
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t + tol,
                             [](double v, const Segment& s) { return v < s.lo; });
  if (it != segments_.begin()) {
    auto idx = static_cast<std::size_t>(it - segments_.begin()) - 1;
    if (t <= segments_[idx].hi + tol) return idx;
  }
  throw Error(Errc::NotInDomain, "t=" + describe(t) + " is not in the time scale", t);
}

bool TimeScale::contains(Time t) const {
  try {
    locate(t);
    return true;
  } catch (const Error&) {
    return false;
  }
}

Time TimeScale::snap(Time t) const {
  const Segment& s = segments_[locate(t)];
  return std::clamp(t, s.lo, s.hi);
}

bool TimeScale::is_integer_range() const {
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const Segment& s = segments_[i];
    if (!s.is_point() || std::floor(s.lo) != s.lo) return false;
    if (i > 0 && s.lo - segments_[i - 1].lo != 1.0) return false;
  }
  return true;
}

Time sigma(const TimeScale& ts, Time t) {
  const std::size_t idx = ts.locate(t);
  const Segment& s = ts.segments()[idx];
  const Time snapped = std::clamp(t, s.lo, s.hi);
  if (snapped < s.hi) return snapped;
  if (idx + 1 < ts.segments().size()) return ts.segments()[idx + 1].lo;
  return snapped;
}

Duration mu(const TimeScale& ts, Time t) { return sigma(ts, t) - ts.snap(t); }

GridPoint grid_point(const TimeScale& ts, Time t) {
  const Time snapped = ts.snap(t);
  const Time next = sigma(ts, snapped);
  GridPoint gp{snapped, next, next - snapped, PointKind::RightDense};
  if (next > snapped)
    gp.kind = PointKind::RightScattered;
  else if (snapped == ts.max())
    gp.kind = PointKind::Max;
  return gp;
}

std::vector<GridPoint> grid(const TimeScale& ts, Time t0, Time t1, Duration h) {
  if (!(h > 0) || !std::isfinite(h)) throw Error(Errc::InvalidArgument, "grid step must be positive and finite");
  const std::size_t first = ts.locate(t0);
  const std::size_t last = ts.locate(t1);
  t0 = ts.snap(t0);
  t1 = ts.snap(t1);
  if (t0 > t1) throw Error(Errc::InvalidArgument, "grid requires t0 <= t1");

  std::vector<GridPoint> out;
  for (std::size_t i = first; i <= last; ++i) {
    const Segment& seg = ts.segments()[i];
    const Time a = std::max(seg.lo, t0);
    const Time b = std::min(seg.hi, t1);
    out.push_back(grid_point(ts, a));
    if (a == b) continue;

    const double ratio = (seg.hi - seg.lo) / h;
    const auto n = std::max<long>(1, static_cast<long>(std::ceil(ratio - 1e-9)));
    const double w = (seg.hi - seg.lo) / static_cast<double>(n);
    auto k = static_cast<long>(std::floor((a - seg.lo) / w)) + 1;
    for (; k < n; ++k) {
      const Time node = seg.lo + static_cast<double>(k) * w;
      if (node <= a + node_tolerance(a)) continue;
      if (node >= b - node_tolerance(b)) break;
      out.push_back({node, node, 0.0, PointKind::RightDense});
    }
    out.push_back(b == seg.hi ? grid_point(ts, b) : GridPoint{b, b, 0.0, PointKind::RightDense});
  }
  return out;
}

double delta_integral(const TimeScale& ts, const ScalarFn& f, Time a, Time b, Duration h) {
  if (ts.snap(a) > ts.snap(b)) throw Error(Errc::InvalidArgument, "delta_integral requires a <= b");
  const auto g = grid(ts, a, b, h);
  double sum = 0;
  for (std::size_t k = 0; k + 1 < g.size(); ++k) {
    if (g[k].kind == PointKind::RightScattered)
      sum += f(g[k].t) * g[k].mu_t;
    else
      sum += dense_simpson(f, g[k].t, g[k + 1].t);
  }
  return sum;
}

namespace {

std::string_view trim(std::string_view s, std::size_t& offset) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
    ++offset;
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double number_at(std::string_view text, std::size_t col) {
  double v = 0;
  std::size_t off = 0;
  auto t = trim(text, off);
  if (!parse_number(t, v)) throw ParseError(1, static_cast<int>(col + off + 1), "expected a number, got '" + std::string(t) + "'");
  return v;
}

}  // namespace

TimeScale parse_timescale(std::string_view literal) {
  std::vector<Segment> raw;
  std::size_t start = 0;
  int depth = 0;
  for (std::size_t i = 0; i <= literal.size(); ++i) {
    const char ch = i < literal.size() ? literal[i] : ',';
    if (ch == '[') ++depth;
    if (ch == ']') --depth;
    if (ch != ',' || depth > 0) continue;

    std::size_t col = start;
    auto token = trim(literal.substr(start, i - start), col);
    start = i + 1;
    if (token.empty()) throw ParseError(1, static_cast<int>(col + 1), "empty time scale segment");

    if (token.front() == '[') {
      if (token.back() != ']') throw ParseError(1, static_cast<int>(col + token.size()), "missing ']'");
      auto body = token.substr(1, token.size() - 2);
      auto comma = body.find(',');
      if (comma == std::string_view::npos) throw ParseError(1, static_cast<int>(col + 1), "interval needs 'lo,hi'");
      const double lo = number_at(body.substr(0, comma), col + 1);
      const double hi = number_at(body.substr(comma + 1), col + 2 + comma);
      if (!(lo <= hi)) throw ParseError(1, static_cast<int>(col + 1), "interval has lo > hi");
      raw.push_back(Segment::interval(lo, hi));
    } else if (auto dots = token.find(".."); dots != std::string_view::npos) {
      const double lo = number_at(token.substr(0, dots), col);
      const double hi = number_at(token.substr(dots + 2), col + dots + 2);
      if (std::floor(lo) != lo || std::floor(hi) != hi || lo > hi)
        throw ParseError(1, static_cast<int>(col + 1), "'lo..hi' needs integers with lo <= hi");
      for (double t = lo; t <= hi; t += 1.0) raw.push_back(Segment::point(t));
    } else {
      raw.push_back(Segment::point(number_at(token, col)));
    }
  }
  if (depth != 0) throw ParseError(1, static_cast<int>(literal.size()), "unbalanced brackets");
  return TimeScale::canonicalize(std::move(raw));
}

std::string format_timescale(const TimeScale& ts) {
  std::string out;
  const auto& segs = ts.segments();
  auto is_int_point = [&](std::size_t i) { return segs[i].is_point() && std::floor(segs[i].lo) == segs[i].lo; };
  for (std::size_t i = 0; i < segs.size();) {
    if (!out.empty()) out += ", ";
    if (!segs[i].is_point()) {
      out += "[" + format_shortest(segs[i].lo) + "," + format_shortest(segs[i].hi) + "]";
      ++i;
      continue;
    }
    std::size_t j = i;
    if (is_int_point(i)) {
      while (j + 1 < segs.size() && is_int_point(j + 1) && segs[j + 1].lo - segs[j].lo == 1.0) ++j;
    }
    if (j > i)
      out += format_shortest(segs[i].lo) + ".." + format_shortest(segs[j].lo);
    else
      out += format_shortest(segs[i].lo);
    i = j + 1;
  }
  return out;
}

}  // namespace tsir
