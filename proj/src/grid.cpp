#include "herglotz/grid.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "herglotz/error.hpp"

namespace herglotz {

namespace {

// shortest segment allowed, in intervals (7 nodes, the stencil minimum)
constexpr int kMinSegment = 6;

bool aligned(double a, double b, double tau, int M, int* p) {
  const double steps = tau * M / (b - a);
  const double r = std::round(steps);
  if (std::abs(steps - r) > 1e-9 * std::max(1.0, steps)) return false;
  *p = static_cast<int>(r);
  return true;
}

}  // namespace

Grid::Grid(double a, double b, int M, int p) : a_(a), b_(b), h_((b - a) / M), M_(M), p_(p) {
  if (p_ > 0) {
    // the junction b - tau always survives; other breaks give way when too close.
    // tau = b - a puts the junction on a and leaves no interior break.
    std::vector<int> candidates;
    for (int k = 1; k * p_ < M_; ++k) {
      candidates.push_back(k * p_);
      candidates.push_back(M_ - k * p_);
    }
    std::vector<int> kept;
    if (p_ < M_) kept.push_back(M_ - p_);
    for (int c : candidates) {
      if (c < kMinSegment || c > M_ - kMinSegment) continue;
      bool clash = false;
      for (int k : kept) clash = clash || std::abs(k - c) < kMinSegment;
      if (!clash) kept.push_back(c);
    }
    std::sort(kept.begin(), kept.end());
    breaks_ = kept;
  }
  int start = 0;
  for (int br : breaks_) {
    segments_.push_back({start, br});
    start = br;
  }
  segments_.push_back({start, M_});
  segment_index_.resize(M_);
  for (std::size_t s = 0; s < segments_.size(); ++s)
    for (int i = segments_[s].first; i < segments_[s].last; ++i)
      segment_index_[i] = static_cast<int>(s);
}

Grid Grid::make(double a, double b, double tau, int target_intervals, int order) {
  if (!(b > a)) throw ValidationError("grid: need b > a");
  if (!(tau >= 0.0) || !(tau < b - a)) throw ValidationError("grid: need 0 <= tau < b - a");
  int lo = std::max(target_intervals, 10 * order);
  if (tau == 0.0) return Grid(a, b, lo, 0);
  const double r = tau / (b - a);
  // keep both delay segments long enough for the stencils
  lo = std::max({lo, static_cast<int>(std::ceil(kMinSegment / r)),
                 static_cast<int>(std::ceil(kMinSegment / (1.0 - r)))});
  for (int M = lo; M <= 4 * lo + 1000; ++M) {
    int p = 0;
    if (aligned(a, b, tau, M, &p) && p >= kMinSegment && M - p >= kMinSegment) return Grid(a, b, M, p);
  }
  throw ValidationError("grid: delay is not commensurate with any step near h = " +
                        std::to_string((b - a) / lo));
}

Grid Grid::with_intervals(double a, double b, double tau, int intervals) {
  if (!(b > a)) throw ValidationError("grid: need b > a");
  if (intervals < 1) throw ValidationError("grid: need at least one interval");
  if (tau == 0.0) return Grid(a, b, intervals, 0);
  int p = 0;
  if (!aligned(a, b, tau, intervals, &p) || p < 1 || p > intervals)
    throw ValidationError("grid: tau is not a whole number of steps for M = " +
                          std::to_string(intervals));
  return Grid(a, b, intervals, p);
}

bool Grid::is_break(int i) const noexcept {
  return std::binary_search(breaks_.begin(), breaks_.end(), i);
}

const Grid::Segment& Grid::segment_of_interval(int i) const {
  if (i < 0 || i >= M_) throw OutOfRange("interval index " + std::to_string(i) + " outside grid");
  return segments_[segment_index_[i]];
}

int Grid::distance_to_edge(int i) const {
  int d = std::min(i, M_ - i);
  for (int br : breaks_) d = std::min(d, std::abs(i - br));
  return d;
}

// ---- stencils ----

namespace {

void first_derivative(std::span<const double> f, double h, std::span<double> out) {
  const std::size_t n = f.size();
  const double c = 1.0 / (12.0 * h);
  out[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) * c;
  out[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) * c;
  for (std::size_t i = 2; i + 2 < n; ++i)
    out[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) * c;
  out[n - 2] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) * c;
  out[n - 1] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]) * c;
}

}  // namespace

std::vector<double> differentiate_series(std::span<const double> values, double h, int order) {
  if (values.size() < 7) throw GridTooSmall(values.size(), 7);
  std::vector<double> cur(values.begin(), values.end());
  std::vector<double> next(cur.size());
  for (int l = 0; l < order; ++l) {
    first_derivative(cur, h, next);
    cur.swap(next);
  }
  return cur;
}

std::vector<double> gather(const NodeSeries& s, const Grid::Segment& seg) {
  std::vector<double> v(static_cast<std::size_t>(seg.nodes()));
  v.front() = s.right(seg.first);
  for (int i = seg.first + 1; i < seg.last; ++i) v[i - seg.first] = s[i];
  v.back() = s.left(seg.last);
  return v;
}

void scatter(NodeSeries& s, const Grid::Segment& seg, std::span<const double> values) {
  s.set(seg.first, Side::right, values.front());
  for (int i = seg.first + 1; i < seg.last; ++i) s.set(i, values[i - seg.first]);
  s.set(seg.last, Side::left, values.back());
}

NodeSeries differentiate(const NodeSeries& values, const Grid& grid, int order) {
  NodeSeries out(values.size());
  for (const auto& seg : grid.segments()) {
    auto d = differentiate_series(gather(values, seg), grid.h(), order);
    scatter(out, seg, d);
  }
  // a and b carry a single value
  out.set(0, out.right(0));
  out.set(grid.intervals(), out.left(grid.intervals()));
  return out;
}

// ---- quadrature ----

namespace {

// integral over [x_i, x_{i+1}] from the cubic through four neighbouring nodes
double interval_integral(std::span<const double> f, std::size_t i, double h) {
  const std::size_t n = f.size();
  const double c = h / 24.0;
  if (i == 0) return c * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
  if (i + 2 == n) return c * (f[n - 4] - 5.0 * f[n - 3] + 19.0 * f[n - 2] + 9.0 * f[n - 1]);
  return c * (-f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2]);
}

}  // namespace

std::vector<double> integrate_to_end(std::span<const double> f, double h) {
  if (f.size() < 4) throw GridTooSmall(f.size(), 4);
  std::vector<double> I(f.size(), 0.0);
  for (std::size_t i = f.size() - 1; i-- > 0;) I[i] = I[i + 1] + interval_integral(f, i, h);
  return I;
}

std::vector<double> integrate_to_end(const NodeSeries& f, const Grid& grid) {
  std::vector<double> I(static_cast<std::size_t>(grid.nodes()), 0.0);
  const auto& segs = grid.segments();
  double tail = 0.0;
  for (auto s = segs.rbegin(); s != segs.rend(); ++s) {
    auto part = integrate_to_end(gather(f, *s), grid.h());
    for (int i = s->first; i <= s->last; ++i) I[i] = tail + part[i - s->first];
    tail = I[s->first];
  }
  return I;
}

}  // namespace herglotz
