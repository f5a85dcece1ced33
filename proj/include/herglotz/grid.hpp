#pragma once

#include <span>
#include <vector>

namespace herglotz {

enum class Side { left, right };

// Uniform grid on [a, b] with the delay aligned to p whole steps.  Break nodes
// {a + k tau} and {b - k tau} split the grid into segments; derivative stencils never
// reach across a break because x^(n) and the masked costate terms may jump there.
class Grid {
 public:
  struct Segment {
    int first;
    int last;
    int nodes() const noexcept { return last - first + 1; }
  };

  // Picks the smallest M >= max(target, 10n) with tau = p h exactly.
  static Grid make(double a, double b, double tau, int target_intervals, int order);
  // Fixed M; throws ValidationError if tau is not a whole number of steps.
  static Grid with_intervals(double a, double b, double tau, int intervals);

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double h() const noexcept { return h_; }
  double tau() const noexcept { return p_ * h_; }
  int intervals() const noexcept { return M_; }
  int nodes() const noexcept { return M_ + 1; }
  int delay_steps() const noexcept { return p_; }
  // node of b - tau; equals M when tau = 0
  int junction() const noexcept { return M_ - p_; }
  double node(int i) const noexcept { return i == M_ ? b_ : a_ + i * h_; }

  const std::vector<int>& breaks() const noexcept { return breaks_; }
  bool is_break(int i) const noexcept;
  const std::vector<Segment>& segments() const noexcept { return segments_; }
  // segment holding the interval [t_i, t_{i+1}]
  const Segment& segment_of_interval(int i) const;
  // distance in nodes to the nearest segment end (a, b or a break)
  int distance_to_edge(int i) const;

 private:
  Grid(double a, double b, int M, int p);

  double a_ = 0.0, b_ = 1.0, h_ = 1.0;
  int M_ = 1, p_ = 0;
  std::vector<int> breaks_;
  std::vector<Segment> segments_;
  std::vector<int> segment_index_;  // per interval
};

// Per-node samples that may take different one-sided limits at break nodes.
class NodeSeries {
 public:
  NodeSeries() = default;
  explicit NodeSeries(int nodes, double fill = 0.0)
      : right_(static_cast<std::size_t>(nodes), fill), left_(static_cast<std::size_t>(nodes), fill) {}

  int size() const noexcept { return static_cast<int>(right_.size()); }
  double operator[](int i) const { return right_[i]; }
  double left(int i) const { return left_[i]; }
  double right(int i) const { return right_[i]; }
  double at(int i, Side s) const { return s == Side::left ? left_[i] : right_[i]; }

  void set(int i, double v) { right_[i] = left_[i] = v; }
  void set(int i, Side s, double v) { (s == Side::left ? left_ : right_)[i] = v; }

  std::span<const double> values() const noexcept { return right_; }

 private:
  std::vector<double> right_;
  std::vector<double> left_;
};

// Five-point O(h^4) first derivative applied `order` times; two nodes at each end use
// one-sided five-point stencils.  Needs at least 7 nodes.
std::vector<double> differentiate_series(std::span<const double> values, double h, int order);

// Segment-wise version: each segment is differentiated on its own, the results at
// break nodes go to the matching one-sided slot.
NodeSeries differentiate(const NodeSeries& values, const Grid& grid, int order);

// Values of one segment, using the right limit at its first node and the left limit at
// its last.
std::vector<double> gather(const NodeSeries& s, const Grid::Segment& seg);
void scatter(NodeSeries& s, const Grid::Segment& seg, std::span<const double> values);

// I_i = integral from t_i to the last node, O(h^4) cubic rule per interval.  Needs 4 nodes.
std::vector<double> integrate_to_end(std::span<const double> f, double h);

// Segment-aware version of integrate_to_end (continuous result).
std::vector<double> integrate_to_end(const NodeSeries& f, const Grid& grid);

}  // namespace herglotz
