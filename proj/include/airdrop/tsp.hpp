#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "airdrop/dubins.hpp"
#include "airdrop/error.hpp"
#include "airdrop/geometry.hpp"

namespace airdrop {

/// Dense, possibly asymmetric, travel-cost matrix. The diagonal reads as +inf.
class CostMatrix {
 public:
  CostMatrix() = default;
  explicit CostMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {
    if (n < 2) throw Error(ErrorCode::InvalidArgument, "cost matrix needs n >= 2");
  }

  std::size_t size() const { return n_; }

  double operator()(std::size_t i, std::size_t j) const {
    return i == j ? std::numeric_limits<double>::infinity() : data_[i * n_ + j];
  }

  void set(std::size_t i, std::size_t j, double value) {
    if (i == j) return;
    if (!std::isfinite(value) || value < 0.0) {
      throw Error(ErrorCode::InvalidArgument, "off-diagonal costs must be finite and >= 0");
    }
    data_[i * n_ + j] = value;
  }

  bool is_symmetric(double tol = 1e-12) const {
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = i + 1; j < n_; ++j) {
        const double a = data_[i * n_ + j], b = data_[j * n_ + i];
        if (std::abs(a - b) > tol * std::max(1.0, std::max(a, b))) return false;
      }
    }
    return true;
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

struct Tour {
  std::vector<std::size_t> order;
  double total_cost = 0.0;
  bool closed = true;
};

/// Sum of consecutive legs, plus the return leg for closed tours.
inline double tour_cost(std::span<const std::size_t> order, const CostMatrix& costs, bool closed) {
  double c = 0.0;
  for (std::size_t i = 0; i + 1 < order.size(); ++i) c += costs(order[i], order[i + 1]);
  if (closed && order.size() > 1) c += costs(order.back(), order.front());
  return c;
}

inline bool is_permutation_of_n(std::span<const std::size_t> order, std::size_t n) {
  if (order.size() != n) return false;
  std::vector<char> seen(n, 0);
  for (std::size_t v : order) {
    if (v >= n || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

inline Tour make_tour(std::vector<std::size_t> order, const CostMatrix& costs, bool closed) {
  if (!is_permutation_of_n(order, costs.size())) throw Error(ErrorCode::InvalidTour, "order is not a permutation");
  Tour t;
  t.total_cost = tour_cost(order, costs, closed);
  t.order = std::move(order);
  t.closed = closed;
  return t;
}

/// Greedy tour from `start`; ties go to the lowest index.
inline Tour nearest_neighbor_tour(const CostMatrix& costs, std::size_t start, bool closed = true) {
  const std::size_t n = costs.size();
  if (start >= n) throw Error(ErrorCode::InvalidArgument, "start index out of range");
  std::vector<char> used(n, 0);
  std::vector<std::size_t> order{start};
  used[start] = 1;
  while (order.size() < n) {
    const std::size_t cur = order.back();
    std::size_t best = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (!used[j] && (best == n || costs(cur, j) < costs(cur, best))) best = j;
    }
    used[best] = 1;
    order.push_back(best);
  }
  return make_tour(std::move(order), costs, closed);
}

struct KOptOptions {
  int max_k = 3;  // 2: segment relocation (Or-opt) only; 3: adds general segment exchange
  int max_passes = 10000;
};

namespace detail {

/// Cost of the edge leaving sequence position p. Position n is the closing
/// sentinel: the start node for closed tours, a free terminal for open ones.
struct TourEdges {
  const CostMatrix& costs;
  const std::vector<std::size_t>& seq;
  bool closed;

  double next_cost(std::size_t from_node, std::size_t to_pos) const {
    if (to_pos == seq.size()) return closed ? costs(from_node, seq.front()) : 0.0;
    return costs(from_node, seq[to_pos]);
  }
  double edge(std::size_t p) const { return next_cost(seq[p], p + 1); }
};

}  // namespace detail

/// Orientation-preserving local search. Every accepted move strictly lowers
/// the cost and never evaluates a leg in reverse, except 2-opt reversals,
/// which are enabled only for symmetric matrices. The first tour node is
/// never moved. Scans in fixed order and takes the first improving move.
inline Tour k_opt_improve(Tour tour, const CostMatrix& costs, const KOptOptions& options = {}) {
  const std::size_t n = costs.size();
  if (!is_permutation_of_n(tour.order, n)) throw Error(ErrorCode::InvalidTour, "tour does not match cost matrix");
  if (options.max_k < 2 || options.max_k > 3) throw Error(ErrorCode::InvalidArgument, "max_k must be 2 or 3");
  tour.total_cost = tour_cost(tour.order, costs, tour.closed);
  if (n < 3) return tour;
  const bool symmetric = costs.is_symmetric();

  auto try_move = [&]() -> bool {
    std::vector<std::size_t>& seq = tour.order;
    const detail::TourEdges e{costs, seq, tour.closed};
    const double eps = 1e-12 * std::max(1.0, tour.total_cost);
    // Segment exchange: seq[0..i] + seq[j+1..k] + seq[i+1..j] + seq[k+1..].
    for (std::size_t i = 0; i + 2 < n + 1; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        for (std::size_t k = j + 1; k < n; ++k) {
          const std::size_t len1 = j - i, len2 = k - j;
          if (options.max_k == 2 && std::min(len1, len2) > 3) continue;
          const double removed = e.edge(i) + e.edge(j) + e.edge(k);
          const double added = costs(seq[i], seq[j + 1]) + costs(seq[k], seq[i + 1]) + e.next_cost(seq[j], k + 1);
          if (added - removed < -eps) {
            std::rotate(seq.begin() + static_cast<long>(i + 1), seq.begin() + static_cast<long>(j + 1),
                        seq.begin() + static_cast<long>(k + 1));
            return true;
          }
        }
      }
    }
    if (symmetric) {
      // 2-opt: reverse seq[i+1..j].
      for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = i + 2; j < n; ++j) {
          const double removed = e.edge(i) + e.edge(j);
          const double added = costs(seq[i], seq[j]) + e.next_cost(seq[i + 1], j + 1);
          if (added - removed < -eps) {
            std::reverse(seq.begin() + static_cast<long>(i + 1), seq.begin() + static_cast<long>(j + 1));
            return true;
          }
        }
      }
    }
    return false;
  };

  for (int pass = 0; pass < options.max_passes; ++pass) {
    const double before = tour.total_cost;
    if (!try_move()) break;
    tour.total_cost = tour_cost(tour.order, costs, tour.closed);
    if (tour.total_cost > before) {
      throw Error(ErrorCode::InvalidArgument, "k-opt accepted a worsening move");
    }
  }
  return tour;
}

/// Exact optimum by enumeration with node 0 fixed first. n <= 10.
inline Tour brute_force_tour(const CostMatrix& costs) {
  const std::size_t n = costs.size();
  if (n > 10) throw Error(ErrorCode::TooLarge, "brute force limited to n <= 10");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::vector<std::size_t> best = perm;
  double best_cost = tour_cost(perm, costs, true);
  while (std::next_permutation(perm.begin() + 1, perm.end())) {
    const double c = tour_cost(perm, costs, true);
    if (c < best_cost) {
      best_cost = c;
      best = perm;
    }
  }
  return make_tour(std::move(best), costs, true);
}

struct PerturbOptions {
  std::size_t kicks_per_node = 30;
  std::uint64_t seed = 1;
};

/// Iterated local search: applies a random segment exchange to the best tour
/// so far, re-runs k-opt, and keeps the result only when it is cheaper. The
/// first tour node stays in place.
inline Tour perturb_improve(Tour best, const CostMatrix& costs, const KOptOptions& kopt,
                            const PerturbOptions& perturb) {
  const std::size_t n = costs.size();
  if (n < 4) return best;
  Rng rng(perturb.seed);
  const std::size_t kicks = perturb.kicks_per_node * n;
  for (std::size_t k = 0; k < kicks; ++k) {
    // Three distinct cuts in [1, n]; swap seq[a..b) and seq[b..c).
    std::size_t cut[3];
    cut[0] = 1 + rng.below(n);
    do cut[1] = 1 + rng.below(n);
    while (cut[1] == cut[0]);
    do cut[2] = 1 + rng.below(n);
    while (cut[2] == cut[0] || cut[2] == cut[1]);
    std::sort(cut, cut + 3);
    Tour t = best;
    std::rotate(t.order.begin() + static_cast<long>(cut[0]), t.order.begin() + static_cast<long>(cut[1]),
                t.order.begin() + static_cast<long>(cut[2]));
    t = k_opt_improve(std::move(t), costs, kopt);
    if (t.total_cost < best.total_cost - 1e-12 * std::max(1.0, best.total_cost)) best = std::move(t);
  }
  return best;
}

/// Nearest-neighbor construction from every start, each improved by k-opt,
/// then perturbation; returns the best tour rotated so that `anchor` is first.
inline Tour solve_atsp(const CostMatrix& costs, bool closed = true, std::size_t anchor = 0,
                       const KOptOptions& options = {}, const PerturbOptions& perturb = {}) {
  const std::size_t n = costs.size();
  Tour best;
  best.total_cost = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < n; ++s) {
    // Open tours must start at the anchor.
    if (!closed && s != anchor) continue;
    Tour t = k_opt_improve(nearest_neighbor_tour(costs, s, closed), costs, options);
    if (closed) {
      auto it = std::find(t.order.begin(), t.order.end(), anchor);
      std::rotate(t.order.begin(), it, t.order.end());
      t.total_cost = tour_cost(t.order, costs, closed);
    }
    if (t.total_cost < best.total_cost) best = std::move(t);
  }
  return perturb_improve(std::move(best), costs, options, perturb);
}

enum class HeadingPolicy { NextNearest, PrincipalAxis };

/// Headings for planar viewpoints. NextNearest chains the points greedily by
/// Euclidean distance from `start`; each point faces its chain successor and
/// the last one keeps its arrival bearing. PrincipalAxis faces every point
/// along the longer side of the area.
inline std::vector<double> assign_headings(std::span<const Point2> points, HeadingPolicy policy,
                                           const AreaOfInterest& area, std::size_t start = 0) {
  const std::size_t n = points.size();
  std::vector<double> headings(n, 0.0);
  if (policy == HeadingPolicy::PrincipalAxis) {
    std::fill(headings.begin(), headings.end(), area.d_x >= area.d_y ? 0.0 : std::numbers::pi / 2.0);
    return headings;
  }
  if (n < 2) return headings;
  std::vector<char> used(n, 0);
  std::vector<std::size_t> chain{start};
  used[start] = 1;
  while (chain.size() < n) {
    const Point2 cur = points[chain.back()];
    std::size_t best = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (!used[j] && (best == n || norm2(points[j] - cur) < norm2(points[best] - cur))) best = j;
    }
    used[best] = 1;
    chain.push_back(best);
  }
  auto bearing = [](Point2 from, Point2 to) { return wrap_two_pi(std::atan2(to.y - from.y, to.x - from.x)); };
  for (std::size_t k = 0; k + 1 < n; ++k) headings[chain[k]] = bearing(points[chain[k]], points[chain[k + 1]]);
  headings[chain[n - 1]] = bearing(points[chain[n - 2]], points[chain[n - 1]]);
  return headings;
}

/// cost(i, j) = Dubins Airplane path length from points[i] to points[j].
inline CostMatrix dubins_cost_matrix(std::span<const Pose4> points, const VehicleLimits& limits) {
  if (points.size() < 2) throw Error(ErrorCode::InvalidArgument, "cost matrix needs at least two points");
  CostMatrix m(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (i != j) m.set(i, j, dubins_airplane_path(points[i], points[j], limits).total_length);
    }
  }
  return m;
}

// Plain full-matrix text: first line n, then n rows of n numbers with the
// diagonal written as 1e9. Values use round-trip precision.
inline constexpr double kDiagonalSentinel = 1e9;

inline void write_cost_matrix(std::ostream& os, const CostMatrix& costs) {
  const std::size_t n = costs.size();
  os << n << '\n';
  char buf[64];
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", i == j ? kDiagonalSentinel : costs(i, j));
      if (j) os << ' ';
      os << buf;
    }
    os << '\n';
  }
}

inline CostMatrix read_cost_matrix(std::istream& is) {
  long long n = 0;
  if (!(is >> n) || n < 2) throw Error(ErrorCode::ParseError, "cost matrix header must be an integer n >= 2");
  CostMatrix m(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) {
    for (long long j = 0; j < n; ++j) {
      double v = 0.0;
      if (!(is >> v)) {
        throw Error(ErrorCode::ParseError,
                    "cost matrix entry (" + std::to_string(i) + "," + std::to_string(j) + ") missing or malformed");
      }
      if (i != j) m.set(static_cast<std::size_t>(i), static_cast<std::size_t>(j), v);
    }
  }
  return m;
}

/// Whitespace-separated node indices; must be a permutation of 0..n-1.
inline std::vector<std::size_t> read_tour_order(std::istream& is, std::size_t n) {
  std::vector<std::size_t> order;
  std::string tok;
  while (is >> tok) {
    std::size_t pos = 0;
    long long v = -1;
    try {
      v = std::stoll(tok, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != tok.size() || v < 0) throw Error(ErrorCode::ParseError, "malformed tour index '" + tok + "'");
    order.push_back(static_cast<std::size_t>(v));
  }
  if (!is_permutation_of_n(order, n)) {
    throw Error(ErrorCode::InvalidTour, "tour is not a permutation of 0.." + std::to_string(n - 1));
  }
  return order;
}

inline Tour read_tour(std::istream& is, const CostMatrix& costs, bool closed = true) {
  return make_tour(read_tour_order(is, costs.size()), costs, closed);
}

}  // namespace airdrop
