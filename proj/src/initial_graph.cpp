#include "mfvdm/initial_graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

namespace mfvdm {

std::size_t ViewGraph::edge_count() const {
  std::size_t total = 0;
  for (const auto& list : lists_) total += list.size();
  return total;
}

void ViewGraph::add_edge(int i, int j, double alpha, double distance) {
  if (i < 0 || j < 0 || i >= size() || j >= size())
    throw Error(ErrorCode::kInvalidArgument, "graph: edge endpoint out of range");
  if (i == j) throw Error(ErrorCode::kInvalidArgument, "graph: self-loop at node " + std::to_string(i));
  auto& list = lists_[static_cast<std::size_t>(i)];
  for (const GraphEdge& e : list)
    if (e.j == j)
      throw Error(ErrorCode::kInvalidArgument,
                  "graph: duplicate edge " + std::to_string(i) + " -> " + std::to_string(j));
  list.push_back({j, alpha, distance});
}

ViewGraph ViewGraph::symmetrized() const {
  // One entry per unordered pair, stored from the lower endpoint.
  std::map<std::pair<int, int>, GraphEdge> pairs;
  for (int i = 0; i < size(); ++i)
    for (const GraphEdge& e : neighbors(i)) {
      const int lo = std::min(i, e.j), hi = std::max(i, e.j);
      const GraphEdge entry{hi, i == lo ? e.alpha : wrap_angle(-e.alpha), e.distance};
      auto [it, inserted] = pairs.emplace(std::make_pair(lo, hi), entry);
      if (!inserted && i == lo) it->second = entry;
    }
  ViewGraph g(size());
  for (const auto& [key, e] : pairs) {
    g.lists_[static_cast<std::size_t>(key.first)].push_back(e);
    g.lists_[static_cast<std::size_t>(key.second)].push_back({key.first, wrap_angle(-e.alpha), e.distance});
  }
  for (auto& list : g.lists_)
    std::sort(list.begin(), list.end(), [](const GraphEdge& a, const GraphEdge& b) { return a.j < b.j; });
  return g;
}

bool ViewGraph::is_symmetric(double tol) const {
  for (int i = 0; i < size(); ++i)
    for (const GraphEdge& e : neighbors(i)) {
      if (e.j == i) return false;
      const auto& back = neighbors(e.j);
      auto it = std::find_if(back.begin(), back.end(), [&](const GraphEdge& b) { return b.j == i; });
      if (it == back.end()) return false;
      if (std::abs(wrap_angle(e.alpha + it->alpha)) > tol) return false;
    }
  return true;
}

void ViewGraph::require_no_isolated_nodes() const {
  for (int i = 0; i < size(); ++i)
    if (neighbors(i).empty()) throw Error(ErrorCode::kIsolatedNode, "graph: node " + std::to_string(i) + " has no neighbors");
}

double viewing_angle(const Eigen::Vector3d& vi, const Eigen::Vector3d& vj) {
  return std::acos(std::clamp(vi.dot(vj), -1.0, 1.0));
}

std::vector<bool> select_coefficients(const std::vector<FBCoeffs>& coeffs, double fraction,
                                      double noise_variance) {
  if (coeffs.empty()) throw Error(ErrorCode::kInvalidArgument, "select_coefficients: empty stack");
  if (!(fraction > 0 && fraction <= 1))
    throw Error(ErrorCode::kInvalidArgument, "select_coefficients: fraction must lie in (0, 1]");
  const BasisTables& b = *coeffs.front().basis();
  const Eigen::VectorXd nu = coefficient_noise_variance(b);
  Eigen::VectorXd energy = Eigen::VectorXd::Zero(b.count());
  for (const FBCoeffs& c : coeffs) energy += c.values().cwiseAbs2();
  energy /= static_cast<double>(coeffs.size());
  std::vector<double> signal(static_cast<std::size_t>(b.count()));
  for (int k = 0; k <= b.k_max(); ++k)
    for (int q = 1; q <= b.radial_count(k); ++q) {
      const int idx = b.index(k, q);
      const double mult = k == 0 ? 1.0 : 2.0;
      signal[static_cast<std::size_t>(idx)] = mult * std::max(energy(idx) - noise_variance * nu(idx), 0.0);
    }
  const double total = std::accumulate(signal.begin(), signal.end(), 0.0);
  std::vector<bool> keep(signal.size(), total <= 0.0);
  if (total <= 0.0) return keep;

  std::vector<int> order(signal.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int c) {
    return signal[static_cast<std::size_t>(a)] > signal[static_cast<std::size_t>(c)];
  });
  double covered = 0.0;
  for (int idx : order) {
    if (covered >= fraction * total) break;
    keep[static_cast<std::size_t>(idx)] = true;
    covered += signal[static_cast<std::size_t>(idx)];
  }
  return keep;
}

FBCoeffs mask_coefficients(const FBCoeffs& coeffs, const std::vector<bool>& keep) {
  if (static_cast<Eigen::Index>(keep.size()) != coeffs.values().size())
    throw Error(ErrorCode::kDimensionMismatch, "mask_coefficients: mask size differs from coefficient count");
  FBCoeffs out = coeffs;
  for (std::size_t i = 0; i < keep.size(); ++i)
    if (!keep[i]) out.values()(static_cast<Eigen::Index>(i)) = 0.0;
  return out;
}

NeighborSearchResult initial_nn_search(const std::vector<FBCoeffs>& coeffs, const NeighborSearchOptions& options) {
  const int n = static_cast<int>(coeffs.size());
  const int s = options.neighbors;
  if (s < 1) throw Error(ErrorCode::kInvalidArgument, "initial_nn_search: neighbors must be >= 1");
  if (n < s + 1) throw Error(ErrorCode::kInvalidArgument, "initial_nn_search: need at least neighbors + 1 images");
  for (const FBCoeffs& c : coeffs)
    if (c.basis() != coeffs.front().basis())
      throw Error(ErrorCode::kInvalidArgument, "initial_nn_search: coefficients use different bases");

  NeighborSearchResult result;
  result.kept = select_coefficients(coeffs, options.energy_fraction, options.noise_variance);
  std::vector<FBCoeffs> truncated;
  truncated.reserve(coeffs.size());
  for (const FBCoeffs& c : coeffs) truncated.push_back(mask_coefficients(c, result.kept));

  Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd angle = Eigen::MatrixXd::Zero(n, n);
#pragma omp parallel for schedule(dynamic, 4)
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const RidResult r = rid_align(truncated[static_cast<std::size_t>(i)], truncated[static_cast<std::size_t>(j)],
                                    options.fft_size);
      dist(i, j) = dist(j, i) = r.distance;
      angle(i, j) = r.angle;
      angle(j, i) = wrap_angle(-r.angle);
    }

  result.directed = ViewGraph(n);
  std::vector<int> order;
  for (int i = 0; i < n; ++i) {
    order.clear();
    for (int j = 0; j < n; ++j)
      if (j != i) order.push_back(j);
    std::partial_sort(order.begin(), order.begin() + s, order.end(), [&](int a, int b) {
      return dist(i, a) < dist(i, b) || (dist(i, a) == dist(i, b) && a < b);
    });
    for (int t = 0; t < s; ++t) {
      const int j = order[static_cast<std::size_t>(t)];
      result.directed.add_edge(i, j, angle(i, j), dist(i, j));
    }
  }
  result.graph = result.directed.symmetrized();
  return result;
}

}  // namespace mfvdm
