#pragma once

#include "mfvdm/common.hpp"
#include "mfvdm/steerable_basis.hpp"

#include <Eigen/Core>

#include <limits>
#include <vector>

namespace mfvdm {

struct GraphEdge {
  int j = 0;
  double alpha = 0.0;  // counter-clockwise rotation of image j that matches image i
  double distance = std::numeric_limits<double>::quiet_NaN();
};

/// Neighbor lists with per-edge in-plane angles. Directed as stored; use
/// symmetrized() to obtain the undirected view graph.
class ViewGraph {
 public:
  ViewGraph() = default;
  explicit ViewGraph(int n) : lists_(static_cast<std::size_t>(n)) {}

  int size() const { return static_cast<int>(lists_.size()); }
  const std::vector<GraphEdge>& neighbors(int i) const { return lists_.at(static_cast<std::size_t>(i)); }
  std::vector<GraphEdge>& neighbors(int i) { return lists_.at(static_cast<std::size_t>(i)); }
  int degree(int i) const { return static_cast<int>(neighbors(i).size()); }
  std::size_t edge_count() const;

  /// Throws Error(kInvalidArgument) on self-loops, duplicate or out-of-range targets.
  void add_edge(int i, int j, double alpha, double distance = std::numeric_limits<double>::quiet_NaN());

  /// Edge union with alpha_ji = -alpha_ij. When both directions were stored,
  /// the entry of the lower-indexed endpoint wins. Lists are sorted by target.
  ViewGraph symmetrized() const;

  /// (i, j) present iff (j, i) present, and alpha_ij + alpha_ji = 0 mod 2 pi within tol.
  bool is_symmetric(double tol = 1e-12) const;

  /// Throws Error(kIsolatedNode) naming the first node with no neighbors.
  void require_no_isolated_nodes() const;

 private:
  std::vector<std::vector<GraphEdge>> lists_;
};

/// arccos of the clamped inner product of two unit vectors, in [0, pi].
double viewing_angle(const Eigen::Vector3d& vi, const Eigen::Vector3d& vj);

/// Coefficient slots retained for the neighbor search: the highest mean
/// energies max(E|a_kq|^2 - noise_variance * nu_kq, 0), counted over both
/// signs of k, until `fraction` of the total is covered. Ties go to the
/// smaller stored index. When no slot has positive energy all are kept.
std::vector<bool> select_coefficients(const std::vector<FBCoeffs>& coeffs, double fraction,
                                      double noise_variance);

/// Copy with dropped slots set to zero.
FBCoeffs mask_coefficients(const FBCoeffs& coeffs, const std::vector<bool>& keep);

struct NeighborSearchOptions {
  int neighbors = 50;
  int fft_size = 1024;
  double energy_fraction = 0.9;
  double noise_variance = 1.0;  // pixel noise variance of the expanded images
};

struct NeighborSearchResult {
  ViewGraph directed;   // exactly `neighbors` entries per node, nearest first
  ViewGraph graph;      // union-symmetrized
  std::vector<bool> kept;
};

/// Brute-force all-pairs rid_align over the truncated coefficients. Each node
/// keeps its `neighbors` smallest distances, ties to the smaller index.
/// Requires n >= neighbors + 1.
NeighborSearchResult initial_nn_search(const std::vector<FBCoeffs>& coeffs, const NeighborSearchOptions& options);

}  // namespace mfvdm
