#pragma once

#include "mfvdm/common.hpp"
#include "mfvdm/initial_graph.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstdint>
#include <vector>

namespace mfvdm {

using SparseMatrixC = Eigen::SparseMatrix<Complex, Eigen::ColMajor>;

/// Normalized frequency-k connection matrix D^{-1/2} W_k D^{-1/2} with
/// W_k(i, j) = exp(i k alpha_ij) on graph edges. The (j, i) entry is stored as
/// the exact conjugate of (i, j).
struct FrequencyMatrix {
  int k = 0;
  SparseMatrixC normalized;
  Eigen::VectorXd degree;

  int size() const { return static_cast<int>(degree.size()); }
  Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(normalized); }
};

/// Throws Error(kIsolatedNode) naming a node without neighbors and
/// Error(kInvalidArgument) if the graph is not symmetric with antisymmetric angles.
FrequencyMatrix build_frequency_matrix(const ViewGraph& graph, int k);

struct EigenOptions {
  int dense_limit = 5000;  // dense Hermitian solver up to this size, block Krylov above
  double tolerance = 1e-10;
  int max_restarts = 500;
  int block_size = 8;
  std::uint64_t seed = 1;
};

/// Eigenpairs sorted by algebraic value, descending. vectors is n x m.
struct Spectrum {
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;
  double max_residual = 0;  // max_l ||W u_l - lambda_l u_l||
};

/// Top m eigenpairs. m = n returns the full spectrum. Throws
/// Error(kNonConvergence) with the residual reached when the iterative solver stalls.
Spectrum top_eigs(const FrequencyMatrix& matrix, int m, const EigenOptions& options = {});

struct SpectralOptions {
  int k_tilde = 10;
  int m = 50;
  int t = 1;
  EigenOptions eigen;
};

/// Spectra for k = 0..k_tilde of one graph.
class SpectralBundle {
 public:
  SpectralBundle() = default;
  SpectralBundle(std::vector<Spectrum> spectra, Eigen::VectorXd degree, int t);

  int size() const { return static_cast<int>(degree_.size()); }
  int k_tilde() const { return static_cast<int>(spectra_.size()) - 1; }
  int t() const { return t_; }
  const Spectrum& spectrum(int k) const;
  const Eigen::VectorXd& degree() const { return degree_; }

  /// z_k(i, j) = sum_l lambda_l^{2t} u_l(i) conj(u_l(j)).
  Complex kernel(int k, int i, int j) const;
  /// n x n matrix of z_k(i, j).
  Eigen::MatrixXcd kernel_matrix(int k) const;

 private:
  std::vector<Spectrum> spectra_;
  Eigen::VectorXd degree_;
  int t_ = 1;
};

SpectralBundle compute_bundle(const ViewGraph& graph, const SpectralOptions& options);

/// <V_t^(k)(i), V_t^(k)(j)> = |z_k(i, j)|^2.
double embedding_dot(const SpectralBundle& bundle, int k, int i, int j);

/// sum_{k=1}^{k_tilde} |z_k(i, j)|^2 / (z_k(i, i) z_k(j, j)). Frequencies where
/// either self term is zero are skipped and counted in `dropped`.
double affinity(const SpectralBundle& bundle, int i, int j, int* dropped = nullptr);

struct AffinityMatrix {
  Eigen::MatrixXd values;
  long long dropped = 0;  // skipped (unordered pair, frequency) terms, self pairs included
};

AffinityMatrix affinity_matrix(const SpectralBundle& bundle);

/// Per node the s largest affinities, ties to the smaller index; angles NaN and
/// distance holding the affinity.
ViewGraph refine_neighbors(const AffinityMatrix& affinity, int s);

/// argmax over the fft_size-point grid of Re sum_{k=1}^{k_tilde} z_k(i, j) e^{-i k alpha},
/// wrapped to (-pi, pi]. Exactly antisymmetric in (i, j) up to the grid.
double estimate_alignment(const SpectralBundle& bundle, int i, int j, int fft_size = 1024);

/// Objective of estimate_alignment at one angle.
double alignment_objective(const SpectralBundle& bundle, int i, int j, double alpha);

struct RefinedGraph {
  ViewGraph directed;  // s per node, alpha estimated
  ViewGraph graph;     // union-symmetrized
  AffinityMatrix affinity;
};

/// Spectra of the input graph, affinity, s nearest neighbors and
/// their alignments.
RefinedGraph refine_graph(const ViewGraph& graph, int s, const SpectralOptions& options, int fft_size = 1024);

}  // namespace mfvdm
