#include "mfvdm/mfvdm_core.hpp"

#include "mfvdm/fft.hpp"
#include "mfvdm/rng.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

namespace mfvdm {

namespace {

constexpr std::uint64_t kLanczosStream = 5;

double max_residual(const SparseMatrixC& w, const Eigen::VectorXd& values, const Eigen::MatrixXcd& vectors) {
  if (vectors.cols() == 0) return 0.0;
  const Eigen::MatrixXcd r = w * vectors - vectors * values.asDiagonal();
  return r.colwise().norm().maxCoeff();
}

Spectrum dense_eigs(const FrequencyMatrix& matrix, int m) {
  const int n = matrix.size();
  Eigen::MatrixXcd a = matrix.dense();
  Eigen::VectorXd w(n);
  Spectrum out;
  lapack_int info = 0;
  if (m == n) {
    info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n, reinterpret_cast<lapack_complex_double*>(a.data()), n,
                          w.data());
    out.values = w.reverse();
    out.vectors = a.rowwise().reverse();
  } else {
    Eigen::MatrixXcd z(n, m);
    std::vector<lapack_int> support(2 * static_cast<std::size_t>(m));
    lapack_int found = 0;
    info = LAPACKE_zheevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', n, reinterpret_cast<lapack_complex_double*>(a.data()), n,
                          0.0, 0.0, n - m + 1, n, 0.0, &found, w.data(), reinterpret_cast<lapack_complex_double*>(z.data()),
                          n, support.data());
    if (info == 0 && found != m) info = -1000;
    out.values = w.head(m).reverse();
    out.vectors = z.rowwise().reverse();
  }
  if (info != 0)
    throw Error(ErrorCode::kNonConvergence, "top_eigs: dense Hermitian solver failed with info " + std::to_string(info));
  return out;
}

class KrylovBasis {
 public:
  KrylovBasis(const SparseMatrixC& w, int capacity) : w_(w), v_(w.rows(), capacity), av_(w.rows(), capacity) {}

  int cols() const { return cols_; }
  const SparseMatrixC& op() const { return w_; }
  Eigen::Ref<const Eigen::MatrixXcd> v() const { return v_.leftCols(cols_); }
  Eigen::Ref<const Eigen::MatrixXcd> av() const { return av_.leftCols(cols_); }

  void reset(const Eigen::MatrixXcd& v, const Eigen::MatrixXcd& av) {
    cols_ = static_cast<int>(v.cols());
    v_.leftCols(cols_) = v;
    av_.leftCols(cols_) = av;
  }

  /// Orthonormalizes candidates against the basis and appends them along with
  /// their images under the operator. Returns the number of vectors appended.
  int append(Eigen::MatrixXcd block, CounterRng& rng) {
    const int start = cols_;
    for (Eigen::Index c = 0; c < block.cols() && cols_ < v_.cols(); ++c) {
      Eigen::VectorXcd x = block.col(c);
      for (int attempt = 0; attempt < 3; ++attempt) {
        const double before = x.norm();
        for (int pass = 0; pass < 2; ++pass) x -= v() * (v().adjoint() * x);
        if (x.norm() > 1e-8 * std::max(before, 1e-300)) break;
        for (Eigen::Index r = 0; r < x.size(); ++r) x(r) = Complex(rng.normal(), rng.normal());
      }
      x.normalize();
      v_.col(cols_) = x;
      ++cols_;
    }
    if (cols_ > start) av_.middleCols(start, cols_ - start) = w_ * v_.middleCols(start, cols_ - start);
    return cols_ - start;
  }

  Eigen::MatrixXcd last_images(int count) const { return av_.middleCols(cols_ - count, count); }

 private:
  const SparseMatrixC& w_;
  Eigen::MatrixXcd v_, av_;
  int cols_ = 0;
};

Spectrum krylov_eigs(const FrequencyMatrix& matrix, int m, const EigenOptions& options) {
  const int n = matrix.size();
  const int b = std::max(1, std::min(options.block_size, m));
  const int capacity = std::min(n, std::max(2 * m + 2 * b, m + 6 * b));
  CounterRng rng(options.seed, kLanczosStream);
  KrylovBasis basis(matrix.normalized, capacity);

  Eigen::MatrixXcd start(n, b);
  for (Eigen::Index i = 0; i < start.size(); ++i) start.data()[i] = Complex(rng.normal(), rng.normal());
  int last = basis.append(start, rng);

  double reached = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart <= options.max_restarts; ++restart) {
    while (basis.cols() < capacity && last > 0) last = basis.append(basis.last_images(last), rng);

    Eigen::MatrixXcd h = basis.v().adjoint() * basis.av();
    h = 0.5 * (h + h.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h);
    const int p = basis.cols();
    const Eigen::MatrixXcd s = eig.eigenvectors().rowwise().reverse();
    const Eigen::VectorXd theta = eig.eigenvalues().reverse();
    const Eigen::MatrixXcd y = basis.v() * s;
    const Eigen::MatrixXcd ay = basis.av() * s;
    const Eigen::MatrixXcd res = ay.leftCols(m) - y.leftCols(m) * theta.head(m).asDiagonal();
    const Eigen::VectorXd norms = res.colwise().norm();
    reached = norms.maxCoeff();
    if (reached < options.tolerance || p == n) {
      Spectrum out;
      out.values = theta.head(m);
      out.vectors = y.leftCols(m);
      for (Eigen::Index c = 0; c < out.vectors.cols(); ++c) out.vectors.col(c).normalize();
      return out;
    }
    const int keep = std::min(m + b, capacity - b);
    basis.reset(y.leftCols(keep), ay.leftCols(keep));
    Eigen::MatrixXcd next(n, b);
    int filled = 0;
    for (int l = 0; l < m && filled < b; ++l)
      if (norms(l) >= options.tolerance) next.col(filled++) = res.col(l);
    for (; filled < b; ++filled)
      for (Eigen::Index r = 0; r < n; ++r) next(r, filled) = Complex(rng.normal(), rng.normal());
    last = basis.append(next, rng);
  }
  std::ostringstream msg;
  msg << "top_eigs: block Krylov solver did not converge, residual " << reached;
  throw Error(ErrorCode::kNonConvergence, msg.str());
}

}  // namespace

FrequencyMatrix build_frequency_matrix(const ViewGraph& graph, int k) {
  const int n = graph.size();
  for (int i = 0; i < n; ++i)
    if (graph.degree(i) == 0)
      throw Error(ErrorCode::kIsolatedNode, "build_frequency_matrix: node " + std::to_string(i) + " has no neighbors");
  if (!graph.is_symmetric(1e-9))
    throw Error(ErrorCode::kInvalidArgument, "build_frequency_matrix: graph must be symmetric with antisymmetric angles");

  FrequencyMatrix out;
  out.k = k;
  out.degree.resize(n);
  for (int i = 0; i < n; ++i) out.degree(i) = graph.degree(i);
  std::vector<Eigen::Triplet<Complex>> entries;
  entries.reserve(graph.edge_count());
  for (int i = 0; i < n; ++i)
    for (const GraphEdge& e : graph.neighbors(i)) {
      if (e.j < i) continue;
      const Complex w = std::polar(1.0 / std::sqrt(out.degree(i) * out.degree(e.j)), k * e.alpha);
      entries.emplace_back(i, e.j, w);
      entries.emplace_back(e.j, i, std::conj(w));
    }
  out.normalized.resize(n, n);
  out.normalized.setFromTriplets(entries.begin(), entries.end());
  return out;
}

Spectrum top_eigs(const FrequencyMatrix& matrix, int m, const EigenOptions& options) {
  const int n = matrix.size();
  if (m < 1 || m > n) throw Error(ErrorCode::kInvalidArgument, "top_eigs: m must lie in [1, n]");
  Spectrum out = n <= options.dense_limit ? dense_eigs(matrix, m) : krylov_eigs(matrix, m, options);
  out.max_residual = max_residual(matrix.normalized, out.values, out.vectors);
  return out;
}

SpectralBundle::SpectralBundle(std::vector<Spectrum> spectra, Eigen::VectorXd degree, int t)
    : spectra_(std::move(spectra)), degree_(std::move(degree)), t_(t) {
  if (t_ < 0) throw Error(ErrorCode::kInvalidArgument, "SpectralBundle: diffusion time must be >= 0");
}

const Spectrum& SpectralBundle::spectrum(int k) const {
  if (k < 0 || k > k_tilde())
    throw Error(ErrorCode::kInvalidArgument, "SpectralBundle: frequency " + std::to_string(k) + " not computed");
  return spectra_[static_cast<std::size_t>(k)];
}

Complex SpectralBundle::kernel(int k, int i, int j) const {
  const Spectrum& s = spectrum(k);
  Complex z{};
  for (Eigen::Index l = 0; l < s.values.size(); ++l)
    z += std::pow(s.values(l), 2 * t_) * s.vectors(i, l) * std::conj(s.vectors(j, l));
  return z;
}

Eigen::MatrixXcd SpectralBundle::kernel_matrix(int k) const {
  const Spectrum& s = spectrum(k);
  const Eigen::VectorXd weights = s.values.array().pow(2 * t_);
  return s.vectors * weights.asDiagonal() * s.vectors.adjoint();
}

SpectralBundle compute_bundle(const ViewGraph& graph, const SpectralOptions& options) {
  if (options.k_tilde < 1) throw Error(ErrorCode::kInvalidArgument, "compute_bundle: k_tilde must be >= 1");
  if (options.t < 0) throw Error(ErrorCode::kInvalidArgument, "compute_bundle: t must be >= 0");
  const int m = std::min(options.m, graph.size());
  std::vector<Spectrum> spectra(static_cast<std::size_t>(options.k_tilde) + 1);
  Eigen::VectorXd degree;
  for (int k = 0; k <= options.k_tilde; ++k) {
    const FrequencyMatrix w = build_frequency_matrix(graph, k);
    if (k == 0) degree = w.degree;
    spectra[static_cast<std::size_t>(k)] = top_eigs(w, m, options.eigen);
  }
  return SpectralBundle(std::move(spectra), std::move(degree), options.t);
}

double embedding_dot(const SpectralBundle& bundle, int k, int i, int j) { return std::norm(bundle.kernel(k, i, j)); }

double affinity(const SpectralBundle& bundle, int i, int j, int* dropped) {
  double total = 0;
  for (int k = 1; k <= bundle.k_tilde(); ++k) {
    const double di = bundle.kernel(k, i, i).real(), dj = bundle.kernel(k, j, j).real();
    if (!(di > 0 && dj > 0)) {
      if (dropped) ++*dropped;
      continue;
    }
    total += i == j ? 1.0 : std::norm(bundle.kernel(k, i, j)) / (di * dj);
  }
  return total;
}

AffinityMatrix affinity_matrix(const SpectralBundle& bundle) {
  const int n = bundle.size();
  AffinityMatrix out;
  out.values = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k <= bundle.k_tilde(); ++k) {
    const Eigen::MatrixXcd z = bundle.kernel_matrix(k);
    const Eigen::VectorXd d = z.diagonal().real();
    for (int j = 0; j < n; ++j)
      for (int i = 0; i <= j; ++i) {
        if (!(d(i) > 0 && d(j) > 0)) {
          ++out.dropped;
          continue;
        }
        out.values(i, j) += i == j ? 1.0 : std::norm(z(i, j)) / (d(i) * d(j));
      }
  }
  for (int j = 0; j < n; ++j)
    for (int i = j + 1; i < n; ++i) out.values(i, j) = out.values(j, i);
  return out;
}

ViewGraph refine_neighbors(const AffinityMatrix& affinity, int s) {
  const int n = static_cast<int>(affinity.values.rows());
  if (s < 1 || s >= n) throw Error(ErrorCode::kInvalidArgument, "refine_neighbors: s must lie in [1, n - 1]");
  ViewGraph g(n);
  std::vector<int> order;
  for (int i = 0; i < n; ++i) {
    order.clear();
    for (int j = 0; j < n; ++j)
      if (j != i) order.push_back(j);
    const auto& a = affinity.values;
    std::partial_sort(order.begin(), order.begin() + s, order.end(), [&](int x, int y) {
      return a(i, x) > a(i, y) || (a(i, x) == a(i, y) && x < y);
    });
    for (int t = 0; t < s; ++t) {
      const int j = order[static_cast<std::size_t>(t)];
      g.add_edge(i, j, std::numeric_limits<double>::quiet_NaN(), a(i, j));
    }
  }
  return g;
}

namespace {

double estimate_alignment_ordered(const SpectralBundle& bundle, int i, int j, int fft_size) {
  std::vector<Complex> z(static_cast<std::size_t>(fft_size), Complex{});
  for (int k = 1; k <= bundle.k_tilde(); ++k) z[static_cast<std::size_t>(k)] = bundle.kernel(k, i, j);
  fft::dft(z, z, /*forward=*/true);
  std::size_t best = 0;
  for (std::size_t g = 1; g < z.size(); ++g)
    if (z[g].real() > z[best].real()) best = g;
  return wrap_angle(kTwoPi * static_cast<double>(best) / fft_size);
}

}  // namespace

double estimate_alignment(const SpectralBundle& bundle, int i, int j, int fft_size) {
  if (fft_size <= bundle.k_tilde())
    throw Error(ErrorCode::kInvalidArgument, "estimate_alignment: fft_size must exceed k_tilde");
  if (j < i) return wrap_angle(-estimate_alignment_ordered(bundle, j, i, fft_size));
  return estimate_alignment_ordered(bundle, i, j, fft_size);
}

double alignment_objective(const SpectralBundle& bundle, int i, int j, double alpha) {
  double total = 0;
  for (int k = 1; k <= bundle.k_tilde(); ++k) total += (bundle.kernel(k, i, j) * std::polar(1.0, -k * alpha)).real();
  return total;
}

RefinedGraph refine_graph(const ViewGraph& graph, int s, const SpectralOptions& options, int fft_size) {
  const SpectralBundle bundle = compute_bundle(graph, options);
  RefinedGraph out;
  out.affinity = affinity_matrix(bundle);
  out.directed = refine_neighbors(out.affinity, s);
  for (int i = 0; i < out.directed.size(); ++i)
    for (GraphEdge& e : out.directed.neighbors(i)) e.alpha = estimate_alignment(bundle, i, e.j, fft_size);
  out.graph = out.directed.symmetrized();
  return out;
}

}  // namespace mfvdm
