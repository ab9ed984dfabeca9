#include "mfvdm/denoise.hpp"
#include "mfvdm/fft.hpp"
#include "mfvdm/rng.hpp"
#include "mfvdm/simulation.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace mfvdm {
namespace {

using testing::smooth_test_image;

ViewGraph random_graph(int n, int extra, std::uint64_t seed) {
  CounterRng rng(seed, 1);
  ViewGraph g(n);
  for (int i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1, kTwoPi * rng.uniform() - kPi);
  for (int t = 0; t < extra; ++t) {
    const int i = static_cast<int>(rng.next_u64() % n), j = static_cast<int>(rng.next_u64() % n);
    if (std::abs(i - j) <= 1) continue;
    bool dup = false;
    for (const GraphEdge& e : g.neighbors(std::min(i, j))) dup |= e.j == std::max(i, j);
    if (!dup) g.add_edge(std::min(i, j), std::max(i, j), kTwoPi * rng.uniform() - kPi);
  }
  return g.symmetrized();
}

CoeffMatrix random_block(int n, int p, std::uint64_t seed) {
  CounterRng rng(seed, 2);
  CoeffMatrix a(n, p);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = Complex(rng.normal(), rng.normal());
  return a;
}

Eigen::MatrixXcd averaging_operator(const ViewGraph& g, int k) {
  const int n = g.size();
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (const GraphEdge& e : g.neighbors(i)) s(i, e.j) = std::exp(Complex(0, k * e.alpha)) / double(g.degree(i));
  return s;
}

TEST(FilterResponse, FormulasAndOrdering) {
  EXPECT_EQ(filter_response(FilterKind::kMfvdm1, 0.3), 0.3);
  EXPECT_NEAR(filter_response(FilterKind::kMfvdm5, 0.3), 0.51, 1e-15);
  EXPECT_NEAR(filter_response(FilterKind::kMfvdm3, 0.3), 0.657, 1e-15);
  for (int t = 0; t <= 1000; ++t) {
    const double l = t / 1000.0;
    const double h1 = filter_response(FilterKind::kMfvdm1, l), h2 = filter_response(FilterKind::kMfvdm2, l),
                 h3 = filter_response(FilterKind::kMfvdm3, l);
    EXPECT_LE(h1, h2 + 1e-15);
    EXPECT_LE(h2, h3 + 1e-15);
    EXPECT_LE(h3, 1.0 + 1e-15);
  }
}

TEST(FilterResponse, Parsing) {
  EXPECT_EQ(parse_filter_kind("MFVDM2"), FilterKind::kMfvdm2);
  EXPECT_EQ(parse_filter_kind("5"), FilterKind::kMfvdm5);
  EXPECT_EQ(to_string(FilterKind::kMfvdm4), "mfvdm4");
  EXPECT_THROW(parse_filter_kind("mfvdm6"), Error);
  EXPECT_TRUE((FilterSpec{FilterKind::kMfvdm3, 5}.truncated()));
  EXPECT_FALSE((FilterSpec{FilterKind::kMfvdm5, 5}.truncated()));
}

TEST(SpectralFilter, LinearFilterEqualsAveragingOperator) {
  const ViewGraph g = random_graph(70, 120, 1);
  for (int k : {0, -1, 3}) {
    const FrequencyMatrix w = build_frequency_matrix(g, k);
    const Spectrum s = top_eigs(w, 70);
    const CoeffMatrix a = random_block(70, 6, 10 + k);
    const CoeffMatrix direct = averaging_operator(g, k) * a;
    const CoeffMatrix filtered = apply_spectral_filter(a, s, w.degree, {FilterKind::kMfvdm4, 0});
    EXPECT_LT((filtered - direct).cwiseAbs().maxCoeff(), 1e-10) << k;
  }
}

TEST(SpectralFilter, QuadraticFilterEqualsDirectOperator) {
  const ViewGraph g = random_graph(70, 120, 2);
  for (int k : {0, 2, -5}) {
    const FrequencyMatrix w = build_frequency_matrix(g, k);
    const Spectrum s = top_eigs(w, 70);
    const CoeffMatrix a = random_block(70, 4, 20 + k);
    const Eigen::MatrixXcd op = averaging_operator(g, k);
    const CoeffMatrix direct = (2.0 * op - op * op) * a;
    const CoeffMatrix filtered = apply_spectral_filter(a, s, w.degree, {FilterKind::kMfvdm5, 0});
    EXPECT_LT((filtered - direct).cwiseAbs().maxCoeff(), 1e-10) << k;
  }
}

TEST(SpectralFilter, UnitResponseIsIdentity) {
  const ViewGraph g = random_graph(40, 60, 3);
  const FrequencyMatrix w = build_frequency_matrix(g, 4);
  Spectrum s = top_eigs(w, 40);
  s.values.setOnes();
  const CoeffMatrix a = random_block(40, 5, 30);
  EXPECT_LT((apply_spectral_filter(a, s, w.degree, {FilterKind::kMfvdm4, 0}) - a).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(SpectralFilter, Linearity) {
  const ViewGraph g = random_graph(50, 80, 4);
  const FrequencyMatrix w = build_frequency_matrix(g, 2);
  const Spectrum s = top_eigs(w, 12);
  const FilterSpec f{FilterKind::kMfvdm2, 12};
  const CoeffMatrix x = random_block(50, 3, 40), y = random_block(50, 3, 41);
  const Complex a(0.7, -0.2), b(-1.3, 0.4);
  const CoeffMatrix lhs = apply_spectral_filter(a * x + b * y, s, w.degree, f);
  const CoeffMatrix rhs = a * apply_spectral_filter(x, s, w.degree, f) + b * apply_spectral_filter(y, s, w.degree, f);
  EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(SpectralFilter, LinearResponseDoesNotExpandSpectralCoordinates) {
  const ViewGraph g = random_graph(60, 90, 5);
  const FrequencyMatrix w = build_frequency_matrix(g, 1);
  const Spectrum s = top_eigs(w, 60);
  const CoeffMatrix a = random_block(60, 4, 50);
  const CoeffMatrix c = s.vectors.adjoint() * (w.degree.cwiseSqrt().asDiagonal() * a);
  Eigen::VectorXd h(60);
  for (int l = 0; l < 60; ++l) h(l) = filter_response(FilterKind::kMfvdm4, s.values(l));
  EXPECT_LE((h.asDiagonal() * c).norm(), c.norm());
}

TEST(SpectralFilter, Errors) {
  const ViewGraph g = random_graph(30, 40, 6);
  const FrequencyMatrix w = build_frequency_matrix(g, 1);
  const Spectrum partial = top_eigs(w, 10);
  const CoeffMatrix a = random_block(30, 2, 60);
  EXPECT_THROW(apply_spectral_filter(a, partial, w.degree, {FilterKind::kMfvdm2, 11}), Error);
  EXPECT_THROW(apply_spectral_filter(a, partial, w.degree, {FilterKind::kMfvdm5, 0}), Error);
  EXPECT_THROW(apply_spectral_filter(random_block(29, 2, 61), partial, w.degree, {FilterKind::kMfvdm2, 5}), Error);
  SpectralOptions o;
  o.k_tilde = 3;
  o.m = 10;
  const SpectralBundle bundle = compute_bundle(g, o);
  EXPECT_NO_THROW(apply_spectral_filter(a, bundle, 3, {FilterKind::kMfvdm2, 10}));
  try {
    apply_spectral_filter(a, bundle, 4, {FilterKind::kMfvdm2, 10});
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("k_max"), std::string::npos);
  }
}

struct RotatedCopies {
  BasisPtr basis;
  FBCoeffs source;
  std::vector<double> beta;
  std::vector<FBCoeffs> coeffs;
  ViewGraph graph;
};

/// Copy i is the source rotated by beta_i; alpha_ij = beta_i - beta_j on random edges.
RotatedCopies rotated_copies(int n, int neighbors, std::uint64_t seed) {
  RotatedCopies out;
  out.basis = build_basis(33, 0.5, 14);
  out.source = expand(smooth_test_image(33), out.basis);
  CounterRng rng(seed, 3);
  for (int i = 0; i < n; ++i) {
    out.beta.push_back(kTwoPi * rng.uniform() - kPi);
    out.coeffs.push_back(rotate_coeffs(out.source, out.beta.back()));
  }
  ViewGraph g(n);
  for (int i = 0; i < n; ++i)
    for (int t = 0; t < neighbors; ++t) {
      const int j = static_cast<int>(rng.next_u64() % n);
      bool dup = j == i;
      for (const GraphEdge& e : g.neighbors(i)) dup |= e.j == j;
      if (!dup) g.add_edge(i, j, wrap_angle(out.beta[i] - out.beta[j]));
    }
  out.graph = g.symmetrized();
  return out;
}

TEST(DenoiseStack, IdenticalImagesAreAFixedPoint) {
  const BasisPtr basis = build_basis(33, 0.5, 14);
  const FBCoeffs c = expand(smooth_test_image(33), basis);
  ViewGraph g(20);
  for (int i = 0; i < 20; ++i) g.add_edge(i, (i + 1) % 20, 0.0);
  const std::vector<FBCoeffs> stack(20, c);
  const DenoiseResult r = denoise_stack(stack, {}, g.symmetrized(), {FilterKind::kMfvdm4, 0});
  EXPECT_TRUE(r.ctfs.empty());
  for (const FBCoeffs& out : r.images) EXPECT_LT((out.values() - c.values()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(DenoiseStack, TransportUndoesRotation) {
  const RotatedCopies rc = rotated_copies(60, 6, 7);
  const DenoiseResult r = denoise_stack(rc.coeffs, rc.coeffs, rc.graph, {FilterKind::kMfvdm4, 0});
  for (std::size_t i = 0; i < rc.coeffs.size(); ++i) {
    EXPECT_LT((r.images[i].values() - rc.coeffs[i].values()).cwiseAbs().maxCoeff(), 1e-8) << i;
    EXPECT_LT((r.ctfs[i].values() - rc.coeffs[i].values()).cwiseAbs().maxCoeff(), 1e-8) << i;
  }
}

TEST(DenoiseStack, ReducesCoefficientErrorOnNoisyCopies) {
  const RotatedCopies rc = rotated_copies(200, 10, 8);
  const ImageStack clean = reconstruct_denoised(rc.coeffs);
  const ImageStack noisy = add_noise(clean, 0.05, 8, {});
  std::vector<FBCoeffs> noisy_coeffs;
  for (const Image& im : noisy) noisy_coeffs.push_back(expand(im, rc.basis));
  const DenoiseResult r = denoise_stack(noisy_coeffs, {}, rc.graph, {FilterKind::kMfvdm2, 50});
  double before = 0, after = 0;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    before += (noisy_coeffs[i].values() - rc.coeffs[i].values()).squaredNorm();
    after += (r.images[i].values() - rc.coeffs[i].values()).squaredNorm();
  }
  EXPECT_LT(after, before);
}

TEST(DenoiseStack, FrequencyBlocksAreDecoupled) {
  const RotatedCopies rc = rotated_copies(40, 5, 9);
  std::vector<FBCoeffs> perturbed = rc.coeffs;
  CounterRng rng(9, 4);
  for (FBCoeffs& c : perturbed)
    for (int q = 1; q <= rc.basis->radial_count(3); ++q) c.ref(3, q) += Complex(rng.normal(), rng.normal());
  const FilterSpec f{FilterKind::kMfvdm2, 20};
  const DenoiseResult a = denoise_stack(rc.coeffs, {}, rc.graph, f);
  const DenoiseResult b = denoise_stack(perturbed, {}, rc.graph, f);
  for (int k = 0; k <= rc.basis->k_max(); ++k) {
    const double diff = (coefficient_block(a.images, k) - coefficient_block(b.images, k)).cwiseAbs().maxCoeff();
    if (k == 3)
      EXPECT_GT(diff, 1e-3);
    else
      EXPECT_EQ(diff, 0.0) << k;
  }
}

TEST(DenoiseStack, Errors) {
  const RotatedCopies rc = rotated_copies(10, 3, 10);
  EXPECT_THROW(denoise_stack(rc.coeffs, {}, ViewGraph(9), {FilterKind::kMfvdm2, 5}), Error);
  EXPECT_THROW(denoise_stack(rc.coeffs, {rc.source}, rc.graph, {FilterKind::kMfvdm2, 5}), Error);
  EXPECT_THROW(denoise_stack(rc.coeffs, {}, rc.graph, {FilterKind::kMfvdm2, 11}), Error);
  ViewGraph isolated = rc.graph;
  isolated = ViewGraph(10);
  isolated.add_edge(0, 1, 0.0);
  EXPECT_THROW(denoise_stack(rc.coeffs, {}, isolated.symmetrized(), {FilterKind::kMfvdm2, 5}), Error);
}

TEST(ReconstructDenoised, RoundTripAndFinite) {
  const RotatedCopies rc = rotated_copies(8, 2, 11);
  const ImageStack images = reconstruct_denoised(rc.coeffs);
  for (std::size_t i = 0; i < images.size(); ++i) {
    EXPECT_TRUE(images[i].allFinite());
    EXPECT_LT((expand(images[i], rc.basis).values() - rc.coeffs[i].values()).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(CtfCorrect, IdentityCtf) {
  const Image img = smooth_test_image(33);
  CtfCorrectionOptions o;
  o.epsilon = 1e-14;
  EXPECT_LT((ctf_correct(img, Image::Ones(33, 33), o) - img).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(CtfCorrect, ZerosStayFinite) {
  const CTFProfile p{2.0, 0.025, 2.0, 11.0, 0.07};
  Image c = ctf_grid(p, 33);
  c(16, 20) = 0.0;
  CtfCorrectionOptions o;
  o.epsilon = 1e-2;
  EXPECT_TRUE(ctf_correct(smooth_test_image(33), c, o).allFinite());
  EXPECT_TRUE(ctf_correct(smooth_test_image(33), c).allFinite());
  o.regularized = false;
  EXPECT_TRUE(ctf_correct(smooth_test_image(33), c, o).allFinite());
}

TEST(CtfCorrect, RecoversImageAwayFromZeros) {
  const CTFProfile p{2.5, 0.025, 2.0, 11.0, 0.07};
  const Image c = ctf_grid(p, 33);
  const Image img = smooth_test_image(33);
  const Image observed = apply_fourier_filter(img, c);
  CtfCorrectionOptions o;
  o.regularized = false;
  const FourierGrid out = fft::forward2(ctf_correct(observed, c.cwiseAbs(), o));
  const FourierGrid ref = fft::forward2(img);
  double err = 0, norm = 0;
  for (int r = 0; r < 33; ++r)
    for (int col = 0; col < 33; ++col) {
      if (std::abs(c(r, col)) < 0.05) continue;
      const Complex expected = (c(r, col) < 0 ? -1.0 : 1.0) * ref(r, col);
      err += std::norm(out(r, col) - expected);
      norm += std::norm(ref(r, col));
    }
  EXPECT_LT(std::sqrt(err / norm), 0.1);
}

TEST(CtfCorrect, Errors) {
  CtfCorrectionOptions o;
  o.epsilon = 0.0;
  EXPECT_THROW(ctf_correct(Image::Ones(5, 5), Image::Ones(5, 5), o), Error);
  o.epsilon = -1.0;
  EXPECT_THROW(ctf_correct(Image::Ones(5, 5), Image::Ones(5, 5), o), Error);
  EXPECT_THROW(ctf_correct(Image::Ones(5, 5), Image::Ones(5, 4)), Error);
}

TEST(Recolor, FlatSpectrumIsIdentity) {
  const Image img = smooth_test_image(33);
  EXPECT_LT((recolor(img, Image::Ones(33, 33)) - img).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW(recolor(img, -Image::Ones(33, 33)), Error);
}

}  // namespace
}  // namespace mfvdm
