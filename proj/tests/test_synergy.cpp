#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "gaitprior/synergy.hpp"

using namespace gaitprior;

namespace {

Matrix random_matrix(int rows, int cols, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-scale, scale);
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = dist(rng);
  return m;
}

// reference eigenvalue ratios through Eigen's solver, descending
Vector reference_ratios(const Matrix& actions) {
  Matrix centered = actions.rowwise() - actions.colwise().mean();
  Matrix cov = centered.transpose() * centered / static_cast<double>(actions.rows() - 1);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(cov);
  Vector evs = solver.eigenvalues();
  std::vector<double> sorted(evs.data(), evs.data() + evs.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double total = 0.0;
  for (double v : sorted) total += std::max(v, 0.0);
  Vector ratios(evs.size());
  for (int i = 0; i < evs.size(); ++i)
    ratios(i) = total > 0.0 ? std::max(sorted[i], 0.0) / total : 1.0 / evs.size();
  return ratios;
}

}  // namespace

//jacobi

TEST_CASE("jacobi matches Eigen on random symmetric matrices") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Matrix a = random_matrix(6, 6, seed);
    Matrix sym = 0.5 * (a + a.transpose());
    Matrix vecs;
    Vector vals = jacobi_eigendecomposition(sym, vecs);

    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
    std::vector<double> ours(vals.data(), vals.data() + vals.size());
    std::vector<double> ref(solver.eigenvalues().data(), solver.eigenvalues().data() + 6);
    std::sort(ours.begin(), ours.end());
    std::sort(ref.begin(), ref.end());
    for (int i = 0; i < 6; ++i) CHECK(ours[i] == doctest::Approx(ref[i]).epsilon(1e-9));

    CHECK((vecs.transpose() * vecs - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-10);
    for (int i = 0; i < 6; ++i) {
      Vector residual = sym * vecs.col(i) - vals(i) * vecs.col(i);
      CHECK(residual.cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("jacobi rejects non-square input") {
  Matrix rect = Matrix::Zero(3, 4);
  Matrix vecs;
  CHECK_THROWS_AS(jacobi_eigendecomposition(rect, vecs), std::invalid_argument);
}

//pca

TEST_CASE("rank one data concentrates all variance in one component") {
  Vector direction(3);
  direction << 2.0, -1.0, 0.5;
  Matrix actions(40, 3);
  for (int t = 0; t < 40; ++t) actions.row(t) = std::sin(0.37 * t) * direction.transpose();
  PcaResult pca = compute_pca(actions);
  CHECK(pca.explained_variance_ratio(0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(pca.explained_variance_ratio(1) == doctest::Approx(0.0).epsilon(1e-9));
  Vector unit = direction.normalized();
  CHECK(std::abs(pca.components.col(0).dot(unit)) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("pca ratios match an Eigen reference on random data") {
  Matrix actions = random_matrix(60, 5, 99);
  PcaResult pca = compute_pca(actions);
  Vector ref = reference_ratios(actions);
  for (int i = 0; i < 5; ++i)
    CHECK(pca.explained_variance_ratio(i) == doctest::Approx(ref(i)).epsilon(1e-9));
}

TEST_CASE("ratios are descending, non-negative, and sum to one") {
  Matrix actions = random_matrix(30, 4, 7);
  PcaResult pca = compute_pca(actions);
  double sum = 0.0;
  for (int i = 0; i < 4; ++i) {
    CHECK(pca.explained_variance_ratio(i) >= 0.0);
    if (i > 0)
      CHECK(pca.explained_variance_ratio(i) <= pca.explained_variance_ratio(i - 1) + 1e-12);
    sum += pca.explained_variance_ratio(i);
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("components are orthonormal with positive dominant entries") {
  Matrix actions = random_matrix(50, 4, 13);
  PcaResult pca = compute_pca(actions);
  CHECK((pca.components.transpose() * pca.components - Matrix::Identity(4, 4))
            .cwiseAbs()
            .maxCoeff() < 1e-10);
  for (int c = 0; c < 4; ++c) {
    int argmax = 0;
    pca.components.col(c).cwiseAbs().maxCoeff(&argmax);
    CHECK(pca.components(argmax, c) > 0.0);
  }
}

TEST_CASE("projecting and back-projecting reconstructs the data") {
  Matrix actions = random_matrix(25, 4, 31);
  PcaResult pca = compute_pca(actions);
  Matrix centered = actions.rowwise() - pca.mean.transpose();
  Matrix reconstructed =
      (centered * pca.components) * pca.components.transpose();
  CHECK((reconstructed - centered).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("planted rank-4 structure in 8 dims is recovered") {
  int frames = 60;
  Matrix latents(frames, 4);
  double two_pi = 2.0 * std::acos(-1.0);
  for (int t = 0; t < frames; ++t) {
    latents(t, 0) = std::sin(two_pi * 1.0 * t / frames);
    latents(t, 1) = std::sin(two_pi * 2.0 * t / frames + 0.4);
    latents(t, 2) = std::sin(two_pi * 3.0 * t / frames + 1.1);
    latents(t, 3) = std::sin(two_pi * 5.0 * t / frames + 2.0);
  }
  Matrix mixing = random_matrix(4, 8, 5, 0.2);
  Matrix actions = latents * mixing;
  PcaResult pca = compute_pca(actions);
  double top4 = pca.explained_variance_ratio.head(4).sum();
  CHECK(top4 >= 0.999);
  CHECK(dims_for_variance(pca, 0.999) <= 4);
}

TEST_CASE("isotropic noise spreads variance evenly") {
  Matrix actions = random_matrix(20000, 4, 1234);
  PcaResult pca = compute_pca(actions);
  for (int i = 0; i < 4; ++i)
    CHECK(pca.explained_variance_ratio(i) == doctest::Approx(0.25).epsilon(0.2));
}

TEST_CASE("constant data falls back to uniform ratios") {
  Matrix actions = Matrix::Ones(10, 3) * 0.5;
  PcaResult pca = compute_pca(actions);
  for (int i = 0; i < 3; ++i)
    CHECK(pca.explained_variance_ratio(i) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(pca.mean(0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("pca input validation") {
  CHECK_THROWS_AS(compute_pca(Matrix::Zero(1, 3)), std::invalid_argument);
  Matrix bad = Matrix::Zero(5, 2);
  bad(2, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(compute_pca(bad), std::invalid_argument);
}

//latent size rules

TEST_CASE("suggest_latent_dim halves the action space rounding up") {
  CHECK(suggest_latent_dim(12) == 6);
  CHECK(suggest_latent_dim(7) == 4);
  CHECK(suggest_latent_dim(4) == 2);
  CHECK(suggest_latent_dim(1) == 1);
  CHECK_THROWS_AS(suggest_latent_dim(0), std::invalid_argument);
}

TEST_CASE("dims_for_variance walks the cumulative sum") {
  PcaResult pca;
  pca.explained_variance_ratio = Vector(3);
  pca.explained_variance_ratio << 0.6, 0.3, 0.1;
  CHECK(dims_for_variance(pca, 0.5) == 1);
  CHECK(dims_for_variance(pca, 0.6) == 1);
  CHECK(dims_for_variance(pca, 0.61) == 2);
  CHECK(dims_for_variance(pca, 0.97) == 3);
  CHECK(dims_for_variance(pca, 1.0) == 3);
  CHECK_THROWS_AS(dims_for_variance(pca, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(dims_for_variance(pca, 1.5), std::invalid_argument);
}
