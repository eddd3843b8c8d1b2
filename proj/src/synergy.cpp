#include "gaitprior/synergy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gaitprior {

Vector jacobi_eigendecomposition(Matrix a, Matrix& eigenvectors) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("jacobi: matrix must be square");
  eigenvectors = Matrix::Identity(n, n);
  if (n == 1) return a.diagonal();

  const int max_sweeps = 64;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    }
    if (off < 1e-30 * std::max(1.0, a.diagonal().squaredNorm())) break;

    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) < 1e-300) continue;
        // Rotation angle that zeroes a(p,q), numerically stable form.
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = eigenvectors(k, p);
          const double vkq = eigenvectors(k, q);
          eigenvectors(k, p) = c * vkp - s * vkq;
          eigenvectors(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  return a.diagonal();
}

PcaResult compute_pca(const Matrix& actions) {
  const Eigen::Index n = actions.rows();
  const Eigen::Index d = actions.cols();
  if (n < 2) throw std::invalid_argument("compute_pca: need at least 2 rows");
  if (!actions.allFinite()) throw std::invalid_argument("compute_pca: non-finite input");

  PcaResult result;
  result.mean = actions.colwise().mean().transpose();
  Matrix centered = actions.rowwise() - result.mean.transpose();
  Matrix covariance = (centered.transpose() * centered) / static_cast<double>(n - 1);

  Matrix vectors;
  Vector eigenvalues = jacobi_eigendecomposition(covariance, vectors);

  // Sort descending; equal eigenvalues keep their original column order.
  std::vector<Eigen::Index> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    return eigenvalues[i] > eigenvalues[j];
  });

  result.components = Matrix(d, d);
  Vector sorted_values(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    Vector col = vectors.col(order[k]);
    Eigen::Index argmax = 0;
    col.cwiseAbs().maxCoeff(&argmax);
    if (col[argmax] < 0.0) col = -col;
    result.components.col(k) = col;
    sorted_values[k] = std::max(0.0, eigenvalues[order[k]]);
  }

  const double total = sorted_values.sum();
  if (total > 0.0) {
    result.explained_variance_ratio = sorted_values / total;
  } else {
    // Zero-variance input: every direction explains an equal share.
    result.explained_variance_ratio = Vector::Constant(d, 1.0 / static_cast<double>(d));
  }
  return result;
}

int suggest_latent_dim(int a_full) {
  if (a_full < 1) throw std::invalid_argument("suggest_latent_dim: a_full must be >= 1");
  return (a_full + 1) / 2;
}

int dims_for_variance(const PcaResult& pca, double threshold) {
  if (!(threshold > 0.0) || threshold > 1.0) {
    throw std::invalid_argument("dims_for_variance: threshold must be in (0, 1]");
  }
  double cumulative = 0.0;
  const Eigen::Index d = pca.explained_variance_ratio.size();
  for (Eigen::Index k = 0; k < d; ++k) {
    cumulative += pca.explained_variance_ratio[k];
    if (cumulative >= threshold - 1e-12) return static_cast<int>(k) + 1;
  }
  return static_cast<int>(d);
}

}  // namespace gaitprior
