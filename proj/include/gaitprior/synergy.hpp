#pragma once

#include "gaitprior/nn.hpp"

namespace gaitprior {

/// Principal component analysis of an action matrix. Columns of `components`
/// are unit-length principal directions, ordered by descending explained
/// variance; the sign of each column is fixed so its largest-magnitude entry
/// is positive.
struct PcaResult {
  Vector explained_variance_ratio;  // descending, non-negative, sums to 1
  Matrix components;                // action_dim x action_dim, orthonormal
  Vector mean;                      // column means of the input
};

/// Eigendecomposition of the 1/(N-1)-normalized covariance of mean-centered
/// rows. Requires at least two finite rows.
PcaResult compute_pca(const Matrix& actions);

/// ceil(a_full / 2), the latent size rule used throughout the pipeline.
int suggest_latent_dim(int a_full);

/// Smallest k whose cumulative explained variance reaches `threshold`.
int dims_for_variance(const PcaResult& pca, double threshold);

/// Cyclic Jacobi sweeps on a symmetric matrix. Returns eigenvalues (not
/// sorted) and fills `eigenvectors` columnwise. Exposed for reuse and tests.
Vector jacobi_eigendecomposition(Matrix symmetric, Matrix& eigenvectors);

}  // namespace gaitprior
