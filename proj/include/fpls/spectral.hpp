#pragma once

#include "fpls/fspace.hpp"

namespace fpls {

// Nonzero spectrum of a self-adjoint finite-rank operator on L2[0,1].
// Eigenvalues are non-increasing; eigenfunctions are orthonormal in the
// grid inner product.
struct OperatorSpectrum {
    Eigen::VectorXd eigenvalues;
    std::vector<FunctionVec> eigenfunctions;

    int rank() const { return static_cast<int>(eigenvalues.size()); }
};

// Spectrum of K_hat through whichever of the n x n Gram matrix or the
// t_count x t_count operator matrix is smaller; both carry the same nonzero
// eigenvalues. On the Gram route eigenfunction j is sum_i u_ij X_i rescaled
// to unit grid norm. Eigenvalues below 1e-12 of the largest are dropped.
OperatorSpectrum spectrum_k_hat(const EmpiricalMoments& moments);

// Spectral cut-off estimator sum_{j<=m} <r_hat, v_j>/lambda_j * v_j.
FunctionVec pca_estimate(const OperatorSpectrum& spectrum, const FunctionVec& r_hat, int m);
FunctionVec pca_estimate(const EmpiricalMoments& moments, int m);

// Spectrum of V_hat = (1/n) sum_i eps_i^2 X_i (x) X_i with plug-in
// residuals eps_i = y_i - <X_i, beta_hat>, via the weighted Gram matrix.
OperatorSpectrum variance_spectrum(const Dataset& dataset, const FunctionVec& beta_hat);

}  // namespace fpls
