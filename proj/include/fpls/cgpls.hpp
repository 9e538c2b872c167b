#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fpls/fspace.hpp"

namespace fpls {

struct IllConditioned : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Early-stopping configuration. Defaults follow the rule tau=1.01,
// delta=0.1, xi=0.01, k_max=10; m_cap is additionally capped at n.
struct StoppingConfig {
    double tau = 1.01;
    double delta = 0.1;
    double xi = 0.01;
    int k_max = 10;
    int m_cap = 100;
    double breakdown_tol = 1e-14;
};

// Trajectory of CG iterates beta_0..beta_M with residual norms ||r - K beta_m||.
struct PlsFit {
    std::vector<FunctionVec> betas;
    std::vector<double> residual_norms;
    std::optional<int> m_selected;
    double threshold = 0.0;
    double sigma2_hat = 0.0;
    std::vector<std::string> warnings;

    int max_m() const { return static_cast<int>(betas.size()) - 1; }

    const FunctionVec& beta_at(int m) const { return betas.at(static_cast<std::size_t>(m)); }

    // Selected iterate if early stopping ran, otherwise the last one.
    const FunctionVec& selected_beta() const {
        return m_selected ? betas.at(static_cast<std::size_t>(*m_selected)) : betas.back();
    }
};

// Conjugate-gradient PLS on the normal equations K_hat beta = r_hat.
// Records every iterate up to m_max; stops earlier on numerical exhaustion
// of the Krylov space, or as soon as the residual norm drops to
// stop_threshold when one is given.
PlsFit cg_pls(const EmpiricalMoments& moments, int m_max, double breakdown_tol = 1e-14,
              double stop_threshold = -1.0);

// Dense Krylov least-squares solve of min ||r - K b|| over
// span{r, Kr, ..., K^{m-1} r} via the Hankel normal equations.
// Test oracle for cg_pls; throws IllConditioned when the Hankel system's
// condition estimate exceeds 1e12.
FunctionVec krylov_oracle(const EmpiricalMoments& moments, int m);

// tau * sigma * sqrt(2 E||X||^2 / (delta n)) with the sample plug-in for E||X||^2.
double stopping_threshold(const Dataset& dataset, double sigma2, const StoppingConfig& config);

// Iterative sigma^2 estimation: refit the early-stopped PLS and the residual
// variance until the change falls below xi or k_max is reached. Returns the
// final sigma^2 estimate and the final fit.
std::pair<double, PlsFit> estimate_sigma2_iterative(const EmpiricalMoments& moments,
                                                    const StoppingConfig& config,
                                                    const FunctionVec& pilot);

// Pilot slope for the sigma^2 iteration: PCA estimator with the number of
// components selected by GCV over m = 1..min(20, n-1, rank).
FunctionVec pca_gcv_pilot(const EmpiricalMoments& moments);

// Full adaptive fit: center, pilot, iterate sigma^2, select m_hat.
PlsFit fit_early_stopped(const Dataset& dataset, const StoppingConfig& config = {});
PlsFit fit_early_stopped(const EmpiricalMoments& moments, const StoppingConfig& config = {});

}  // namespace fpls
