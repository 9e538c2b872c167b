#include "fpls/cgpls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fpls/spectral.hpp"

namespace fpls {

PlsFit cg_pls(const EmpiricalMoments& moments, int m_max, double breakdown_tol,
              double stop_threshold) {
    if (m_max < 1) throw std::invalid_argument("cg_pls: m_max must be >= 1");
    const Grid& grid = moments.dataset.grid;

    PlsFit fit;
    fit.betas.push_back(FunctionVec::zero(grid));
    fit.residual_norms.push_back(norm(moments.r_hat));

    if (fit.residual_norms[0] == 0.0) {
        fit.warnings.push_back("breakdown: zero right-hand side, only beta_0 available");
        return fit;
    }
    if (stop_threshold >= 0.0 && fit.residual_norms[0] <= stop_threshold) return fit;

    FunctionVec beta = FunctionVec::zero(grid);
    FunctionVec e = moments.r_hat;
    FunctionVec d = e;
    FunctionVec ke = apply_k_hat(moments, e);
    FunctionVec kd = ke;
    double curv = inner(e, ke);
    const double curv0 = curv;
    const double kd0_sq = inner(kd, kd);

    for (int j = 0; j < m_max; ++j) {
        const double kd_sq = inner(kd, kd);
        if (curv <= breakdown_tol * curv0 || kd_sq <= breakdown_tol * breakdown_tol * kd0_sq)
            break;  // Krylov space numerically exhausted
        const double alpha = curv / kd_sq;
        beta.values += alpha * d.values;
        e.values -= alpha * kd.values;
        ke = apply_k_hat(moments, e);
        const double curv_next = inner(e, ke);
        const double gamma = curv_next / curv;
        d.values = e.values + gamma * d.values;
        kd.values = ke.values + gamma * kd.values;  // K d_{j+1} without an extra apply
        curv = curv_next;

        fit.betas.push_back(beta);
        fit.residual_norms.push_back(norm(e));
        if (stop_threshold >= 0.0 && fit.residual_norms.back() <= stop_threshold) break;
    }
    return fit;
}

FunctionVec krylov_oracle(const EmpiricalMoments& moments, int m) {
    if (m < 1) throw std::invalid_argument("krylov_oracle: m must be >= 1");
    // k_pows[j] = K^j r, j = 0..m
    std::vector<FunctionVec> k_pows;
    k_pows.reserve(m + 1);
    k_pows.push_back(moments.r_hat);
    for (int j = 1; j <= m; ++j) k_pows.push_back(apply_k_hat(moments, k_pows.back()));

    Eigen::MatrixXd hankel(m, m);
    Eigen::VectorXd rhs(m);
    for (int j = 1; j <= m; ++j) {
        rhs[j - 1] = inner(k_pows[j], moments.r_hat);
        for (int l = 1; l <= m; ++l) hankel(j - 1, l - 1) = inner(k_pows[j], k_pows[l]);
    }

    // Jacobi scaling: equilibrate the basis norms before assessing and
    // solving; the solution alpha is recovered by rescaling.
    Eigen::VectorXd d = hankel.diagonal().cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd scaled = d.asDiagonal() * hankel * d.asDiagonal();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(scaled);
    const double emax = eig.eigenvalues().cwiseAbs().maxCoeff();
    const double emin = eig.eigenvalues().cwiseAbs().minCoeff();
    if (!d.allFinite() || !(emin > 0.0) || emax / emin > 1e12)
        throw IllConditioned("krylov_oracle: Hankel system condition estimate exceeds 1e12");

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
    Eigen::VectorXd srhs = d.asDiagonal() * rhs;
    Eigen::VectorXd z = qr.solve(srhs);
    // Iterative refinement with extended-precision residuals buys back the
    // digits the conditioning costs a plain solve.
    for (int pass = 0; pass < 3; ++pass) {
        Eigen::VectorXd resid(m);
        for (int j = 0; j < m; ++j) {
            long double acc = static_cast<long double>(srhs[j]);
            for (int l = 0; l < m; ++l)
                acc -= static_cast<long double>(scaled(j, l)) * static_cast<long double>(z[l]);
            resid[j] = static_cast<double>(acc);
        }
        z += qr.solve(resid);
    }
    Eigen::VectorXd coeffs = d.asDiagonal() * z;
    FunctionVec beta = FunctionVec::zero(moments.dataset.grid);
    for (int j = 0; j < m; ++j) beta.values += coeffs[j] * k_pows[j].values;
    return beta;
}

double stopping_threshold(const Dataset& dataset, double sigma2, const StoppingConfig& config) {
    if (sigma2 <= 0.0) throw std::invalid_argument("stopping_threshold: sigma2 must be positive");
    const double n = static_cast<double>(dataset.n());
    return config.tau * std::sqrt(sigma2) *
           std::sqrt(2.0 * mean_squared_norm(dataset) / (config.delta * n));
}

namespace {

double residual_variance(const Dataset& d, const FunctionVec& beta) {
    Eigen::VectorXd fitted = d.x * beta.values * d.grid.weight;
    return (d.y - fitted).squaredNorm() / static_cast<double>(d.n());
}

// First m with residual <= threshold; argmin of the residual curve if the
// threshold is never met (floating point can keep the curve above zero).
void select_m(PlsFit& fit, double threshold) {
    fit.threshold = threshold;
    fit.m_selected.reset();
    for (std::size_t i = 0; i < fit.residual_norms.size(); ++i) {
        if (fit.residual_norms[i] <= threshold) {
            fit.m_selected = static_cast<int>(i);
            return;
        }
    }
    const auto argmin =
        std::min_element(fit.residual_norms.begin(), fit.residual_norms.end());
    fit.m_selected = static_cast<int>(argmin - fit.residual_norms.begin());
    fit.warnings.push_back("NoStop: threshold never met, selected the residual-curve argmin");
}

}  // namespace

FunctionVec pca_gcv_pilot(const EmpiricalMoments& moments) {
    const Dataset& d = moments.dataset;
    const auto n = d.n();
    OperatorSpectrum spec = spectrum_k_hat(moments);
    const int rank = static_cast<int>(spec.eigenvalues.size());
    const int m_max = std::min<int>({20, static_cast<int>(n) - 1, rank});

    FunctionVec beta = FunctionVec::zero(d.grid);
    Eigen::VectorXd fitted = Eigen::VectorXd::Zero(n);
    FunctionVec best = beta;
    double best_gcv = std::numeric_limits<double>::infinity();
    for (int m = 1; m <= m_max; ++m) {
        const FunctionVec& v = spec.eigenfunctions[m - 1];
        const double coeff = inner(moments.r_hat, v) / spec.eigenvalues[m - 1];
        beta.values += coeff * v.values;
        fitted += d.x * v.values * (d.grid.weight * coeff);
        const double rss = (d.y - fitted).squaredNorm();
        const double denom = 1.0 - static_cast<double>(m) / static_cast<double>(n);
        if (denom <= 0.0) break;
        const double gcv = rss / static_cast<double>(n) / (denom * denom);
        if (gcv < best_gcv) {
            best_gcv = gcv;
            best = beta;
        }
    }
    return best;
}

std::pair<double, PlsFit> estimate_sigma2_iterative(const EmpiricalMoments& moments,
                                                    const StoppingConfig& config,
                                                    const FunctionVec& pilot) {
    const Dataset& d = moments.dataset;
    const int m_cap = std::min<int>(config.m_cap, static_cast<int>(d.n()));

    double sigma2 = residual_variance(d, pilot);
    PlsFit fit;
    bool converged = false;
    for (int k = 0; k < config.k_max; ++k) {
        const double threshold =
            sigma2 > 0.0 ? stopping_threshold(d, sigma2, config) : 0.0;
        fit = cg_pls(moments, m_cap, config.breakdown_tol, threshold);
        select_m(fit, threshold);
        const double sigma2_next = residual_variance(d, fit.selected_beta());
        const bool done = std::abs(sigma2_next - sigma2) <= config.xi;
        sigma2 = sigma2_next;
        if (done) {
            converged = true;
            break;
        }
    }
    fit.sigma2_hat = sigma2;
    if (!converged)
        fit.warnings.push_back("NonConvergence: sigma2 iteration hit k_max without meeting xi");
    return {sigma2, std::move(fit)};
}

PlsFit fit_early_stopped(const EmpiricalMoments& moments, const StoppingConfig& config) {
    FunctionVec pilot = pca_gcv_pilot(moments);
    return estimate_sigma2_iterative(moments, config, pilot).second;
}

PlsFit fit_early_stopped(const Dataset& dataset, const StoppingConfig& config) {
    const Dataset centered = dataset.centered ? dataset : center(dataset);
    return fit_early_stopped(compute_moments(centered), config);
}

}  // namespace fpls
