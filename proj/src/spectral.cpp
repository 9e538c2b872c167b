#include "fpls/spectral.hpp"

#include <cmath>

namespace fpls {

namespace {

// Keeps the strictly positive part of an ascending eigenvalue vector,
// descending, with a relative floor of 1e-12.
template <typename Keep>
void keep_nonzero(const Eigen::VectorXd& ascending, Keep&& keep) {
    const double cutoff = 1e-12 * std::max(0.0, ascending.cwiseAbs().maxCoeff());
    for (Eigen::Index k = ascending.size() - 1; k >= 0; --k) {
        if (ascending[k] <= cutoff) break;
        keep(k, ascending[k]);
    }
}

// n x n Gram route: eigenfunction j is X^T (D u_j) rescaled to unit grid
// norm, D the per-observation weight used to form the Gram matrix.
OperatorSpectrum gram_route(const Dataset& d, const Eigen::MatrixXd& gram,
                            const Eigen::VectorXd& obs_weight) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    OperatorSpectrum spec;
    std::vector<double> kept;
    keep_nonzero(eig.eigenvalues(), [&](Eigen::Index k, double lambda) {
        Eigen::VectorXd u = eig.eigenvectors().col(k);
        if (obs_weight.size() > 0) u = u.cwiseProduct(obs_weight);
        FunctionVec f(d.grid, d.x.transpose() * u);
        const double fn = norm(f);
        if (fn <= 0.0) return;
        f.values /= fn;
        kept.push_back(lambda);
        spec.eigenfunctions.push_back(std::move(f));
    });
    spec.eigenvalues = Eigen::Map<const Eigen::VectorXd>(kept.data(), kept.size());
    return spec;
}

// T x T dense-operator route, cheaper when t_count < n. The operator matrix
// (w/n) X^T D^2 X is Euclidean-symmetric for uniform weights and has the
// same nonzero spectrum as the Gram matrix; Euclidean-orthonormal
// eigenvectors rescale by 1/sqrt(w) to unit grid norm.
OperatorSpectrum dense_route(const Dataset& d, const Eigen::VectorXd& obs_weight) {
    const double n = static_cast<double>(d.n());
    Eigen::MatrixXd op;
    if (obs_weight.size() > 0) {
        Eigen::MatrixXd wx = obs_weight.asDiagonal() * d.x;
        op = wx.transpose() * wx * (d.grid.weight / n);
    } else {
        op = d.x.transpose() * d.x * (d.grid.weight / n);
    }
    op = ((op + op.transpose()) * 0.5).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(op);
    OperatorSpectrum spec;
    std::vector<double> kept;
    const double rescale = 1.0 / std::sqrt(d.grid.weight);
    keep_nonzero(eig.eigenvalues(), [&](Eigen::Index k, double lambda) {
        kept.push_back(lambda);
        spec.eigenfunctions.emplace_back(d.grid, eig.eigenvectors().col(k) * rescale);
    });
    spec.eigenvalues = Eigen::Map<const Eigen::VectorXd>(kept.data(), kept.size());
    return spec;
}

OperatorSpectrum operator_spectrum(const Dataset& d, const Eigen::MatrixXd* gram,
                                   const Eigen::VectorXd& obs_weight) {
    if (d.grid.t_count < d.n()) return dense_route(d, obs_weight);
    if (gram) return gram_route(d, *gram, obs_weight);
    const double n = static_cast<double>(d.n());
    Eigen::MatrixXd g = d.x * d.x.transpose() * (d.grid.weight / n);
    if (obs_weight.size() > 0)
        g = obs_weight.asDiagonal() * g * obs_weight.asDiagonal();
    g = ((g + g.transpose()) * 0.5).eval();
    return gram_route(d, g, obs_weight);
}

}  // namespace

OperatorSpectrum spectrum_k_hat(const EmpiricalMoments& moments) {
    return operator_spectrum(moments.dataset, &moments.gram, Eigen::VectorXd());
}

FunctionVec pca_estimate(const OperatorSpectrum& spectrum, const FunctionVec& r_hat, int m) {
    if (m < 1 || m > spectrum.rank())
        throw std::invalid_argument("pca_estimate: m outside the retained rank");
    FunctionVec beta = FunctionVec::zero(r_hat.grid);
    for (int j = 0; j < m; ++j) {
        const FunctionVec& v = spectrum.eigenfunctions[j];
        beta.values += (inner(r_hat, v) / spectrum.eigenvalues[j]) * v.values;
    }
    return beta;
}

FunctionVec pca_estimate(const EmpiricalMoments& moments, int m) {
    return pca_estimate(spectrum_k_hat(moments), moments.r_hat, m);
}

OperatorSpectrum variance_spectrum(const Dataset& dataset, const FunctionVec& beta_hat) {
    Eigen::VectorXd eps = dataset.y - dataset.x * beta_hat.values * dataset.grid.weight;
    if (eps.cwiseAbs().maxCoeff() == 0.0) return OperatorSpectrum{};
    return operator_spectrum(dataset, nullptr, eps);
}

}  // namespace fpls
