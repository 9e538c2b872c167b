#include "fpls/inference.hpp"

#include <algorithm>
#include <cmath>

#include "fpls/rng.hpp"

namespace fpls {

double test_statistic(const EmpiricalMoments& moments, const FunctionVec& beta_m,
                      const FunctionVec& b) {
    FunctionVec diff(beta_m.grid, beta_m.values - b.values);
    FunctionVec kd = apply_k_hat(moments, diff);
    return static_cast<double>(moments.dataset.n()) * inner(kd, kd);
}

std::vector<double> simulate_weighted_chi2(const OperatorSpectrum& omega, int n_sims,
                                           std::uint64_t seed, int max_terms) {
    if (omega.rank() == 0)
        throw std::invalid_argument("simulate_weighted_chi2: empty spectrum");
    if (n_sims < 1) throw std::invalid_argument("simulate_weighted_chi2: n_sims must be >= 1");
    const int terms = std::min(max_terms, omega.rank());
    std::vector<double> draws(n_sims);
    for (int i = 0; i < n_sims; ++i) {
        CounterRng rng(derive_key(seed, static_cast<std::uint64_t>(i), 0x5157u));
        double s = 0.0;
        for (int j = 0; j < terms; ++j) {
            const double z = rng.next_normal();
            s += omega.eigenvalues[j] * z * z;
        }
        draws[i] = s;
    }
    return draws;
}

double empirical_quantile(std::vector<double> sample, double prob) {
    if (sample.empty()) throw std::invalid_argument("empirical_quantile: empty sample");
    std::sort(sample.begin(), sample.end());
    const auto n = static_cast<std::ptrdiff_t>(sample.size());
    auto k = static_cast<std::ptrdiff_t>(std::ceil(prob * static_cast<double>(n))) - 1;
    k = std::clamp<std::ptrdiff_t>(k, 0, n - 1);
    return sample[static_cast<std::size_t>(k)];
}

double critical_value_simulated(const OperatorSpectrum& omega, double alpha, int n_sims,
                                std::uint64_t seed, int max_terms) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("critical_value_simulated: alpha must be in (0,1)");
    return empirical_quantile(simulate_weighted_chi2(omega, n_sims, seed, max_terms),
                              1.0 - alpha);
}

namespace {

double p_value_from_sample(const std::vector<double>& draws, double t_n) {
    std::size_t exceed = 0;
    for (double v : draws)
        if (v > t_n) ++exceed;
    return static_cast<double>(exceed + 1) / static_cast<double>(draws.size() + 1);
}

std::vector<double> bootstrap_sample(const Dataset& dataset, int m, int n_boot,
                                     std::uint64_t seed, std::vector<std::string>* warnings) {
    const Dataset base = dataset.centered ? dataset : center(dataset);
    const EmpiricalMoments moments = compute_moments(base);
    const PlsFit full_fit = cg_pls(moments, m);
    const FunctionVec& beta_full = full_fit.betas.back();
    const auto n = base.n();

    std::vector<double> stats;
    stats.reserve(n_boot);
    std::size_t skipped = 0;
    for (int b = 0; b < n_boot; ++b) {
        CounterRng rng(derive_key(seed, static_cast<std::uint64_t>(b), 0xb007u));
        Eigen::MatrixXd xb(n, base.grid.t_count);
        Eigen::VectorXd yb(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            auto idx = static_cast<Eigen::Index>(rng.next_uniform() * static_cast<double>(n));
            idx = std::min(idx, n - 1);
            xb.row(i) = base.x.row(idx);
            yb[i] = base.y[idx];
        }
        try {
            Dataset resample = center(make_dataset(base.grid, std::move(xb), std::move(yb)));
            EmpiricalMoments mb = compute_moments(resample);
            PlsFit fit = cg_pls(mb, m);
            stats.push_back(test_statistic(mb, fit.betas.back(), beta_full));
        } catch (const std::exception&) {
            ++skipped;
        }
    }
    if (warnings && skipped > static_cast<std::size_t>(0.01 * n_boot))
        warnings->push_back("bootstrap: more than 1% of resamples skipped");
    if (stats.empty()) throw std::runtime_error("bootstrap: every resample failed");
    return stats;
}

// Weights for the simulated critical value. Caller-supplied weights take
// precedence; otherwise they are estimated from the variance operator. The
// variance estimate needs consistent residuals: the overfitted inference
// estimator interpolates r_hat, so its residuals (and with them the critical
// value) would collapse toward zero — plug in the early-stopped fit instead.
OperatorSpectrum critical_weights(const Dataset& centered, const EmpiricalMoments& moments,
                                  const InferenceConfig& config) {
    OperatorSpectrum omega;
    if (config.fixed_weights.size() > 0) {
        omega.eigenvalues = config.fixed_weights;
        omega.eigenfunctions.resize(static_cast<std::size_t>(config.fixed_weights.size()));
        return omega;
    }
    PlsFit var_fit = fit_early_stopped(moments);
    return variance_spectrum(centered, var_fit.selected_beta());
}

}  // namespace

double critical_value_bootstrap(const Dataset& dataset, int m, double alpha, int n_boot,
                                std::uint64_t seed, std::vector<std::string>* warnings) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("critical_value_bootstrap: alpha must be in (0,1)");
    if (n_boot < 1) throw std::invalid_argument("critical_value_bootstrap: n_boot must be >= 1");
    return empirical_quantile(bootstrap_sample(dataset, m, n_boot, seed, warnings), 1.0 - alpha);
}

TestOutcome run_test(const Dataset& dataset, const FunctionVec& b, std::uint64_t seed,
                     const InferenceConfig& config) {
    const Dataset centered = dataset.centered ? dataset : center(dataset);
    const EmpiricalMoments moments = compute_moments(centered);

    TestOutcome out;
    out.alpha = config.alpha;
    out.method = config.method;
    out.seed = seed;

    // Overfitted PLS: no early stopping, the CG breakdown check caps m at
    // the numerical rank.
    PlsFit fit = cg_pls(moments, config.m);
    out.m_used = fit.max_m();
    const FunctionVec& beta_m = fit.betas.back();
    out.t_n = test_statistic(moments, beta_m, b);

    if (config.method == CritMethod::SimulatedSpectrum) {
        OperatorSpectrum omega = critical_weights(centered, moments, config);
        std::vector<double> draws = simulate_weighted_chi2(omega, config.n_sims,
                                                           derive_key(seed, 0, 0xc217u),
                                                           config.crit_terms);
        out.critical_value = empirical_quantile(draws, 1.0 - config.alpha);
        out.p_value = p_value_from_sample(draws, out.t_n);
    } else {
        std::vector<double> stats = bootstrap_sample(centered, out.m_used, config.n_boot,
                                                     derive_key(seed, 0, 0xb007u),
                                                     &out.warnings);
        out.critical_value = empirical_quantile(stats, 1.0 - config.alpha);
        out.p_value = p_value_from_sample(stats, out.t_n);
    }
    out.reject = out.t_n > out.critical_value;

    const double fit_err =
        fit.residual_norms.back() * std::sqrt(static_cast<double>(centered.n()));
    if (out.critical_value > 0.0 && fit_err > 0.1 * std::sqrt(out.critical_value))
        out.warnings.push_back("fitting error not negligible at sqrt(n) scale; "
                               "asymptotic approximation may be poor");
    return out;
}

CoefficientGridSpec CoefficientGridSpec::uniform(int basis_size, double lo, double hi,
                                                 int n_points) {
    if (basis_size < 1) throw std::invalid_argument("grid spec: basis_size must be >= 1");
    if (n_points < 1) throw std::invalid_argument("grid spec: n_points must be >= 1");
    CoefficientGridSpec s;
    s.lo.assign(basis_size, lo);
    s.hi.assign(basis_size, hi);
    s.n_points.assign(basis_size, n_points);
    return s;
}

ConfidenceSetGrid confidence_set(const Dataset& dataset, const CoefficientGridSpec& grid_spec,
                                 double alpha, int m, std::uint64_t seed,
                                 const InferenceConfig& config) {
    const int basis_size = static_cast<int>(grid_spec.lo.size());
    if (basis_size < 1 || grid_spec.hi.size() != grid_spec.lo.size() ||
        grid_spec.n_points.size() != grid_spec.lo.size())
        throw std::invalid_argument("confidence_set: malformed grid spec");

    const Dataset centered = dataset.centered ? dataset : center(dataset);
    const EmpiricalMoments moments = compute_moments(centered);
    const double n = static_cast<double>(centered.n());

    ConfidenceSetGrid out;
    out.basis_size = basis_size;
    out.alpha = alpha;
    out.m_used = m;
    out.seed = seed;
    out.spec = grid_spec;

    PlsFit fit = cg_pls(moments, m);
    const FunctionVec& beta_m = fit.betas.back();
    OperatorSpectrum omega = critical_weights(centered, moments, config);
    out.critical_value = critical_value_simulated(omega, alpha, config.n_sims,
                                                  derive_key(seed, 0, 0xc217u),
                                                  config.crit_terms);

    // T_n(b) = n (c0 - 2 q.b + b' A b) with A, q, c0 built from K_hat applied
    // to the basis functions and to beta_m.
    FunctionVec k_beta = apply_k_hat(moments, beta_m);
    std::vector<FunctionVec> k_basis;
    for (int j = 1; j <= basis_size; ++j)
        k_basis.push_back(apply_k_hat(moments, cosine_basis(centered.grid, j)));
    Eigen::MatrixXd quad(basis_size, basis_size);
    Eigen::VectorXd lin(basis_size);
    for (int j = 0; j < basis_size; ++j) {
        lin[j] = inner(k_beta, k_basis[j]);
        for (int l = 0; l <= j; ++l)
            quad(j, l) = quad(l, j) = inner(k_basis[j], k_basis[l]);
    }
    const double c0 = inner(k_beta, k_beta);

    std::vector<int> idx(basis_size, 0);
    Eigen::VectorXd coeff(basis_size);
    bool boundary_hit = false;
    while (true) {
        for (int j = 0; j < basis_size; ++j) {
            const int np = grid_spec.n_points[j];
            coeff[j] = np == 1 ? 0.5 * (grid_spec.lo[j] + grid_spec.hi[j])
                               : grid_spec.lo[j] +
                                     idx[j] * (grid_spec.hi[j] - grid_spec.lo[j]) / (np - 1);
        }
        const double t_n = n * (c0 - 2.0 * lin.dot(coeff) + coeff.dot(quad * coeff));
        ++out.probed;
        if (t_n <= out.critical_value) {
            out.accepted.emplace_back(coeff.data(), coeff.data() + basis_size);
            for (int j = 0; j < basis_size; ++j)
                if (grid_spec.n_points[j] > 1 && (idx[j] == 0 || idx[j] == grid_spec.n_points[j] - 1))
                    boundary_hit = true;
        }
        int j = 0;
        for (; j < basis_size; ++j) {
            if (++idx[j] < grid_spec.n_points[j]) break;
            idx[j] = 0;
        }
        if (j == basis_size) break;
    }
    if (boundary_hit)
        out.warnings.push_back("accepted set touches the grid boundary; set likely truncated");
    return out;
}

}  // namespace fpls
