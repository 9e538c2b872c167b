#include "fpls/simlab.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "fpls/parallel.hpp"
#include "fpls/rng.hpp"
#include "fpls/spectral.hpp"

namespace fpls {

namespace {
constexpr std::uint64_t kRoleCurves = 0xda7aU;
constexpr std::uint64_t kRoleNoise = 0xe545U;
constexpr std::uint64_t kRoleHoldout = 0x401dU;
constexpr std::uint64_t kRoleTest = 0x7e57U;
constexpr std::uint64_t kRoleDataset = 0xd5e7U;
}  // namespace

ModelSpec ModelSpec::make(ModelId id, int j_max, int t_count, double noise_sd) {
    if (j_max < 1) throw std::invalid_argument("ModelSpec: j_max must be >= 1");
    ModelSpec spec;
    spec.model_id = id;
    spec.j_max = j_max;
    spec.t_count = t_count;
    spec.noise_sd = noise_sd;
    spec.beta_coeffs.resize(j_max);
    spec.lambdas.resize(j_max);
    for (int j = 1; j <= j_max; ++j) {
        double beta_j = 4.0 * std::pow(j, -2.7);
        double lambda_j = 2.0 * std::pow(j, -1.1);
        if (id == ModelId::M2 && j <= 5) beta_j = 4.0;
        if (id == ModelId::M3 && j <= 5) lambda_j = 2.0;
        spec.beta_coeffs[j - 1] = beta_j;
        spec.lambdas[j - 1] = lambda_j;
    }
    return spec;
}

std::pair<Dataset, FunctionVec> simulate_dataset(const ModelSpec& spec, int n,
                                                 std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("simulate_dataset: n must be >= 2");
    Grid grid = make_uniform_grid(spec.t_count);

    // Basis rows scaled by sqrt(lambda_j); X = U * scaled_basis.
    Eigen::MatrixXd basis(spec.j_max, spec.t_count);
    for (int j = 1; j <= spec.j_max; ++j)
        basis.row(j - 1) = cosine_basis(grid, j).values.transpose();
    Eigen::MatrixXd scaled = spec.lambdas.array().sqrt().matrix().asDiagonal() * basis;

    Eigen::MatrixXd u(n, spec.j_max);
    Eigen::VectorXd eps(n);
    for (int i = 0; i < n; ++i) {
        CounterRng curve_rng(derive_key(seed, static_cast<std::uint64_t>(i), kRoleCurves));
        for (int j = 0; j < spec.j_max; ++j) u(i, j) = curve_rng.next_normal();
        CounterRng noise_rng(derive_key(seed, static_cast<std::uint64_t>(i), kRoleNoise));
        eps[i] = noise_rng.next_normal();
    }

    Eigen::MatrixXd x = u * scaled;
    FunctionVec beta(grid, basis.transpose() * spec.beta_coeffs);
    Eigen::VectorXd y = x * beta.values * grid.weight + spec.noise_sd * eps;
    return {make_dataset(std::move(grid), std::move(x), std::move(y)), std::move(beta)};
}

double ise(const FunctionVec& beta_hat, const FunctionVec& beta_true) {
    FunctionVec d(beta_hat.grid, beta_hat.values - beta_true.values);
    return inner(d, d);
}

double mspe(const FunctionVec& fit_beta, const Dataset& holdout) {
    Eigen::VectorXd fitted = holdout.x * fit_beta.values * holdout.grid.weight;
    return (holdout.y - fitted).squaredNorm() / static_cast<double>(holdout.n());
}

double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median: empty sample");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

SimReport estimation_campaign(const ModelSpec& spec, int n, int reps, std::uint64_t seed,
                              const StoppingConfig& stopping, int threads) {
    SimReport report;
    report.records.resize(reps);
    std::vector<std::string> failures(reps);
    parallel_for(reps, threads, [&](std::size_t rep) {
        SimRecord rec;
        rec.rep = static_cast<int>(rep);
        rec.seed = derive_key(seed, rep, kRoleDataset);
        try {
            auto [data, beta_true] = simulate_dataset(spec, n, rec.seed);
            auto [holdout, beta_unused] =
                simulate_dataset(spec, n, derive_key(seed, rep, kRoleHoldout));
            (void)beta_unused;

            const Dataset centered = center(data);
            const EmpiricalMoments moments = compute_moments(centered);
            PlsFit fit = fit_early_stopped(moments, stopping);
            rec.m_hat = fit.m_selected.value_or(-1);
            rec.sigma2_hat = fit.sigma2_hat;
            rec.ise_pls = ise(fit.selected_beta(), beta_true);
            rec.mspe_pls = mspe(fit.selected_beta(), holdout);

            FunctionVec beta_pca = pca_gcv_pilot(moments);
            rec.ise_pca = ise(beta_pca, beta_true);
            rec.mspe_pca = mspe(beta_pca, holdout);
        } catch (const std::exception& ex) {
            failures[rep] = std::to_string(rep) + ": " + ex.what();
        }
        report.records[rep] = rec;
    });
    for (auto& f : failures)
        if (!f.empty()) report.failures.push_back(std::move(f));
    return report;
}

SimReport power_curve(const ModelSpec& spec, const std::vector<double>& deltas, int n,
                      int reps, std::uint64_t seed, const InferenceConfig& inference,
                      int threads) {
    SimReport report;
    report.records.resize(deltas.size() * static_cast<std::size_t>(reps));
    std::vector<std::string> failures(report.records.size());
    // The design is known in a simulation study, so the critical value is
    // simulated from the population weights sigma^2 * lambda_j unless the
    // caller supplied weights (or asked for the bootstrap).
    InferenceConfig cfg = inference;
    if (cfg.method == CritMethod::SimulatedSpectrum && cfg.fixed_weights.size() == 0)
        cfg.fixed_weights = spec.noise_sd * spec.noise_sd * spec.lambdas;
    parallel_for(report.records.size(), threads, [&](std::size_t item) {
        const std::size_t d_idx = item / reps;
        const std::size_t rep = item % reps;
        const double delta = deltas[d_idx];
        SimRecord rec;
        rec.rep = static_cast<int>(rep);
        rec.delta = delta;
        rec.seed = derive_key(seed, item, kRoleDataset);
        try {
            auto [data, beta_true] = simulate_dataset(spec, n, rec.seed);
            // Local alternative b(s) = beta(s) + delta * s.
            FunctionVec b = beta_true;
            for (int k = 0; k < b.grid.t_count; ++k) b.values[k] += delta * b.grid.points[k];
            TestOutcome out = run_test(data, b, derive_key(seed, item, kRoleTest), cfg);
            rec.t_n = out.t_n;
            rec.p_value = out.p_value;
            rec.reject = out.reject;
            rec.m_hat = out.m_used;
        } catch (const std::exception& ex) {
            failures[item] = std::to_string(item) + ": " + ex.what();
        }
        report.records[item] = rec;
    });
    for (auto& f : failures)
        if (!f.empty()) report.failures.push_back(std::move(f));
    return report;
}

double rejection_rate(const SimReport& report, double delta) {
    std::size_t total = 0, rejected = 0;
    for (const auto& rec : report.records) {
        if (rec.delta == delta) {
            ++total;
            if (rec.reject) ++rejected;
        }
    }
    if (total == 0) throw std::invalid_argument("rejection_rate: no records at this delta");
    return static_cast<double>(rejected) / static_cast<double>(total);
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_distance: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t ia = 0, ib = 0;
    while (ia < a.size() && ib < b.size()) {
        if (a[ia] <= b[ib])
            ++ia;
        else
            ++ib;
        const double fa = static_cast<double>(ia) / a.size();
        const double fb = static_cast<double>(ib) / b.size();
        d = std::max(d, std::abs(fa - fb));
    }
    return d;
}

NullDistSample null_distribution_sample(const ModelSpec& spec, int n, int reps,
                                        std::uint64_t seed, const InferenceConfig& inference,
                                        int n_reference, int threads) {
    NullDistSample out;
    out.t_n_sample.resize(reps);
    parallel_for(reps, threads, [&](std::size_t rep) {
        auto [data, beta_true] = simulate_dataset(spec, n, derive_key(seed, rep, kRoleDataset));
        const Dataset centered = center(data);
        const EmpiricalMoments moments = compute_moments(centered);
        PlsFit fit = cg_pls(moments, inference.m);
        out.t_n_sample[rep] = test_statistic(moments, fit.betas.back(), beta_true);
    });

    // Asymptotic reference: population weights sigma^2 lambda_j.
    OperatorSpectrum omega;
    omega.eigenvalues = spec.noise_sd * spec.noise_sd * spec.lambdas;
    omega.eigenfunctions.resize(spec.j_max);  // unused by the simulator
    out.reference = simulate_weighted_chi2(omega, n_reference,
                                           derive_key(seed, 0, kRoleTest), spec.j_max);
    out.ks_distance = ks_distance(out.t_n_sample, out.reference);
    return out;
}

}  // namespace fpls
