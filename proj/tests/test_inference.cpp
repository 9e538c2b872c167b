#include <doctest.h>

#include <cmath>

#include "fpls/inference.hpp"
#include "test_helpers.hpp"

using namespace fpls;
using namespace fpls::testing;

TEST_CASE("test_statistic basics") {
    Dataset d = center(random_dataset(15, 30, 3));
    EmpiricalMoments m = compute_moments(d);
    FunctionVec beta = random_function(d.grid, 1);

    CHECK(test_statistic(m, beta, beta) == 0.0);

    // Dense recomputation oracle.
    FunctionVec b = random_function(d.grid, 2);
    Eigen::MatrixXd dense = dense_k_hat(d);
    Eigen::VectorXd kd = dense * (beta.values - b.values);
    const double expected = 15.0 * d.grid.weight * kd.squaredNorm();
    CHECK(test_statistic(m, beta, b) == doctest::Approx(expected).epsilon(1e-8));
}

TEST_CASE("test_statistic is blind to the null space of K_hat") {
    Grid g = make_uniform_grid(20);
    Eigen::MatrixXd x(3, 20);
    x.row(0) = cosine_basis(g, 2).values.transpose();
    x.row(1) = -x.row(0);
    x.row(2) = 2.0 * x.row(0);
    Dataset d = make_dataset(g, x, Eigen::Vector3d(1, -1, 2), true);
    EmpiricalMoments m = compute_moments(d);

    FunctionVec beta = random_function(g, 7);
    // Project the single data direction out of a random function; the
    // remainder lies in the null space of K_hat.
    FunctionVec dir(g, x.row(0).transpose());
    FunctionVec raw = cosine_basis(g, 5);
    FunctionVec v(g, raw.values - (inner(raw, dir) / inner(dir, dir)) * dir.values);
    FunctionVec shifted(g, beta.values + v.values);
    CHECK(test_statistic(m, beta, shifted) < 1e-12);
}

TEST_CASE("critical_value_simulated recovers the chi-square quantile") {
    OperatorSpectrum omega;
    omega.eigenvalues = Eigen::VectorXd::Ones(1);
    const double z = critical_value_simulated(omega, 0.05, 50000, 1234);
    CHECK(z == doctest::Approx(3.841).epsilon(0.1 / 3.841));

    OperatorSpectrum zero;
    zero.eigenvalues = Eigen::VectorXd::Zero(3);
    CHECK(critical_value_simulated(zero, 0.05, 1000, 1) == 0.0);

    OperatorSpectrum empty;
    CHECK_THROWS_AS(critical_value_simulated(empty, 0.05, 1000, 1), std::invalid_argument);
}

TEST_CASE("critical values are deterministic in the seed") {
    Dataset d = center(random_dataset(30, 40, 9));
    EmpiricalMoments m = compute_moments(d);
    PlsFit fit = cg_pls(m, 10);
    OperatorSpectrum omega = variance_spectrum(d, fit.betas.back());
    const double a = critical_value_simulated(omega, 0.05, 20000, 42);
    const double b = critical_value_simulated(omega, 0.05, 20000, 42);
    CHECK(a == b);
    CHECK(critical_value_simulated(omega, 0.05, 20000, 43) != a);
}

TEST_CASE("bootstrap critical value edge cases") {
    Dataset d = center(random_dataset(25, 30, 13));

    // n_boot = 1: the quantile is that single draw for any alpha.
    const double q10 = critical_value_bootstrap(d, 5, 0.10, 1, 7);
    const double q90 = critical_value_bootstrap(d, 5, 0.90, 1, 7);
    CHECK(q10 == q90);

    // Noiseless data: bootstrap statistics collapse toward zero.
    Dataset noiseless = center(random_dataset(25, 30, 13, 0.0));
    const double q = critical_value_bootstrap(noiseless, 20, 0.05, 100, 7);
    const double q_noisy = critical_value_bootstrap(d, 20, 0.05, 100, 7);
    CHECK(q < 0.01 * q_noisy);
}

TEST_CASE("run_test outcome consistency") {
    Dataset d = center(random_dataset(40, 30, 17));
    InferenceConfig cfg;
    cfg.n_sims = 20000;
    FunctionVec b = FunctionVec::zero(d.grid);
    TestOutcome out = run_test(d, b, 11, cfg);
    CHECK(out.t_n >= 0.0);
    CHECK(out.reject == (out.t_n > out.critical_value));
    CHECK(out.p_value > 0.0);
    CHECK(out.p_value <= 1.0);
    // p-value and critical value agree: reject iff p < alpha up to MC ties.
    if (out.p_value < 0.04) CHECK(out.reject);
    if (out.p_value > 0.06) CHECK(!out.reject);

    TestOutcome again = run_test(d, b, 11, cfg);
    CHECK(again.t_n == out.t_n);
    CHECK(again.critical_value == out.critical_value);
    CHECK(again.p_value == out.p_value);
}

TEST_CASE("bootstrap and spectrum methods broadly agree") {
    Dataset d = center(random_dataset(60, 40, 19));
    InferenceConfig spectrum_cfg;
    spectrum_cfg.n_sims = 20000;
    InferenceConfig boot_cfg = spectrum_cfg;
    boot_cfg.method = CritMethod::Bootstrap;
    boot_cfg.n_boot = 400;
    FunctionVec b = FunctionVec::zero(d.grid);
    TestOutcome s = run_test(d, b, 3, spectrum_cfg);
    TestOutcome bt = run_test(d, b, 3, boot_cfg);
    CHECK(bt.critical_value == doctest::Approx(s.critical_value).epsilon(0.5));
}

TEST_CASE("rejection region in a scan direction is the complement of an interval") {
    Dataset d = center(random_dataset(30, 25, 23));
    EmpiricalMoments m = compute_moments(d);
    PlsFit fit = cg_pls(m, 10);
    const FunctionVec& beta = fit.betas.back();
    FunctionVec dir = random_function(d.grid, 4);

    OperatorSpectrum omega = variance_spectrum(d, beta);
    const double z = critical_value_simulated(omega, 0.05, 20000, 5);

    // T_n(beta + t*dir) is quadratic in t, so acceptance along t is an interval.
    std::vector<bool> accepted;
    for (double t = -3.0; t <= 3.0; t += 0.05) {
        FunctionVec b(d.grid, beta.values + t * dir.values);
        accepted.push_back(test_statistic(m, beta, b) <= z);
    }
    int switches = 0;
    for (std::size_t i = 1; i < accepted.size(); ++i)
        if (accepted[i] != accepted[i - 1]) ++switches;
    CHECK(switches <= 2);
    CHECK(accepted[accepted.size() / 2]);  // t = 0 is always accepted
}

TEST_CASE("confidence_set geometry and duality") {
    Dataset d = center(random_dataset(50, 40, 29));
    EmpiricalMoments m = compute_moments(d);
    const int J = 3;
    InferenceConfig cfg;
    cfg.n_sims = 20000;

    // Grid centered on the projection of beta_m itself.
    PlsFit fit = cg_pls(m, 20);
    std::vector<double> proj(J);
    for (int j = 1; j <= J; ++j) proj[j - 1] = inner(fit.betas.back(), cosine_basis(d.grid, j));

    CoefficientGridSpec spec;
    for (int j = 0; j < J; ++j) {
        spec.lo.push_back(proj[j] - 0.5);
        spec.hi.push_back(proj[j] + 0.5);
        spec.n_points.push_back(5);
    }
    ConfidenceSetGrid cs = confidence_set(d, spec, 0.05, 20, 31, cfg);
    CHECK(cs.probed == 125);

    // Exhaustive oracle: recompute T_n at every lattice point with the
    // direct statistic and compare memberships (skipping boundary ties).
    std::size_t oracle_accepted = 0, mismatches = 0;
    for (int i0 = 0; i0 < 5; ++i0)
        for (int i1 = 0; i1 < 5; ++i1)
            for (int i2 = 0; i2 < 5; ++i2) {
                const int idx[3] = {i0, i1, i2};
                std::vector<double> tuple(J);
                FunctionVec b = FunctionVec::zero(d.grid);
                for (int j = 0; j < J; ++j) {
                    tuple[j] = spec.lo[j] + idx[j] * (spec.hi[j] - spec.lo[j]) / 4.0;
                    b.values += tuple[j] * cosine_basis(d.grid, j + 1).values;
                }
                const double t_n = test_statistic(m, fit.betas.back(), b);
                if (std::abs(t_n - cs.critical_value) < 1e-6 * cs.critical_value) continue;
                const bool oracle_in = t_n <= cs.critical_value;
                if (oracle_in) ++oracle_accepted;
                bool cs_in = false;
                for (const auto& acc : cs.accepted) {
                    bool same = true;
                    for (int j = 0; j < J; ++j)
                        if (std::abs(acc[j] - tuple[j]) > 1e-9) same = false;
                    if (same) cs_in = true;
                }
                if (cs_in != oracle_in) ++mismatches;
            }
    CHECK(mismatches == 0);
    CHECK(oracle_accepted == doctest::Approx(cs.accepted.size()).epsilon(0.05));

    // Monotonicity in alpha: stricter alpha accepts no more points.
    ConfidenceSetGrid tight = confidence_set(d, spec, 0.5, 20, 31, cfg);
    ConfidenceSetGrid loose = confidence_set(d, spec, 0.01, 20, 31, cfg);
    CHECK(tight.accepted.size() <= cs.accepted.size());
    CHECK(cs.accepted.size() <= loose.accepted.size());

    // Duality with run_test at matching alpha, m, seed.
    InferenceConfig test_cfg = cfg;
    test_cfg.m = 20;
    for (std::size_t idx = 0; idx < std::min<std::size_t>(cs.accepted.size(), 3); ++idx) {
        FunctionVec b = FunctionVec::zero(d.grid);
        for (int j = 0; j < J; ++j)
            b.values += cs.accepted[idx][j] * cosine_basis(d.grid, j + 1).values;
        TestOutcome out = run_test(d, b, 31, test_cfg);
        CHECK(out.t_n <= cs.critical_value * (1.0 + 1e-9));
    }
}
