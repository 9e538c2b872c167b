#include <doctest.h>

#include <cmath>

#include "fpls/simlab.hpp"
#include "fpls/spectral.hpp"
#include "test_helpers.hpp"

using namespace fpls;
using namespace fpls::testing;

TEST_CASE("model specs enforce the design coefficients") {
    ModelSpec m1 = ModelSpec::make(ModelId::M1);
    CHECK(m1.beta_coeffs[0] == doctest::Approx(4.0));
    CHECK(m1.beta_coeffs[1] == doctest::Approx(4.0 * std::pow(2.0, -2.7)));
    CHECK(m1.lambdas[0] == doctest::Approx(2.0));
    CHECK(m1.lambdas[4] == doctest::Approx(2.0 * std::pow(5.0, -1.1)));

    ModelSpec m2 = ModelSpec::make(ModelId::M2);
    for (int j = 0; j < 5; ++j) CHECK(m2.beta_coeffs[j] == 4.0);
    CHECK(m2.beta_coeffs[5] == doctest::Approx(4.0 * std::pow(6.0, -2.7)));
    CHECK(m2.lambdas[2] == m1.lambdas[2]);

    ModelSpec m3 = ModelSpec::make(ModelId::M3);
    for (int j = 0; j < 5; ++j) CHECK(m3.lambdas[j] == 2.0);
    CHECK(m3.lambdas[5] == doctest::Approx(2.0 * std::pow(6.0, -1.1)));
    CHECK(m3.beta_coeffs[3] == m1.beta_coeffs[3]);
}

TEST_CASE("cosine family is orthonormal under the grid inner product") {
    Grid g = make_uniform_grid(200);
    for (int i = 1; i <= 6; ++i)
        for (int j = 1; j <= i; ++j) {
            const double ip = inner(cosine_basis(g, i), cosine_basis(g, j));
            CHECK(std::abs(ip - (i == j ? 1.0 : 0.0)) < 2e-2);
        }
}

TEST_CASE("simulate_dataset is bit-deterministic in the seed") {
    ModelSpec spec = ModelSpec::make(ModelId::M1, 100, 50);
    auto [d1, b1] = simulate_dataset(spec, 20, 99);
    auto [d2, b2] = simulate_dataset(spec, 20, 99);
    CHECK(d1.x == d2.x);
    CHECK(d1.y == d2.y);
    CHECK(b1.values == b2.values);

    auto [d3, b3] = simulate_dataset(spec, 20, 100);
    CHECK(d1.x != d3.x);
}

TEST_CASE("simulated scores recover the design eigenvalues") {
    ModelSpec spec = ModelSpec::make(ModelId::M1);
    const int n = 1000;
    auto [data, beta] = simulate_dataset(spec, n, 5);
    for (int j = 1; j <= 3; ++j) {
        FunctionVec v = cosine_basis(data.grid, j);
        Eigen::VectorXd scores = data.x * v.values * data.grid.weight;
        const double sample_var = scores.squaredNorm() / n - std::pow(scores.mean(), 2);
        const double lambda = spec.lambdas[j - 1];
        const double se = lambda * std::sqrt(2.0 / n);  // var of a chi-square mean
        CHECK(std::abs(sample_var - lambda) < 3.0 * se + 0.05 * lambda);
    }
}

TEST_CASE("empirical covariance spectrum approaches the design spectrum") {
    ModelSpec spec = ModelSpec::make(ModelId::M1, 100, 100);
    auto [data, beta] = simulate_dataset(spec, 2000, 17);
    OperatorSpectrum s = spectrum_k_hat(compute_moments(center(data)));
    REQUIRE(s.rank() >= 5);
    for (int j = 0; j < 5; ++j)
        CHECK(std::abs(s.eigenvalues[j] - spec.lambdas[j]) < 0.15 * spec.lambdas[j]);
}

TEST_CASE("noiseless simulation has R^2 near one") {
    ModelSpec spec = ModelSpec::make(ModelId::M1, 100, 100, 0.0);
    auto [data, beta] = simulate_dataset(spec, 500, 3);
    Eigen::VectorXd fitted = data.x * beta.values * data.grid.weight;
    CHECK((data.y - fitted).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("ise and mspe definitions") {
    Grid g = make_uniform_grid(50);
    FunctionVec f = random_function(g, 1);
    CHECK(ise(f, f) == 0.0);
    FunctionVec shifted(g, f.values.array() + 1.0);
    CHECK(ise(shifted, f) == doctest::Approx(1.0).epsilon(1e-12));

    ModelSpec spec = ModelSpec::make(ModelId::M1, 100, 50);
    auto [holdout, beta] = simulate_dataset(spec, 1000, 9);
    // True slope: MSPE is the irreducible noise floor.
    CHECK(mspe(beta, holdout) == doctest::Approx(1.0).epsilon(0.15));
    // Zero slope: MSPE = mean(y^2).
    FunctionVec zero = FunctionVec::zero(holdout.grid);
    CHECK(mspe(zero, holdout) ==
          doctest::Approx(holdout.y.squaredNorm() / holdout.n()).epsilon(1e-12));
}

TEST_CASE("ks_distance sanity") {
    OperatorSpectrum omega;
    omega.eigenvalues = Eigen::VectorXd::Ones(1);
    auto a = simulate_weighted_chi2(omega, 50000, 1);
    auto b = simulate_weighted_chi2(omega, 50000, 2);
    CHECK(ks_distance(a, b) < 0.02);

    // Mean of a weighted chi-square equals the sum of weights.
    omega.eigenvalues = Eigen::Vector3d(2.0, 1.0, 0.5);
    auto c = simulate_weighted_chi2(omega, 50000, 3);
    const double mean = Eigen::Map<Eigen::VectorXd>(c.data(), c.size()).mean();
    CHECK(mean == doctest::Approx(3.5).epsilon(0.03));
}

TEST_CASE("estimation campaign produces complete, reproducible records") {
    ModelSpec spec = ModelSpec::make(ModelId::M1, 50, 50);
    SimReport r1 = estimation_campaign(spec, 40, 8, 21, StoppingConfig{}, 2);
    SimReport r2 = estimation_campaign(spec, 40, 8, 21, StoppingConfig{}, 1);
    REQUIRE(r1.records.size() == 8);
    CHECK(r1.failures.empty());
    for (std::size_t i = 0; i < 8; ++i) {
        CHECK(r1.records[i].m_hat == r2.records[i].m_hat);
        CHECK(r1.records[i].ise_pls == r2.records[i].ise_pls);
        CHECK(r1.records[i].ise_pls >= 0.0);
        CHECK(r1.records[i].mspe_pls >= 0.0);
    }
}

TEST_CASE("model 3 stays estimable despite repeated eigenvalues") {
    ModelSpec m1 = ModelSpec::make(ModelId::M1, 100, 100);
    ModelSpec m3 = ModelSpec::make(ModelId::M3, 100, 100);
    SimReport r1 = estimation_campaign(m1, 100, 10, 13);
    SimReport r3 = estimation_campaign(m3, 100, 10, 13);
    std::vector<double> ise1, ise3;
    for (const auto& rec : r1.records) ise1.push_back(rec.ise_pls);
    for (const auto& rec : r3.records) ise3.push_back(rec.ise_pls);
    CHECK(median(ise3) < 100.0 * (median(ise1) + 1.0));
    for (double v : ise3) CHECK(std::isfinite(v));
}
