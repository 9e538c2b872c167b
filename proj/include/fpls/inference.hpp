#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fpls/cgpls.hpp"
#include "fpls/spectral.hpp"

namespace fpls {

enum class CritMethod { SimulatedSpectrum, Bootstrap };

struct TestOutcome {
    double t_n = 0.0;
    double critical_value = 0.0;
    double p_value = 1.0;
    double alpha = 0.05;
    bool reject = false;
    int m_used = 0;
    CritMethod method = CritMethod::SimulatedSpectrum;
    std::uint64_t seed = 0;
    std::vector<std::string> warnings;
};

struct InferenceConfig {
    double alpha = 0.05;
    int m = 70;  // capped at the numerical rank inside run_test
    CritMethod method = CritMethod::SimulatedSpectrum;
    int n_sims = 50000;
    int n_boot = 500;
    int crit_terms = 100;  // spectrum truncation for the weighted chi-square sum
    // Optional externally supplied weights for the simulated critical value
    // (descending). When empty, the weights are estimated from the data via
    // the variance operator at the early-stopped fit. Simulation studies with
    // a known design pass the population weights sigma^2 * lambda_j here.
    Eigen::VectorXd fixed_weights;
};

// T_n = n ||K_hat (beta_m - b)||^2.
double test_statistic(const EmpiricalMoments& moments, const FunctionVec& beta_m,
                      const FunctionVec& b);

// Simulated draws of sum_j omega_j Z_j^2 over the top min(crit_terms, rank)
// weights; deterministic given seed.
std::vector<double> simulate_weighted_chi2(const OperatorSpectrum& omega, int n_sims,
                                           std::uint64_t seed, int max_terms = 100);

// Empirical (1-alpha) quantile of a sample (sorted internally).
double empirical_quantile(std::vector<double> sample, double prob);

double critical_value_simulated(const OperatorSpectrum& omega, double alpha, int n_sims,
                                std::uint64_t seed, int max_terms = 100);

// Nonparametric bootstrap: resample rows with replacement, recenter, refit
// PLS with m components, statistic centered at the full-sample estimate.
double critical_value_bootstrap(const Dataset& dataset, int m, double alpha, int n_boot,
                                std::uint64_t seed, std::vector<std::string>* warnings = nullptr);

TestOutcome run_test(const Dataset& dataset, const FunctionVec& b, std::uint64_t seed,
                     const InferenceConfig& config = {});

// Test inversion over a truncated cosine expansion b = sum_{j<=J} b_j h_j.
struct CoefficientGridSpec {
    std::vector<double> lo;      // per-coefficient lower bound
    std::vector<double> hi;      // per-coefficient upper bound
    std::vector<int> n_points;   // per-coefficient lattice size

    static CoefficientGridSpec uniform(int basis_size, double lo, double hi, int n_points);
};

struct ConfidenceSetGrid {
    int basis_size = 0;
    double alpha = 0.05;
    double critical_value = 0.0;
    int m_used = 0;
    std::uint64_t seed = 0;
    CoefficientGridSpec spec;
    std::vector<std::vector<double>> accepted;  // accepted coefficient tuples
    std::size_t probed = 0;
    std::vector<std::string> warnings;
};

ConfidenceSetGrid confidence_set(const Dataset& dataset, const CoefficientGridSpec& grid_spec,
                                 double alpha, int m, std::uint64_t seed,
                                 const InferenceConfig& config = {});

}  // namespace fpls
