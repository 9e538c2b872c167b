#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fpls/cgpls.hpp"
#include "fpls/inference.hpp"

namespace fpls {

enum class ModelId { M1, M2, M3 };

// Simulation design: X_i = sum_{j<=j_max} sqrt(lambda_j) u_ij v_j with the
// cosine basis, Y_i = <X_i, beta> + noise_sd * eps_i.
//   M1: beta_j = 4 j^-2.7, lambda_j = 2 j^-1.1
//   M2: as M1 but beta_j = 4 for j <= 5
//   M3: as M1 but lambda_j = 2 for j <= 5
struct ModelSpec {
    ModelId model_id = ModelId::M1;
    int j_max = 100;
    int t_count = 200;
    Eigen::VectorXd beta_coeffs;
    Eigen::VectorXd lambdas;
    double noise_sd = 1.0;

    static ModelSpec make(ModelId id, int j_max = 100, int t_count = 200,
                          double noise_sd = 1.0);
};

std::pair<Dataset, FunctionVec> simulate_dataset(const ModelSpec& spec, int n,
                                                 std::uint64_t seed);

// Integrated squared error int |beta_hat - beta|^2.
double ise(const FunctionVec& beta_hat, const FunctionVec& beta_true);

// Mean squared prediction error of fit_beta on an independent holdout.
double mspe(const FunctionVec& fit_beta, const Dataset& holdout);

struct SimRecord {
    int rep = 0;
    std::uint64_t seed = 0;
    double delta = 0.0;
    int m_hat = -1;
    double sigma2_hat = 0.0;
    double ise_pls = 0.0;
    double mspe_pls = 0.0;
    double ise_pca = 0.0;
    double mspe_pca = 0.0;
    double t_n = 0.0;
    double p_value = 1.0;
    bool reject = false;
};

struct SimReport {
    std::vector<SimRecord> records;
    std::vector<std::string> failures;  // "rep: what" for replications that threw
};

double median(std::vector<double> v);

// Estimation campaign: early-stopped PLS vs PCA-GCV, ISE and holdout MSPE
// per replication.
SimReport estimation_campaign(const ModelSpec& spec, int n, int reps, std::uint64_t seed,
                              const StoppingConfig& stopping = {}, int threads = 0);

// Power curve over local alternatives b = beta + delta * s (s the identity
// function on the grid); one record per (delta, rep).
SimReport power_curve(const ModelSpec& spec, const std::vector<double>& deltas, int n,
                      int reps, std::uint64_t seed, const InferenceConfig& inference = {},
                      int threads = 0);

double rejection_rate(const SimReport& report, double delta);

// Finite-sample draws of T_n under H0 plus the asymptotic weighted
// chi-square reference sample built from the population weights
// sigma^2 lambda_j.
struct NullDistSample {
    std::vector<double> t_n_sample;
    std::vector<double> reference;
    double ks_distance = 0.0;
};

NullDistSample null_distribution_sample(const ModelSpec& spec, int n, int reps,
                                        std::uint64_t seed,
                                        const InferenceConfig& inference = {},
                                        int n_reference = 50000, int threads = 0);

// Two-sample Kolmogorov-Smirnov distance.
double ks_distance(std::vector<double> a, std::vector<double> b);

}  // namespace fpls
