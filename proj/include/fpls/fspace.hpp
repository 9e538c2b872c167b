#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

namespace fpls {

// Uniform discretization of [0,1] with left-endpoint Riemann weights.
// Points are k/T for k = 0..T-1, weight = 1/T.
struct Grid {
    int t_count = 0;
    std::vector<double> points;
    double weight = 0.0;

    bool compatible(const Grid& other) const { return t_count == other.t_count; }
};

Grid make_uniform_grid(int t_count);

// A function in L2[0,1] sampled on a Grid.
struct FunctionVec {
    Grid grid;
    Eigen::VectorXd values;

    FunctionVec() = default;
    FunctionVec(Grid g, Eigen::VectorXd v) : grid(std::move(g)), values(std::move(v)) {
        if (values.size() != grid.t_count)
            throw std::invalid_argument("FunctionVec: values length does not match grid");
    }

    static FunctionVec zero(const Grid& g) {
        return FunctionVec(g, Eigen::VectorXd::Zero(g.t_count));
    }
};

// n predictor curves (rows of x) plus n scalar responses.
struct Dataset {
    Grid grid;
    Eigen::MatrixXd x;  // n x t_count
    Eigen::VectorXd y;  // n
    bool centered = false;

    Eigen::Index n() const { return y.size(); }
};

Dataset make_dataset(Grid grid, Eigen::MatrixXd x, Eigen::VectorXd y, bool centered = false);

// r_hat = (1/n) sum_i y_i X_i, gram(i,j) = <X_i, X_j>/n.
struct EmpiricalMoments {
    Dataset dataset;
    FunctionVec r_hat;
    Eigen::MatrixXd gram;  // n x n
};

double inner(const FunctionVec& f, const FunctionVec& g);
double norm(const FunctionVec& f);

Dataset center(const Dataset& dataset);

EmpiricalMoments compute_moments(const Dataset& dataset);

// Matrix-free application of K_hat = (1/n) sum_i X_i (x) X_i.
FunctionVec apply_k_hat(const EmpiricalMoments& moments, const FunctionVec& v);

// Mean of <X_i, X_i> over the sample; the plug-in for E||X||^2.
double mean_squared_norm(const Dataset& dataset);

// Cosine basis on [0,1]: h_1 = 1, h_j(s) = sqrt(2) cos((j-1) pi s) for j >= 2.
FunctionVec cosine_basis(const Grid& grid, int j);

}  // namespace fpls
