#include "fpls/fspace.hpp"

#include <cmath>

namespace fpls {

Grid make_uniform_grid(int t_count) {
    if (t_count < 2) throw std::invalid_argument("make_uniform_grid: t_count must be >= 2");
    Grid g;
    g.t_count = t_count;
    g.weight = 1.0 / static_cast<double>(t_count);
    g.points.resize(t_count);
    for (int k = 0; k < t_count; ++k) g.points[k] = static_cast<double>(k) / t_count;
    return g;
}

Dataset make_dataset(Grid grid, Eigen::MatrixXd x, Eigen::VectorXd y, bool centered) {
    if (x.rows() != y.size()) throw std::invalid_argument("make_dataset: row count of x must equal length of y");
    if (x.rows() < 2) throw std::invalid_argument("make_dataset: need at least 2 observations");
    if (x.cols() != grid.t_count) throw std::invalid_argument("make_dataset: x columns must match grid");
    Dataset d;
    d.grid = std::move(grid);
    d.x = std::move(x);
    d.y = std::move(y);
    d.centered = centered;
    return d;
}

double inner(const FunctionVec& f, const FunctionVec& g) {
    if (!f.grid.compatible(g.grid)) throw std::invalid_argument("inner: grid mismatch");
    return f.grid.weight * f.values.dot(g.values);
}

double norm(const FunctionVec& f) { return std::sqrt(inner(f, f)); }

Dataset center(const Dataset& dataset) {
    Dataset out = dataset;
    Eigen::RowVectorXd col_means = out.x.colwise().mean();
    out.x.rowwise() -= col_means;
    out.y.array() -= out.y.mean();
    out.centered = true;
    return out;
}

EmpiricalMoments compute_moments(const Dataset& dataset) {
    EmpiricalMoments m;
    m.dataset = dataset;
    const double n = static_cast<double>(dataset.n());
    m.r_hat = FunctionVec(dataset.grid, dataset.x.transpose() * dataset.y / n);
    m.gram = dataset.x * dataset.x.transpose() * (dataset.grid.weight / n);
    m.gram = ((m.gram + m.gram.transpose()) * 0.5).eval();
    return m;
}

FunctionVec apply_k_hat(const EmpiricalMoments& moments, const FunctionVec& v) {
    const Dataset& d = moments.dataset;
    if (!v.grid.compatible(d.grid)) throw std::invalid_argument("apply_k_hat: grid mismatch");
    // coeffs_i = <X_i, v>, then (1/n) sum_i coeffs_i X_i
    Eigen::VectorXd coeffs = d.x * v.values * d.grid.weight;
    return FunctionVec(d.grid, d.x.transpose() * coeffs / static_cast<double>(d.n()));
}

double mean_squared_norm(const Dataset& dataset) {
    return dataset.grid.weight * dataset.x.array().square().rowwise().sum().mean();
}

FunctionVec cosine_basis(const Grid& grid, int j) {
    if (j < 1) throw std::invalid_argument("cosine_basis: j must be >= 1");
    Eigen::VectorXd v(grid.t_count);
    if (j == 1) {
        v.setOnes();
    } else {
        const double freq = (j - 1) * M_PI;
        const double scale = std::sqrt(2.0);
        for (int k = 0; k < grid.t_count; ++k) v[k] = scale * std::cos(freq * grid.points[k]);
    }
    return FunctionVec(grid, std::move(v));
}

}  // namespace fpls
