#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fpls/csv_io.hpp"
#include "fpls/inference.hpp"
#include "fpls/simlab.hpp"
#include "fpls/spectral.hpp"

namespace py = pybind11;

namespace {

fpls::Dataset dataset_from_numpy(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    return fpls::make_dataset(fpls::make_uniform_grid(static_cast<int>(x.cols())), x, y);
}

fpls::ModelSpec spec_from_name(const std::string& model, int j_max, int t_count,
                               double noise_sd) {
    fpls::ModelId id = fpls::ModelId::M1;
    if (model == "m2") id = fpls::ModelId::M2;
    else if (model == "m3") id = fpls::ModelId::M3;
    else if (model != "m1") throw std::invalid_argument("model must be m1, m2, or m3");
    return fpls::ModelSpec::make(id, j_max, t_count, noise_sd);
}

py::dict fit_to_dict(const fpls::PlsFit& fit) {
    py::dict d;
    d["m_selected"] = fit.m_selected ? py::cast(*fit.m_selected) : py::none();
    d["sigma2_hat"] = fit.sigma2_hat;
    d["threshold"] = fit.threshold;
    d["beta"] = fit.selected_beta().values;
    d["residual_norms"] = fit.residual_norms;
    d["warnings"] = fit.warnings;
    return d;
}

}  // namespace

PYBIND11_MODULE(_fpls, m) {
    m.doc() = "Conjugate-gradient functional PLS core";

    m.def(
        "simulate",
        [](const std::string& model, int n, std::uint64_t seed, int j_max, int t_count,
           double noise_sd) {
            auto [data, beta] =
                fpls::simulate_dataset(spec_from_name(model, j_max, t_count, noise_sd), n, seed);
            return py::make_tuple(data.x, data.y, beta.values);
        },
        py::arg("model"), py::arg("n"), py::arg("seed"), py::arg("j_max") = 100,
        py::arg("t_count") = 200, py::arg("noise_sd") = 1.0,
        "Draw (X, y, beta_true) from one of the simulation designs");

    m.def(
        "fit_early_stopped",
        [](const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double tau, double delta,
           double xi, int k_max, int m_cap) {
            fpls::StoppingConfig cfg;
            cfg.tau = tau;
            cfg.delta = delta;
            cfg.xi = xi;
            cfg.k_max = k_max;
            cfg.m_cap = m_cap;
            return fit_to_dict(fpls::fit_early_stopped(dataset_from_numpy(x, y), cfg));
        },
        py::arg("x"), py::arg("y"), py::arg("tau") = 1.01, py::arg("delta") = 0.1,
        py::arg("xi") = 0.01, py::arg("k_max") = 10, py::arg("m_cap") = 100,
        "Adaptive early-stopped PLS fit");

    m.def(
        "pca_estimate",
        [](const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int m) {
            return fpls::pca_estimate(
                       fpls::compute_moments(fpls::center(dataset_from_numpy(x, y))), m)
                .values;
        },
        py::arg("x"), py::arg("y"), py::arg("m"), "Spectral cut-off estimator");

    m.def(
        "spectrum",
        [](const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
            auto spec = fpls::spectrum_k_hat(
                fpls::compute_moments(fpls::center(dataset_from_numpy(x, y))));
            Eigen::MatrixXd funcs(spec.rank(), x.cols());
            for (int j = 0; j < spec.rank(); ++j)
                funcs.row(j) = spec.eigenfunctions[j].values.transpose();
            return py::make_tuple(spec.eigenvalues, funcs);
        },
        py::arg("x"), py::arg("y"), "Eigenvalues and eigenfunctions of the covariance operator");

    m.def(
        "run_test",
        [](const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& b,
           double alpha, int m, const std::string& method, std::uint64_t seed, int n_sims,
           int n_boot) {
            fpls::Dataset data = dataset_from_numpy(x, y);
            fpls::InferenceConfig cfg;
            cfg.alpha = alpha;
            cfg.m = m;
            cfg.method = method == "bootstrap" ? fpls::CritMethod::Bootstrap
                                               : fpls::CritMethod::SimulatedSpectrum;
            cfg.n_sims = n_sims;
            cfg.n_boot = n_boot;
            auto out = fpls::run_test(data, fpls::FunctionVec(data.grid, b), seed, cfg);
            py::dict d;
            d["t_n"] = out.t_n;
            d["critical_value"] = out.critical_value;
            d["p_value"] = out.p_value;
            d["alpha"] = out.alpha;
            d["reject"] = out.reject;
            d["m_used"] = out.m_used;
            d["method"] = method;
            d["warnings"] = out.warnings;
            return d;
        },
        py::arg("x"), py::arg("y"), py::arg("b"), py::arg("alpha") = 0.05, py::arg("m") = 70,
        py::arg("method") = "spectrum", py::arg("seed") = 0, py::arg("n_sims") = 50000,
        py::arg("n_boot") = 500, "Test H0: beta = b");

    m.def(
        "confidence_set",
        [](const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int basis_size, double lo,
           double hi, int n_points, double alpha, int m, std::uint64_t seed, int n_sims) {
            fpls::InferenceConfig cfg;
            cfg.n_sims = n_sims;
            auto cs = fpls::confidence_set(
                dataset_from_numpy(x, y),
                fpls::CoefficientGridSpec::uniform(basis_size, lo, hi, n_points), alpha, m,
                seed, cfg);
            py::dict d;
            d["critical_value"] = cs.critical_value;
            d["accepted"] = cs.accepted;
            d["probed"] = cs.probed;
            d["warnings"] = cs.warnings;
            return d;
        },
        py::arg("x"), py::arg("y"), py::arg("basis_size") = 5, py::arg("lo") = 0.0,
        py::arg("hi") = 4.5, py::arg("n_points") = 20, py::arg("alpha") = 0.05,
        py::arg("m") = 70, py::arg("seed") = 0, py::arg("n_sims") = 50000,
        "Confidence set over cosine-basis coefficients by test inversion");
}
