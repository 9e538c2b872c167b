#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "fpls/csv_io.hpp"
#include "fpls/inference.hpp"
#include "fpls/parallel.hpp"
#include "fpls/simlab.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct CommonOpts {
    std::string input;
    std::string out_dir = ".";
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int threads = 0;
    double alpha = 0.05;
    int m = 70;
    std::string model = "m1";
    int n = 100;
    int reps = 500;
    std::string method = "spectrum";
    int n_sims = 50000;
    int n_boot = 500;
    fpls::StoppingConfig stopping;
};

void add_common_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--input", o.input, "input dataset CSV");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--seed", o.seed, "master seed (recorded; random if omitted)")
        ->each([&](const std::string&) { o.seed_given = true; });
    cmd->add_option("--threads", o.threads, "worker threads (default: FPLS_THREADS or hardware)");
    cmd->add_option("--alpha", o.alpha, "significance level");
    cmd->add_option("--m", o.m, "PLS components for inference");
    cmd->add_option("--model", o.model, "simulation model")->check(CLI::IsMember({"m1", "m2", "m3"}));
    cmd->add_option("--n", o.n, "sample size");
    cmd->add_option("--reps", o.reps, "replications");
    cmd->add_option("--tau", o.stopping.tau, "early-stopping tau");
    cmd->add_option("--delta", o.stopping.delta, "early-stopping delta");
    cmd->add_option("--method", o.method, "critical value method")
        ->check(CLI::IsMember({"spectrum", "bootstrap"}));
    cmd->add_option("--n-sims", o.n_sims, "weighted chi-square simulation draws");
    cmd->add_option("--n-boot", o.n_boot, "bootstrap resamples");
    cmd->add_option("--config", o.config_path, "key=value config file");
}

// Config file < CLI flags; flags were already parsed, so only fill keys the
// user did not pass on the command line.
void apply_config_file(const CLI::App* cmd, CommonOpts& o) {
    if (o.config_path.empty()) return;
    const auto kv = fpls::read_config_file(o.config_path);
    auto set_if_default = [&](const char* flag, const char* key, auto& target) {
        auto it = kv.find(key);
        if (it == kv.end() || cmd->count(flag) > 0) return;
        target = static_cast<std::decay_t<decltype(target)>>(std::stod(it->second));
    };
    set_if_default("--tau", "tau", o.stopping.tau);
    set_if_default("--delta", "delta", o.stopping.delta);
    set_if_default("--alpha", "alpha", o.alpha);
    set_if_default("--m", "m", o.m);
    auto direct = [&](const char* key, auto& target) {
        auto it = kv.find(key);
        if (it != kv.end())
            target = static_cast<std::decay_t<decltype(target)>>(std::stod(it->second));
    };
    direct("xi", o.stopping.xi);
    direct("k_max", o.stopping.k_max);
    direct("m_cap", o.stopping.m_cap);
    direct("breakdown_tol", o.stopping.breakdown_tol);
}

std::uint64_t resolve_seed(CommonOpts& o) {
    if (!o.seed_given) {
        std::random_device rd;
        o.seed = (static_cast<std::uint64_t>(rd()) << 32) | rd();
    }
    return o.seed;
}

fpls::ModelSpec model_spec(const CommonOpts& o) {
    if (o.model == "m2") return fpls::ModelSpec::make(fpls::ModelId::M2);
    if (o.model == "m3") return fpls::ModelSpec::make(fpls::ModelId::M3);
    return fpls::ModelSpec::make(fpls::ModelId::M1);
}

fpls::InferenceConfig inference_config(const CommonOpts& o) {
    fpls::InferenceConfig cfg;
    cfg.alpha = o.alpha;
    cfg.m = o.m;
    cfg.method = o.method == "bootstrap" ? fpls::CritMethod::Bootstrap
                                         : fpls::CritMethod::SimulatedSpectrum;
    cfg.n_sims = o.n_sims;
    cfg.n_boot = o.n_boot;
    return cfg;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw fpls::CsvError("cannot write " + path.string());
    out << j.dump(2) << "\n";
}

int cmd_fit(CommonOpts& o) {
    const fpls::Dataset data = fpls::read_dataset_csv(o.input);
    const fpls::PlsFit fit = fpls::fit_early_stopped(data, o.stopping);
    const fs::path dir(o.out_dir);
    fs::create_directories(dir);
    fpls::write_function_csv(dir / "beta_hat.csv", fit.selected_beta());
    fpls::write_fit_trace_csv(dir / "fit_trace.csv", fit);
    json summary = {{"m_selected", fit.m_selected.value_or(-1)},
                    {"sigma2_hat", fit.sigma2_hat},
                    {"threshold", fit.threshold},
                    {"residual_at_selected",
                     fit.residual_norms[static_cast<std::size_t>(fit.m_selected.value_or(0))]},
                    {"warnings", fit.warnings}};
    write_json(dir / "fit_summary.json", summary);
    std::cout << "m_selected=" << fit.m_selected.value_or(-1)
              << " sigma2_hat=" << fit.sigma2_hat << "\n";
    return kExitOk;
}

int cmd_test(CommonOpts& o, const std::string& b_spec) {
    const fpls::Dataset data = fpls::read_dataset_csv(o.input);
    fpls::FunctionVec b;
    if (b_spec == "zero")
        b = fpls::FunctionVec::zero(data.grid);
    else
        b = fpls::read_function_csv(b_spec, data.grid);

    const fpls::TestOutcome out = fpls::run_test(data, b, resolve_seed(o), inference_config(o));
    const fs::path dir(o.out_dir);
    fs::create_directories(dir);
    std::ofstream report(dir / "test_report.csv");
    report.precision(17);
    report << "t_n,critical_value,p_value,alpha,m_used,method,seed\n";
    report << out.t_n << ',' << out.critical_value << ',' << out.p_value << ',' << out.alpha
           << ',' << out.m_used << ',' << o.method << ',' << out.seed << "\n";
    std::cout << (out.reject ? "reject" : "accept") << " p_value=" << out.p_value << "\n";
    return kExitOk;
}

int cmd_confset(CommonOpts& o, int basis_size, double grid_lo, double grid_hi,
                int grid_points) {
    const fpls::Dataset data = fpls::read_dataset_csv(o.input);
    const auto spec = fpls::CoefficientGridSpec::uniform(basis_size, grid_lo, grid_hi, grid_points);
    const fpls::ConfidenceSetGrid cs =
        fpls::confidence_set(data, spec, o.alpha, o.m, resolve_seed(o), inference_config(o));

    const fs::path dir(o.out_dir);
    fs::create_directories(dir);
    std::ofstream csv(dir / "confidence_set.csv");
    csv.precision(17);
    for (int j = 1; j <= basis_size; ++j) csv << (j > 1 ? "," : "") << "b_" << j;
    csv << "\n";
    for (const auto& tuple : cs.accepted) {
        for (std::size_t j = 0; j < tuple.size(); ++j) csv << (j > 0 ? "," : "") << tuple[j];
        csv << "\n";
    }
    json meta = {{"basis_size", cs.basis_size},
                 {"alpha", cs.alpha},
                 {"critical_value", cs.critical_value},
                 {"m_used", cs.m_used},
                 {"seed", cs.seed},
                 {"grid_lo", cs.spec.lo},
                 {"grid_hi", cs.spec.hi},
                 {"grid_points", cs.spec.n_points},
                 {"probed", cs.probed},
                 {"accepted", cs.accepted.size()},
                 {"warnings", cs.warnings}};
    write_json(dir / "confidence_set.json", meta);
    std::cout << "accepted " << cs.accepted.size() << "/" << cs.probed << " lattice points\n";
    return kExitOk;
}

std::string artifact_stem(const char* kind, const CommonOpts& o) {
    return std::string(kind) + "_" + o.model + "_n" + std::to_string(o.n) + "_seed" +
           std::to_string(o.seed);
}

int cmd_simulate(CommonOpts& o) {
    resolve_seed(o);
    const fpls::SimReport report = fpls::estimation_campaign(model_spec(o), o.n, o.reps, o.seed,
                                                             o.stopping, o.threads);
    const fs::path dir(o.out_dir);
    fs::create_directories(dir);
    const std::string stem = artifact_stem("simulate", o);
    std::ofstream csv(dir / (stem + ".csv"));
    csv.precision(17);
    csv << "rep,seed,m_hat,sigma2_hat,ise_pls,mspe_pls,ise_pca,mspe_pca\n";
    std::vector<double> m_hats, ises, mspes;
    for (const auto& r : report.records) {
        csv << r.rep << ',' << r.seed << ',' << r.m_hat << ',' << r.sigma2_hat << ','
            << r.ise_pls << ',' << r.mspe_pls << ',' << r.ise_pca << ',' << r.mspe_pca << "\n";
        m_hats.push_back(r.m_hat);
        ises.push_back(r.ise_pls);
        mspes.push_back(r.mspe_pls);
    }
    json summary = {{"model", o.model},
                    {"n", o.n},
                    {"reps", o.reps},
                    {"seed", o.seed},
                    {"median_m_hat", fpls::median(m_hats)},
                    {"median_ise_pls", fpls::median(ises)},
                    {"median_mspe_pls", fpls::median(mspes)},
                    {"failures", report.failures}};
    write_json(dir / (stem + ".json"), summary);
    std::cout << "median m_hat=" << fpls::median(m_hats) << "\n";
    return kExitOk;
}

int cmd_power(CommonOpts& o, std::vector<double>& deltas) {
    resolve_seed(o);
    if (deltas.empty()) deltas = {-1.0, -0.5, 0.0, 0.5, 1.0};
    const fpls::SimReport report = fpls::power_curve(model_spec(o), deltas, o.n, o.reps, o.seed,
                                                     inference_config(o), o.threads);
    const fs::path dir(o.out_dir);
    fs::create_directories(dir);
    const std::string stem = artifact_stem("power", o);
    std::ofstream csv(dir / (stem + ".csv"));
    csv.precision(17);
    csv << "delta,rep,seed,t_n,p_value,reject,m_used\n";
    for (const auto& r : report.records)
        csv << r.delta << ',' << r.rep << ',' << r.seed << ',' << r.t_n << ',' << r.p_value
            << ',' << (r.reject ? 1 : 0) << ',' << r.m_hat << "\n";
    json rates = json::object();
    for (double d : deltas) rates[std::to_string(d)] = fpls::rejection_rate(report, d);
    json summary = {{"model", o.model}, {"n", o.n},       {"reps", o.reps},
                    {"seed", o.seed},   {"alpha", o.alpha}, {"rejection_rates", rates},
                    {"failures", report.failures}};
    write_json(dir / (stem + ".json"), summary);
    for (double d : deltas)
        std::cout << "delta=" << d << " rejection=" << fpls::rejection_rate(report, d) << "\n";
    return kExitOk;
}

int cmd_nulldist(CommonOpts& o) {
    resolve_seed(o);
    const fpls::NullDistSample sample = fpls::null_distribution_sample(
        model_spec(o), o.n, o.reps, o.seed, inference_config(o), o.n_sims, o.threads);
    const fs::path dir(o.out_dir);
    fs::create_directories(dir);
    const std::string stem = artifact_stem("nulldist", o);
    std::ofstream csv(dir / (stem + ".csv"));
    csv.precision(17);
    csv << "rep,t_n\n";
    for (std::size_t i = 0; i < sample.t_n_sample.size(); ++i)
        csv << i << ',' << sample.t_n_sample[i] << "\n";
    std::ofstream ref_csv(dir / (stem + "_reference.csv"));
    ref_csv.precision(17);
    ref_csv << "draw,value\n";
    for (std::size_t i = 0; i < sample.reference.size(); ++i)
        ref_csv << i << ',' << sample.reference[i] << "\n";
    json summary = {{"model", o.model},
                    {"n", o.n},
                    {"reps", o.reps},
                    {"seed", o.seed},
                    {"ks_distance", sample.ks_distance}};
    write_json(dir / (stem + ".json"), summary);
    std::cout << "ks_distance=" << sample.ks_distance << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conjugate-gradient functional PLS: estimation, inference, simulation"};
    app.require_subcommand(1);

    CommonOpts o;
    std::string b_spec = "zero";
    int basis_size = 5;
    double grid_lo = 0.0, grid_hi = 4.5;
    int grid_points = 20;
    std::vector<double> deltas;

    CLI::App* fit = app.add_subcommand("fit", "early-stopped PLS fit of a dataset CSV");
    CLI::App* test = app.add_subcommand("test", "hypothesis test H0: beta = b");
    test->add_option("--b", b_spec, "hypothesized slope: CSV path or 'zero'");
    CLI::App* confset = app.add_subcommand("confset", "confidence set by test inversion");
    confset->add_option("--basis-size", basis_size, "cosine coefficients probed");
    confset->add_option("--grid-lo", grid_lo, "coefficient grid lower bound");
    confset->add_option("--grid-hi", grid_hi, "coefficient grid upper bound");
    confset->add_option("--grid-points", grid_points, "lattice points per coefficient");
    CLI::App* simulate = app.add_subcommand("simulate", "estimation campaign for a model");
    CLI::App* power = app.add_subcommand("power", "power curve over local alternatives");
    power->add_option("--deltas", deltas, "local-alternative scale factors");
    CLI::App* nulldist = app.add_subcommand("nulldist", "null distribution of T_n vs asymptotic");

    for (CLI::App* cmd : {fit, test, confset, simulate, power, nulldist})
        add_common_flags(cmd, o);
    fit->get_option("--input")->required();
    test->get_option("--input")->required();
    confset->get_option("--input")->required();

    CLI11_PARSE(app, argc, argv);
    CLI::App* active = app.get_subcommands().front();

    try {
        apply_config_file(active, o);
        if (active == fit) return cmd_fit(o);
        if (active == test) return cmd_test(o, b_spec);
        if (active == confset) return cmd_confset(o, basis_size, grid_lo, grid_hi, grid_points);
        if (active == simulate) return cmd_simulate(o);
        if (active == power) return cmd_power(o, deltas);
        if (active == nulldist) return cmd_nulldist(o);
    } catch (const fpls::CsvError& ex) {
        std::cerr << "input error: " << ex.what() << "\n";
        return kExitInput;
    } catch (const std::invalid_argument& ex) {
        std::cerr << "input error: " << ex.what() << "\n";
        return kExitInput;
    } catch (const std::exception& ex) {
        std::cerr << "numerical failure: " << ex.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}
