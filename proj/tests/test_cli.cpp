// End-to-end checks of the fpls binary. The binary path arrives as argv[1].
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int failures = 0;

void check(bool ok, const std::string& what) {
    std::cout << (ok ? "[ok] " : "[FAIL] ") << what << "\n";
    if (!ok) ++failures;
}

int run(const std::string& cmd) {
    const int rc = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: test_cli <path-to-fpls>\n";
        return 1;
    }
    const std::string fpls = argv[1];
    const fs::path work = fs::temp_directory_path() / "fpls_cli_test";
    fs::remove_all(work);
    fs::create_directories(work);
    const std::string w = work.string();

    // Determinism: identical seeds give byte-identical artifacts.
    check(run(fpls + " simulate --model m1 --n 60 --reps 10 --seed 7 --out " + w + "/a") == 0,
          "simulate exits 0");
    check(run(fpls + " simulate --model m1 --n 60 --reps 10 --seed 7 --out " + w + "/b") == 0,
          "simulate rerun exits 0");
    check(slurp(work / "a/simulate_m1_n60_seed7.csv") ==
              slurp(work / "b/simulate_m1_n60_seed7.csv"),
          "simulate CSVs are byte-identical across runs");

    // Golden schema of the simulate CSV.
    {
        std::ifstream in(work / "a/simulate_m1_n60_seed7.csv");
        std::string header;
        std::getline(in, header);
        check(header == "rep,seed,m_hat,sigma2_hat,ise_pls,mspe_pls,ise_pca,mspe_pca",
              "simulate CSV schema is stable");
    }

    // fit on a simulated fixture written through the dataset schema.
    check(run(fpls + " fit --input " + w + "/missing.csv --out " + w) == 2,
          "fit on a missing file exits 2");
    {
        std::ofstream out(work / "empty.csv");
    }
    check(run(fpls + " fit --input " + w + "/empty.csv --out " + w) == 2,
          "fit on an empty file exits 2");
    {
        std::ofstream out(work / "no_y.csv");
        out << "z,x_000,x_001\n1,2,3\n4,5,6\n";
    }
    check(run(fpls + " fit --input " + w + "/no_y.csv --out " + w) == 2,
          "fit without a y column exits 2");

    // A real dataset: build one with the nulldist fixture path instead.
    {
        std::ofstream out(work / "tiny.csv");
        out << "y,x_000,x_001,x_002,x_003\n";
        for (int i = 0; i < 30; ++i) {
            const double t = 0.1 * i;
            out << (0.5 * t) << ',' << t << ',' << (t * t) << ',' << (1 - t) << ',' << (0.3 * t)
                << "\n";
        }
    }
    check(run(fpls + " fit --input " + w + "/tiny.csv --out " + w + "/fit") == 0,
          "fit on a valid dataset exits 0");
    check(fs::exists(work / "fit/beta_hat.csv") && fs::exists(work / "fit/fit_trace.csv") &&
              fs::exists(work / "fit/fit_summary.json"),
          "fit writes beta_hat.csv, fit_trace.csv, fit_summary.json");

    // test: b from the previously dumped beta_hat must yield a large p-value.
    check(run(fpls + " test --input " + w + "/tiny.csv --b " + w +
              "/fit/beta_hat.csv --m 4 --n-sims 2000 --seed 5 --out " + w + "/test") == 0,
          "test exits 0");
    {
        std::ifstream in(work / "test/test_report.csv");
        std::string header, row;
        std::getline(in, header);
        std::getline(in, row);
        check(header == "t_n,critical_value,p_value,alpha,m_used,method,seed",
              "test report schema is stable");
        const double p = std::stod(row.substr(row.find(',', row.find(',') + 1) + 1));
        check(p > 0.5, "testing the fit against its own beta_hat gives a large p-value");
    }
    check(run(fpls + " test --input " + w + "/tiny.csv --b " + w + "/nope.csv --out " + w) == 2,
          "test with a missing b file exits 2");

    // confset on a small lattice.
    check(run(fpls + " confset --input " + w + "/tiny.csv --basis-size 2 --grid-lo -1 "
              "--grid-hi 1 --grid-points 4 --m 4 --n-sims 2000 --seed 3 --out " +
              w + "/cs") == 0,
          "confset exits 0");
    check(fs::exists(work / "cs/confidence_set.csv") &&
              fs::exists(work / "cs/confidence_set.json"),
          "confset writes CSV plus JSON sidecar");

    // power and nulldist artifacts.
    check(run(fpls + " power --model m1 --deltas 0 1 --n 40 --reps 5 --n-sims 2000 --seed 2 "
              "--out " + w + "/pw") == 0,
          "power exits 0");
    check(fs::exists(work / "pw/power_m1_n40_seed2.json"), "power writes its JSON summary");
    check(run(fpls + " nulldist --model m1 --n 40 --reps 20 --n-sims 2000 --seed 2 --out " + w +
              "/nd") == 0,
          "nulldist exits 0");
    check(fs::exists(work / "nd/nulldist_m1_n40_seed2.json"), "nulldist writes its JSON summary");

    // Config file feeds the stopping rule; CLI flags take precedence.
    {
        std::ofstream out(work / "conf");
        out << "tau=2.0\nk_max=3\n";
    }
    check(run(fpls + " fit --input " + w + "/tiny.csv --config " + w + "/conf --out " + w +
              "/fit2") == 0,
          "fit with a config file exits 0");

    // Inputs are never mutated.
    const std::string before = slurp(work / "tiny.csv");
    run(fpls + " fit --input " + w + "/tiny.csv --out " + w + "/fit3");
    check(before == slurp(work / "tiny.csv"), "input files are not mutated");

    std::cout << (failures == 0 ? "all CLI checks passed\n" : "CLI checks FAILED\n");
    return failures == 0 ? 0 : 1;
}
