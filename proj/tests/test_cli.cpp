// End-to-end checks of the dlc binary: flag handling, exit codes, and output
// contracts. The binary path is injected by the build.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dlc/sweep.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    const auto dir = fs::temp_directory_path() / "dlc_cli_test";
    fs::create_directories(dir);
    const auto out = dir / ("out" + std::to_string(counter) + ".txt");
    const auto err = dir / ("err" + std::to_string(counter) + ".txt");
    ++counter;
    const std::string cmd =
        std::string(DLC_CLI_PATH) + " " + args + " > " + out.string() + " 2> " + err.string();
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

double csv_field_value(const std::string& csv, const std::string& column) {
    std::istringstream is(csv);
    const auto rows = dlc::read_rows_csv(is);
    REQUIRE(rows.size() == 1);
    if (column == "epsilon_theory") return rows[0].epsilon_theory;
    if (column == "z") return rows[0].z.value();
    FAIL("unknown column");
    return 0.0;
}

}  // namespace

TEST_CASE("theory subcommand") {
    const auto lr = run_cli("theory --model lr --alpha 0.5 --sigma2 1 --eta 0");
    CHECK(lr.exit_code == 0);
    CHECK(csv_field_value(lr.out, "epsilon_theory") == doctest::Approx(1.0).epsilon(1e-14));

    const auto nn = run_cli("theory --model nn --alpha 0.5 --sigma2 1 --eta 0 --widths 2,2");
    CHECK(nn.exit_code == 0);
    CHECK(csv_field_value(nn.out, "epsilon_theory") == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(csv_field_value(nn.out, "z") == doctest::Approx(0.5).epsilon(1e-12));

    const auto rf = run_cli("theory --model rf --alpha 0.8 --sigma2 1 --eta 0 --widths 0.5");
    CHECK(rf.exit_code == 0);
    CHECK(csv_field_value(rf.out, "epsilon_theory") ==
          doctest::Approx(4.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("theory error paths") {
    CHECK(run_cli("theory --model lr --alpha 1.0 --sigma2 1 --eta 0").exit_code == 2);
    CHECK(run_cli("theory --model lr --alpha -0.5 --sigma2 1 --eta 0").exit_code == 2);
    CHECK(run_cli("theory --model lr --alpha 0.5").exit_code == 1);       // missing flags
    CHECK(run_cli("theory --model rf --alpha 0.5 --sigma2 1 --eta 0").exit_code == 1);
    CHECK(run_cli("frobnicate").exit_code == 1);
}

TEST_CASE("sweep subcommand") {
    const auto dir = fs::temp_directory_path() / "dlc_cli_sweep";
    fs::create_directories(dir);
    const auto cfg_path = dir / "sweep.cfg";
    const auto out_path = dir / "rows.csv";
    {
        std::ofstream cfg(cfg_path);
        cfg << "model = rf\nalpha = 0.3,0.7\ngamma = 1\nsigma2 = 1\neta = 0\n"
            << "sim.d = 60\nsim.n_reps = 3\nsim.base_seed = 5\n"
            << "output = " << out_path.string() << "\n";
    }
    CHECK(run_cli("sweep " + cfg_path.string()).exit_code == 0);
    REQUIRE(fs::exists(out_path));
    const std::string first = slurp(out_path);

    CHECK(run_cli("sweep " + cfg_path.string()).exit_code == 0);
    CHECK(slurp(out_path) == first);  // byte-identical re-run

    const auto to_stdout = run_cli("sweep " + cfg_path.string() + " --out - --format jsonl");
    CHECK(to_stdout.exit_code == 0);
    CHECK(to_stdout.out.find("\"epsilon_sim_mean\"") != std::string::npos);

    const auto missing = run_cli("sweep " + (dir / "nope.cfg").string());
    CHECK(missing.exit_code == 1);

    const auto bad_cfg_path = dir / "bad.cfg";
    {
        std::ofstream cfg(bad_cfg_path);
        cfg << "model = rf\nalpha = \nsigma2 = 1\neta = 0\ngamma = 1\noutput = "
            << (dir / "never.csv").string() << "\n";
    }
    const auto bad = run_cli("sweep " + bad_cfg_path.string());
    CHECK(bad.exit_code == 1);
    CHECK(bad.err.find("alpha") != std::string::npos);
    CHECK(!fs::exists(dir / "never.csv"));
    fs::remove_all(dir);
}

TEST_CASE("optimal subcommand") {
    const auto width = run_cli("optimal --model rf --alpha 0.5 --sigma2 4 --eta 0 --depth 1");
    CHECK(width.exit_code == 0);
    CHECK(width.out.find("finite_optimum,1,") != std::string::npos);

    const auto depth = run_cli("optimal --model rf --alpha 0.5 --sigma2 4 --eta 0 --width 1.5");
    CHECK(depth.exit_code == 0);
    CHECK(depth.out.find("finite_optimum,3,") != std::string::npos);

    const auto nn = run_cli("optimal --model nn --alpha 0.5 --sigma2 1 --eta 0");
    CHECK(nn.exit_code == 0);
    CHECK(nn.out.find("width_irrelevant") != std::string::npos);

    CHECK(run_cli("optimal --model rf --alpha 0.5 --sigma2 4 --eta 0").exit_code == 1);
    CHECK(run_cli("optimal --model rf --alpha 1.5 --sigma2 4 --eta 0 --depth 1").exit_code == 2);
}

TEST_CASE("gapscan subcommand") {
    const auto r = run_cli("gapscan --alpha 0.5 --sigma2 4 --eta 0 --gammas 1:10000:6 "
                           "--d 50 --reps 4 --seed 3");
    CHECK(r.exit_code == 0);
    std::istringstream is(r.out);
    std::string line;
    int data_rows = 0;
    double last_gap_theory = -1.0;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("gamma,", 0) == 0) continue;
        std::istringstream row(line);
        std::string field;
        std::getline(row, field, ',');  // gamma
        std::getline(row, field, ',');  // n1
        std::getline(row, field, ',');  // gap_theory
        last_gap_theory = std::stod(field);
        CHECK(last_gap_theory >= 0.0);
        ++data_rows;
    }
    CHECK(data_rows == 6);
    CHECK(last_gap_theory <= 1e-6);  // wide end of the scan

    CHECK(run_cli("gapscan --alpha 0.5 --sigma2 4 --eta 0 --gammas nonsense").exit_code == 1);
    CHECK(run_cli("gapscan --alpha 2 --sigma2 4 --eta 0 --gammas 1:10:4").exit_code == 2);
}
