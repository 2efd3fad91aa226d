#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>
#include <sys/wait.h>

#include "qcurv/operator_io.hpp"
#include "qcurv/operators.hpp"
#include "qcurv/report_io.hpp"
#include "test_helpers.hpp"

using namespace qcurv;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(QCURV_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path work_dir() {
    const fs::path dir = fs::temp_directory_path() / "qcurv_cli_tests";
    fs::create_directories(dir);
    return dir;
}

std::size_t data_rows(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t rows = 0;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') continue;
        if (!header) {
            header = true;
            continue;
        }
        ++rows;
    }
    return rows;
}

}  // namespace

TEST_CASE("cli sweep writes a self-describing deterministic CSV") {
    const auto dir = work_dir();
    const auto out1 = (dir / "sweep1.csv").string();
    const auto out2 = (dir / "sweep2.csv").string();
    const std::string flags = "sweep --model tfim --sites 4 --g-min 0.2 --g-max 3 --steps 25";
    REQUIRE(run_cli(flags + " --out " + out1) == 0);
    REQUIRE(run_cli(flags + " --out " + out2) == 0);

    const auto text1 = read_text_file(out1);
    const auto text2 = read_text_file(out2);
    CHECK(text1 == text2);  // byte-identical reruns
    CHECK(data_rows(text1) == 25);
    CHECK(text1.rfind("# qcurv sweep --model tfim --sites 4", 0) == 0);
    std::istringstream in(text1);
    std::string comment, header;
    std::getline(in, comment);
    std::getline(in, header);
    CHECK(header == "g,lambda1,lambda2,h1,h2,e0,gap,kappa_spectral,kappa_fd,degenerate");
}

TEST_CASE("cli critical classifies the TFIM sweep as type II") {
    const auto dir = work_dir();
    const auto csv = (dir / "tfim8.csv").string();
    const auto report_path = (dir / "tfim8.json").string();
    REQUIRE(run_cli("sweep --model tfim --sites 8 --g-min 0.2 --g-max 3 --steps 60 --out " +
                    csv) == 0);
    REQUIRE(run_cli("critical --in " + csv + " --kappa-tol 0.5 --jump-tol auto --out " +
                    report_path) == 0);
    const auto j = nlohmann::json::parse(read_text_file(report_path));
    CHECK(j.at("kind") == "type_II");
    CHECK(std::abs(j.at("g_star").get<double>() - 1.0) <= 0.15);
    CHECK(j.at("delta_h1").get<double>() == 0.0);
    CHECK(j.contains("config"));
}

TEST_CASE("cli sweep/critical on a custom commuting pair finds type I") {
    const auto dir = work_dir();
    const auto pair_path = (dir / "step_pair.json").string();
    OperatorPair pair{testutil::diag({1, -1}), testutil::diag({0, 1}), "D1", "D2", 1, false};
    write_text_file(pair_path, pair_to_json(pair).dump());

    const auto csv = (dir / "step.csv").string();
    const auto report_path = (dir / "step.json").string();
    REQUIRE(run_cli("sweep --model custom-json --in " + pair_path +
                    " --g-min 0.5 --g-max 3.5 --steps 100 --out " + csv) == 0);
    REQUIRE(run_cli("critical --in " + csv + " --kappa-tol 0.5 --jump-tol auto --out " +
                    report_path) == 0);
    const auto j = nlohmann::json::parse(read_text_file(report_path));
    CHECK(j.at("kind") == "type_I");
    CHECK(std::abs(j.at("g_star").get<double>() - 2.0) <= 3.0 / 99.0 + 1e-12);
    CHECK(j.at("delta_h1").get<double>() == doctest::Approx(-2.0).epsilon(1e-9));
    CHECK(j.at("delta_h2").get<double>() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("cli tfim-exact snaps the self-dual point into the grid") {
    const auto dir = work_dir();
    const auto out = (dir / "exact.csv").string();
    REQUIRE(run_cli("tfim-exact --g-min 0.2 --g-max 5 --steps 400 --out " + out) == 0);
    const auto text = read_text_file(out);
    CHECK(data_rows(text) == 400);

    bool found_critical_row = false;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("1,", 0) == 0) {
            found_critical_row = true;
            // g,m,h1,h2,kappa: kappa is the last field.
            const auto pos = line.rfind(',');
            CHECK(std::abs(std::stod(line.substr(pos + 1))) <= 1e-8);
        }
    }
    CHECK(found_critical_row);
}

TEST_CASE("cli simplex emits the polygon for a commuting family") {
    const auto dir = work_dir();
    const auto family_path = (dir / "family.json").string();
    std::vector<OperatorMatrix> ops{testutil::diag({1, 0, -1}), testutil::diag({0, 1, 0})};
    write_text_file(family_path, family_to_json(ops).dump());

    const auto out = (dir / "simplex.json").string();
    REQUIRE(run_cli("simplex --in " + family_path + " --out " + out) == 0);
    const auto j = nlohmann::json::parse(read_text_file(out));
    CHECK(j.at("commuting") == true);
    CHECK(j.at("vertices").size() == 3);

    // Non-commuting input: validation failure (exit 1) with a diagnostic file.
    const auto bad_path = (dir / "bad_pair.json").string();
    OperatorPair bad{testutil::pauli('Z'), testutil::pauli('X'), "Z", "X", 1, false};
    write_text_file(bad_path, pair_to_json(bad).dump());
    const auto out_bad = (dir / "simplex_bad.json").string();
    CHECK(run_cli("simplex --in " + bad_path + " --out " + out_bad) == 1);
    const auto jb = nlohmann::json::parse(read_text_file(out_bad));
    CHECK(jb.at("commuting") == false);
}

TEST_CASE("cli convexity-test reports no failures") {
    const auto dir = work_dir();
    const auto out = (dir / "convexity.json").string();
    REQUIRE(run_cli("convexity-test --dim 8 --trials 25 --seed 3 --out " + out) == 0);
    const auto j = nlohmann::json::parse(read_text_file(out));
    CHECK(j.at("trials") == 25);
    CHECK(j.at("dim") == 8);
    CHECK(j.at("max_deviation").get<double>() <= 1e-8);
    CHECK(j.at("failures").empty());
}

TEST_CASE("cli exit codes distinguish validation from numerical failures") {
    const auto dir = work_dir();
    CHECK(run_cli("sweep --model tfim --sites 4 --g-min 3 --g-max 1 --steps 5 --out " +
                  (dir / "x.csv").string()) == 1);
    CHECK(run_cli("sweep --model tfim --sites 4 --g-min 0.2 --g-max 3 --steps 5") == 1);
    CHECK(run_cli("critical --in " + (dir / "does_not_exist.csv").string()) == 1);
    CHECK(run_cli("sweep --model custom-json --g-min 0.2 --g-max 3 --steps 5 --out " +
                  (dir / "y.csv").string()) == 1);
    CHECK(run_cli("--help") == 0);
}
