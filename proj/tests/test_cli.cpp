#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace {

namespace fs = std::filesystem;

const fs::path& scratch_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "dce_cli_scratch";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

int run_cli(const std::string& args, const std::string& tag) {
    const fs::path err = scratch_dir() / (tag + ".err");
    const std::string cmd = std::string("\"") + DCE_CLI_PATH + "\" " + args +
                            " > /dev/null 2> \"" + err.string() + "\"";
    const int status = std::system(cmd.c_str());
    if (!WIFEXITED(status)) return -1;
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(bool(in));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Data rows of a CSV, metadata and header stripped, cells split on commas.
std::vector<std::vector<std::string>> data_rows(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE(bool(in));
    std::vector<std::vector<std::string>> rows;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

std::string path_of(const std::string& name) {
    return (scratch_dir() / name).string();
}

} // namespace

TEST_CASE("repeated runs write byte-identical tables") {
    const std::string common =
        "spectrum --set nz_max=3 --set tau_p=0.01 --out ";
    REQUIRE(run_cli(common + path_of("rep1.csv"), "rep1") == 0);
    REQUIRE(run_cli(common + path_of("rep2.csv"), "rep2") == 0);
    CHECK(slurp(path_of("rep1.csv")) == slurp(path_of("rep2.csv")));
    const std::string head = slurp(path_of("rep1.csv")).substr(0, 20);
    CHECK(head.find("# schema: dce-csv-1") == 0);
}

TEST_CASE("an emitted manifest reproduces the run byte for byte") {
    const std::string first = "spectrum --set nz_max=3 --set tau_p=0.01 "
                              "--set chi=1e-4 --out " + path_of("man1.csv");
    REQUIRE(run_cli(first, "man1") == 0);
    REQUIRE(fs::exists(path_of("man1.csv.manifest")));
    const std::string second = "spectrum --config " + path_of("man1.csv.manifest") +
                               " --out " + path_of("man2.csv");
    REQUIRE(run_cli(second, "man2") == 0);
    CHECK(slurp(path_of("man1.csv")) == slurp(path_of("man2.csv")));
    CHECK(slurp(path_of("man1.csv.manifest")) == slurp(path_of("man2.csv.manifest")));
}

TEST_CASE("named flags override configuration files") {
    std::ofstream cfg(path_of("prec.cfg"));
    cfg << "nz_max=5\ntau_p=0.02\n";
    cfg.close();
    const std::string via_file =
        "spectrum --config " + path_of("prec.cfg") +
        " --set tau_p=0.01 --nz-max 3 --out " + path_of("prec1.csv");
    REQUIRE(run_cli(via_file, "prec1") == 0);
    const std::string direct = "spectrum --set nz_max=3 --set tau_p=0.01 --out " +
                               path_of("prec2.csv");
    REQUIRE(run_cli(direct, "prec2") == 0);
    CHECK(slurp(path_of("prec1.csv")) == slurp(path_of("prec2.csv")));
}

TEST_CASE("malformed configuration lines are reported with their position") {
    std::ofstream cfg(path_of("broken.cfg"));
    cfg << "a0=1\nthis line has no equals sign\n";
    cfg.close();
    CHECK(run_cli("spectrum --config " + path_of("broken.cfg") + " --out " +
                      path_of("broken.csv"),
                  "broken") == 2);
    const std::string err = slurp(scratch_dir() / "broken.err");
    CHECK(err.find(":2:") != std::string::npos);
}

TEST_CASE("unknown keys and missing outputs are configuration errors") {
    CHECK(run_cli("spectrum --set no_such_knob=1 --out " + path_of("unk.csv"),
                  "unk") == 2);
    CHECK(run_cli("spectrum", "noout") == 2);
    CHECK(run_cli("spectrum --set metric_order=5 --out " + path_of("mo.csv"),
                  "mo") == 2);
    CHECK(run_cli("sweep --set axis=bogus --out " + path_of("ax.csv"), "ax") == 2);
}

TEST_CASE("a manifest written by one command is rejected by another") {
    REQUIRE(run_cli("spectrum --set nz_max=2 --set tau_p=0.01 --out " +
                        path_of("cross.csv"),
                    "cross1") == 0);
    CHECK(run_cli("modes --config " + path_of("cross.csv.manifest") + " --out " +
                      path_of("cross2.csv"),
                  "cross2") == 2);
}

TEST_CASE("an exhausted integrator surfaces as the convergence exit code") {
    const std::string cmd = "spectrum --oracle --set nz_max=1 --set tau_p=0.01 "
                            "--set rtol=1e-30 --set atol=1e-300 --out " +
                            path_of("stall.csv");
    CHECK(run_cli(cmd, "stall") == 3);
}

TEST_CASE("an empty sweep range produces a header-only table") {
    const std::string cmd = "sweep --set axis=tau_p --set start=1 --set stop=0 "
                            "--set step=0.1 --out " + path_of("empty.csv");
    REQUIRE(run_cli(cmd, "empty") == 0);
    CHECK(data_rows(path_of("empty.csv")).empty());
    const std::string text = slurp(path_of("empty.csv"));
    CHECK(text.find("tau_p,n_closed") != std::string::npos);
}

TEST_CASE("gradient sweep reproduces the closed suppression law") {
    const std::string cmd = "sweep --set axis=gamma_ap --set start=0 --set stop=0.1 "
                            "--set step=0.05 --set tau_p=0.1 --out " +
                            path_of("gsweep.csv");
    REQUIRE(run_cli(cmd, "gsweep") == 0);
    const auto rows = data_rows(path_of("gsweep.csv"));
    REQUIRE(rows.size() == 3);
    for (const auto& row : rows) {
        REQUIRE(row.size() >= 2);
        const double g = std::strtod(row[0].c_str(), nullptr);
        const double n = std::strtod(row[1].c_str(), nullptr);
        const double expect = (1.0 - 2.0 * g) * (1.0 - 2.0 * g) * 0.01;
        CHECK(n == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("mode table collapses to the gradient-free columns at zero gradient") {
    const std::string cmd = "modes --set nz_max=4 --out " + path_of("modes0.csv");
    REQUIRE(run_cli(cmd, "modes0") == 0);
    const auto rows = data_rows(path_of("modes0.csv"));
    REQUIRE(rows.size() == 4);
    for (const auto& row : rows) {
        REQUIRE(row.size() == 8);
        CHECK(row[4] == row[3]);  // closed gradient estimate
        CHECK(row[5] == row[3]);  // quantization root column
    }
}

TEST_CASE("spectrum columns agree across the closed and expansion paths") {
    const std::string cmd = "spectrum --set nz_max=3 --set tau_p=0.05 --out " +
                            path_of("agree.csv");
    REQUIRE(run_cli(cmd, "agree") == 0);
    const auto rows = data_rows(path_of("agree.csv"));
    REQUIRE(rows.size() == 3);
    // the driven fundamental states the comparison most sharply
    const double closed = std::strtod(rows[0][3].c_str(), nullptr);
    const double pert = std::strtod(rows[0][4].c_str(), nullptr);
    CHECK(pert == doctest::Approx(closed).epsilon(0.05));
    // numbers survive a read-back round trip at full precision
    CHECK(rows[0][3].find('e') != std::string::npos);
}

TEST_CASE("validation suite passes on the shipped defaults") {
    CHECK(run_cli("validate", "validate") == 0);
}
