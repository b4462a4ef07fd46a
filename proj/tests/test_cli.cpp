#include <doctest.h>

#include "climnorm/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args, const std::string& input = "") {
    std::istringstream in(input);
    std::ostringstream out, err;
    Run r;
    r.code = climnorm::cli::run(args, in, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE_MESSAGE(f.good(), "missing file " << p.string());
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

const fs::path kData = fs::path(CLIMNORM_TEST_DIR) / "data";
const fs::path kGolden = fs::path(CLIMNORM_TEST_DIR) / "golden";

std::size_t count_lines(const std::string& s) {
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST_CASE("weights: DAF with m = 29 has 30 equal nonzero weights") {
    const auto r = run({"weights", "--kind", "daf", "--s", "12", "--m", "29"});
    REQUIRE(r.code == 0);
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "offset,weight");
    int rows = 0, nonzero = 0;
    while (std::getline(lines, line)) {
        ++rows;
        const auto comma = line.find(',');
        const double w = std::stod(line.substr(comma + 1));
        if (w != 0.0) {
            ++nonzero;
            CHECK(w == doctest::Approx(1.0 / 30));
            CHECK(std::stoi(line.substr(0, comma)) % 12 == 0);
        }
    }
    CHECK(rows == 349);
    CHECK(nonzero == 30);
}

TEST_CASE("kernel subcommand") {
    const auto r = run({"kernel", "--d", "1", "--m", "2", "--s", "12"});
    REQUIRE(r.code == 0);
    CHECK(count_lines(r.out) == 50);
    CHECK(r.out.find("0,0.25714285714285712\n") != std::string::npos);  // 9/35
}

TEST_CASE("errors are single machine-readable lines") {
    auto r = run({"weights", "--kind", "henderson"});
    CHECK(r.code == 1);
    CHECK(r.err.rfind("error: invalid_input: ", 0) == 0);
    CHECK(count_lines(r.err) == 1);

    r = run({"weights", "--bogus"});
    CHECK(r.code == 1);
    CHECK(r.err.rfind("error: usage: ", 0) == 0);
    CHECK(count_lines(r.err) == 1);

    r = run({"weights", "--m", "0"});
    CHECK(r.code == 1);
    CHECK(r.err.rfind("error: invalid_input: ", 0) == 0);

    r = run({"weights", "--kind", "regularized", "--lambda", "2"});
    CHECK(r.code == 1);

    r = run({"apply", "--input", "/nonexistent.csv"});
    CHECK(r.code == 1);
    CHECK(r.err.rfind("error: io: ", 0) == 0);

    r = run({});
    CHECK(r.code == 1);

    r = run({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("simulate") != std::string::npos);
}

TEST_CASE("simulate piped to apply is deterministic") {
    const std::vector<std::string> sim{"simulate", "--seed", "7", "--n", "480", "--beta0", "10",
                                       "--beta1", "0.002", "--gamma", "3,0.5", "--phi", "0.5"};
    const auto a = run(sim);
    const auto b = run(sim);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(count_lines(a.out) == 481);

    const std::vector<std::string> apply{"apply", "--kind", "regularized", "--m", "10", "--lambda", "0.5",
                                         "--kernel", "epanechnikov"};
    const auto x = run(apply, a.out);
    const auto y = run(apply, b.out);
    REQUIRE(x.code == 0);
    CHECK(x.out == y.out);
    CHECK(x.out.rfind("time,y,normal,anomaly\n", 0) == 0);
    CHECK(x.out.find("0010-12,") != std::string::npos);
    CHECK(run({"simulate", "--seed", "8", "--n", "480"}).out != run({"simulate", "--seed", "7", "--n", "480"}).out);
}

TEST_CASE("svg output is self-contained and reproducible") {
    const auto a = run({"weights", "--kind", "regularized", "--lambda", "0.4", "--m", "6", "--format", "svg"});
    const auto b = run({"weights", "--kind", "regularized", "--lambda", "0.4", "--m", "6", "--format", "svg"});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.rfind("<svg xmlns=\"http://www.w3.org/2000/svg\"", 0) == 0);
    CHECK(a.out.find("href") == std::string::npos);

    const auto series = run({"simulate", "--seed", "3", "--n", "240", "--gamma", "2"});
    const auto chart = run({"apply", "--kind", "concurrent", "--m", "5", "--format", "svg"}, series.out);
    REQUIRE(chart.code == 0);
    CHECK(chart.out.find("<path") != std::string::npos);
    CHECK(run({"weights", "--format", "png"}).code == 1);
}

TEST_CASE("flags override environment defaults") {
    ::setenv("CLIMNORM_PERIOD", "4", 1);
    const auto env = run({"weights", "--kind", "concurrent", "--m", "3"});
    const auto flag = run({"weights", "--kind", "concurrent", "--m", "3", "--s", "6"});
    ::unsetenv("CLIMNORM_PERIOD");
    REQUIRE(env.code == 0);
    CHECK(count_lines(env.out) == 1 + 13);
    CHECK(count_lines(flag.out) == 1 + 19);
}

TEST_CASE("select --grid-default matches the golden file") {
    const auto r = run({"select", "--grid-default", "--kernel", "epanechnikov", "--input",
                        (kData / "series.csv").string()});
    REQUIRE(r.code == 0);
    CHECK(r.out == slurp(kGolden / "select.csv"));
    CHECK(r.err == slurp(kGolden / "select_summary.txt"));
}

TEST_CASE("stability over a grid emits per-series rows and deciles") {
    const auto r = run({"stability", "--input", (kData / "grid20.csv").string(), "--trend"});
    REQUIRE(r.code == 0);
    CHECK(r.out == slurp(kGolden / "stability.csv"));
    const auto p = run({"stability", "--input", (kData / "series.csv").string(), "--persistence", "6,9,12"});
    REQUIRE(p.code == 0);
    CHECK(count_lines(p.out) == 4);
}

TEST_CASE("batch on the bundled grid reproduces the golden outputs") {
    const auto dir = fs::temp_directory_path() / "climnorm_cli_batch";
    for (const char* jobs : {"1", "3"}) {
        fs::remove_all(dir);
        const auto r = run({"batch", "--input", (kData / "grid20.csv").string(), "--out-dir", dir.string(),
                            "--grid-default", "--jobs", jobs});
        REQUIRE(r.code == 0);
        CHECK(r.out == slurp(kGolden / "batch" / "stdout.txt"));
        for (const char* name : {"normals.csv", "anomalies.csv", "selection.csv", "summary.csv", "area.csv"}) {
            CAPTURE(name);
            CHECK(slurp(dir / name) == slurp(kGolden / "batch" / name));
        }
    }
    fs::remove_all(dir);
}

TEST_CASE("batch exit codes") {
    const auto dir = fs::temp_directory_path() / "climnorm_cli_partial";
    fs::remove_all(dir);
    std::string grid = slurp(kData / "grid20.csv");
    const auto pos = grid.find("n003,");
    REQUIRE(pos != std::string::npos);
    const auto eol = grid.find('\n', pos);
    const auto value_start = grid.rfind(',', eol) + 1;
    grid.replace(value_start, eol - value_start, "NA");
    const auto r = run({"batch", "--out-dir", dir.string()}, grid);
    CHECK(r.code == 2);
    CHECK(r.err.rfind("skip cell_id=n003 reason=", 0) == 0);

    const auto bad = run({"batch", "--out-dir", dir.string()}, "cell_id,lat,lon,year,month,value\nx,0,0,2000,1,1\n");
    CHECK(bad.code == 1);
    CHECK(bad.err.rfind("skip cell_id=x", 0) == 0);
    CHECK(bad.err.find("error: empty_batch: ") != std::string::npos);
    fs::remove_all(dir);
}
