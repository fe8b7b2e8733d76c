#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

const std::string kCli = SCCA_CLI_PATH;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               fs::path("scca_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

int run(const std::string& args) {
    int rc = std::system((kCli + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

void write_file(const std::string& p, const std::string& content) {
    std::ofstream out(p);
    out << content;
}

std::string slurp(const std::string& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string duplicate_column_csv() {
    std::string s = "a,b\n";
    for (int i = 0; i < 30; ++i) {
        double v = 0.13 * i - 1.7;
        s += std::to_string(v) + "," + std::to_string(v) + "\n";
    }
    return s;
}

}  // namespace

TEST_CASE("latentcor on duplicate columns hits the clamp-shrink value") {
    TempDir tmp;
    std::string in = tmp.file("dup.csv");
    write_file(in, duplicate_column_csv());
    std::string out = tmp.file("r.json");
    REQUIRE(run("latentcor --input " + in + " --types continuous,continuous --out " + out) == 0);
    std::string body = slurp(out);
    // (1 - 0.01) * 0.99 = 0.9801
    CHECK(body.find("0.9801") != std::string::npos);
}

TEST_CASE("latentcor rejects a mislabelled binary column with exit 2") {
    TempDir tmp;
    std::string in = tmp.file("bad.csv");
    write_file(in, "a,b\n0,1\n2,0\n1,1\n");
    CHECK(run("latentcor --input " + in + " --types binary,binary --out " +
              tmp.file("x.json")) == 2);
    CHECK(run("latentcor --input " + tmp.file("nope.csv") +
              " --types binary --out " + tmp.file("x.json")) == 2);
}

TEST_CASE("latentcor output is byte-identical across runs") {
    TempDir tmp;
    std::string in = tmp.file("fix.csv");
    std::string csv = "c1,c2,b1,t1\n";
    // fixed 20x4 mixed fixture
    const double vals[20][4] = {
        {0.3, -1.2, 1, 0.0}, {1.1, 0.4, 0, 2.1},  {-0.7, 0.9, 1, 0.0},
        {0.2, -0.3, 0, 1.4}, {2.0, 1.7, 1, 3.3},  {-1.5, -0.8, 0, 0.0},
        {0.6, 0.1, 1, 0.7},  {-0.2, 0.5, 0, 0.0}, {1.3, -1.9, 1, 2.8},
        {0.9, 0.8, 1, 1.1},  {-0.4, 0.2, 0, 0.0}, {0.5, -0.6, 1, 0.9},
        {1.8, 1.2, 0, 2.5},  {-1.1, -0.1, 1, 0.0}, {0.0, 0.7, 0, 0.3},
        {0.7, -1.4, 1, 1.8}, {-0.9, 0.3, 0, 0.0}, {1.6, 0.6, 1, 2.2},
        {-0.3, -0.5, 0, 0.0}, {0.4, 1.0, 1, 1.5}};
    for (auto& row : vals) {
        csv += std::to_string(row[0]) + ',' + std::to_string(row[1]) + ',' +
               std::to_string(row[2]) + ',' + std::to_string(row[3]) + '\n';
    }
    write_file(in, csv);
    std::string out1 = tmp.file("a.csv"), out2 = tmp.file("b.csv");
    std::string args = " --input " + in +
                       " --types continuous,continuous,binary,truncated --format csv";
    REQUIRE(run("latentcor" + args + " --out " + out1) == 0);
    REQUIRE(run("latentcor" + args + " --out " + out2) == 0);
    CHECK(slurp(out1) == slurp(out2));
    CHECK(slurp(out1).rfind("# tool_version=", 0) == 0);
}

TEST_CASE("cca reports a zero pair on independent data and orders pairs") {
    TempDir tmp;
    // independent noise => R12 ~ 0 => zero pair under moderate penalties
    std::string in1 = tmp.file("x1.csv"), in2 = tmp.file("x2.csv");
    std::string c1 = "a,b\n", c2 = "c,d\n";
    unsigned s = 12345;
    auto lcg = [&]() { s = s * 1103515245u + 12345u; return ((s >> 16) % 1000) / 1000.0 - 0.5; };
    for (int i = 0; i < 80; ++i) {
        c1 += std::to_string(lcg()) + ',' + std::to_string(lcg()) + '\n';
        c2 += std::to_string(lcg()) + ',' + std::to_string(lcg()) + '\n';
    }
    write_file(in1, c1);
    write_file(in2, c2);
    std::string out = tmp.file("cca.json");
    REQUIRE(run("cca --input " + in1 + " --input2 " + in2 +
                " --types continuous,continuous --types2 continuous,continuous --out " +
                out) == 0);
    std::string body = slurp(out);
    CHECK(body.find("\"pairs\"") != std::string::npos);
    CHECK(body.find("\"config\"") != std::string::npos);

    // mismatched row counts
    write_file(in2, "c,d\n1,2\n3,4\n");
    CHECK(run("cca --input " + in1 + " --input2 " + in2 +
              " --types continuous,continuous --types2 continuous,continuous --out " +
              out) == 2);
}

TEST_CASE("simulate is deterministic and validates the scenario") {
    TempDir tmp;
    std::string scenario = tmp.file("scenario.json");
    write_file(scenario,
               R"({"n": 60, "p1": 6, "p2": 6, "support": [1, 6],
                   "type1": "continuous", "type2": "continuous"})");
    std::string base = "simulate --scenario " + scenario +
                       " --methods kendall_bic2 --replications 2 --seed 9";
    REQUIRE(run(base + " --out " + tmp.file("r1")) == 0);
    REQUIRE(run(base + " --out " + tmp.file("r2")) == 0);
    CHECK(slurp(tmp.file("r1_results.csv")) == slurp(tmp.file("r2_results.csv")));
    CHECK(slurp(tmp.file("r1_summary.json")) == slurp(tmp.file("r2_summary.json")));
    CHECK(slurp(tmp.file("r1_results.csv")).rfind("# tool_version=", 0) == 0);

    std::string bad = tmp.file("bad.json");
    write_file(bad, R"({"n": 60, "copula": 5})");
    CHECK(run("simulate --scenario " + bad + " --out " + tmp.file("r3")) == 2);
}
