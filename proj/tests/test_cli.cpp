#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "ggmkf/csv.hpp"
#include "ggmkf/simgen.hpp"

using namespace ggmkf;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code;
    std::string output;  // stdout + stderr
};

RunResult run(const std::string& args) {
    const std::string cmd = std::string(GGMKF_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 4096> buf;
    while (std::size_t got = fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), got);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

const fs::path& work_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("ggmkf_cli_" + std::to_string(getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string path(const std::string& name) { return (work_dir() / name).string(); }

std::string slurp(const std::string& file) {
    std::ifstream in(file);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Band-graph sample written once and shared across test cases.
const std::string& sample_csv() {
    static const std::string file = [] {
        auto [omega, truth] = generate_precision({GraphKind::band, 10, -0.6, 42});
        Rng rng(7);
        const Eigen::MatrixXd x = sample_gaussian(omega, 200, rng);
        const std::string out = path("sample.csv");
        std::ofstream f(out);
        write_matrix_csv(f, x);
        return out;
    }();
    return file;
}

std::string manifest_value(const std::string& manifest, const std::string& key) {
    std::istringstream in(slurp(manifest));
    std::string line;
    while (std::getline(in, line)) {
        const std::string prefix = key + " = ";
        if (line.rfind(prefix, 0) == 0) return line.substr(prefix.size());
    }
    return "";
}

} // namespace

TEST_CASE("calibrate-ca prints the bound as an a,k0,value line") {
    RunResult r = run("calibrate-ca --a 1 --k0 10");
    CHECK(r.exit_code == 0);
    double a, value;
    int k0;
    REQUIRE(sscanf(r.output.c_str(), "%lf,%d,%lf", &a, &k0, &value) == 3);
    CHECK(a == 1.0);
    CHECK(k0 == 10);
    CHECK(value > 1.0);
    CHECK(value <= 1.94);

    r = run("calibrate-ca --a 0.01 --k0 6");
    REQUIRE(sscanf(r.output.c_str(), "%lf,%d,%lf", &a, &k0, &value) == 3);
    CHECK(value > 1.0);
    CHECK(value <= 102.0);
}

TEST_CASE("calibrate-ca rejects invalid inputs with exit code 4") {
    CHECK(run("calibrate-ca --a -1").exit_code == 4);
    CHECK(run("calibrate-ca --a 0").exit_code == 4);
    CHECK(run("calibrate-ca --a 1 --k0 25").exit_code == 4);
    CHECK(run("calibrate-ca --a 1 --k0 0").exit_code == 4);
}

TEST_CASE("estimate writes a 1-based edge list and a run manifest") {
    const std::string out = path("edges.csv");
    const RunResult r = run("estimate --input " + sample_csv() + " --output " + out +
                            " --rule or --delta 0 --seed 5");
    CHECK(r.exit_code == 0);

    std::ifstream in(out);
    const CsvTable t = read_table_csv(in);
    CHECK(t.header == std::vector<std::string>{"i", "j"});
    REQUIRE(!t.rows.empty());
    for (const auto& row : t.rows) {
        const int i = std::stoi(row[0]), j = std::stoi(row[1]);
        CHECK(i >= 1);
        CHECK(i < j);
        CHECK(j <= 10);
    }

    const std::string manifest = out + ".manifest";
    CHECK(manifest_value(manifest, "q") == "0.2");
    CHECK(manifest_value(manifest, "delta") == "0");
    CHECK(manifest_value(manifest, "mode") == "fixed");
    CHECK(manifest_value(manifest, "seed") == "5");
    CHECK(manifest_value(manifest, "rule") == "or");
    CHECK(manifest_value(manifest, "edges") == std::to_string(t.rows.size()));
}

TEST_CASE("estimate outputs are byte-identical under a fixed seed") {
    const std::string o1 = path("det1.csv"), o2 = path("det2.csv");
    CHECK(run("estimate --input " + sample_csv() + " --output " + o1 +
              " --mode recycle --seed 9").exit_code == 0);
    CHECK(run("estimate --input " + sample_csv() + " --output " + o2 +
              " --mode recycle --seed 9 --threads 2").exit_code == 0);
    CHECK(slurp(o1) == slurp(o2));
    CHECK(slurp(o1 + ".manifest") == slurp(o2 + ".manifest"));
    CHECK(manifest_value(o1 + ".manifest", "selected_recipe") != "");
}

TEST_CASE("malformed CSV input exits 2 and names the offending cell") {
    const std::string bad = path("bad.csv");
    std::ofstream(bad) << "1,2\n3,4\n5,6\n7,8\n9,zap\n";
    const RunResult r = run("estimate --input " + bad);
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("row 5, column 2") != std::string::npos);
}

TEST_CASE("dimension violations exit 3") {
    const std::string small = path("small.csv");
    std::ofstream(small) << "1,2,3,4,5,6,7,8\n8,7,6,5,4,3,2,1\n";
    CHECK(run("estimate --input " + small).exit_code == 3);
    // recycle needs 4p rows, not just 2p
    CHECK(run("estimate --input " + sample_csv() + " --output " + path("dim_edges.csv") +
              " --mode recycle --seed 1 --q 0.2").exit_code == 0);
    const std::string mid = path("mid.csv");
    {
        Rng rng(3);
        const Eigen::MatrixXd x =
            sample_gaussian(Eigen::MatrixXd::Identity(10, 10), 25, rng);
        std::ofstream f(mid);
        write_matrix_csv(f, x);
    }
    CHECK(run("estimate --input " + mid + " --mode recycle --seed 1").exit_code == 3);
}

TEST_CASE("recycle and simulate refuse to run without a seed") {
    CHECK(run("estimate --input " + sample_csv() + " --mode recycle").exit_code != 0);
    CHECK(run("simulate --p 6 --n 40").exit_code != 0);
}

TEST_CASE("a flat config file mirrors flags, with flags winning") {
    const std::string cfg = path("run.cfg");
    std::ofstream(cfg) << "q = 0.1\nrule = or\nseed = 3\n";
    const std::string out = path("cfg_edges.csv");
    CHECK(run("estimate --input " + sample_csv() + " --output " + out + " --config " + cfg)
              .exit_code == 0);
    CHECK(manifest_value(out + ".manifest", "q") == "0.1");
    CHECK(manifest_value(out + ".manifest", "rule") == "or");
    CHECK(manifest_value(out + ".manifest", "seed") == "3");

    CHECK(run("estimate --input " + sample_csv() + " --output " + out + " --config " + cfg +
              " --q 0.3").exit_code == 0);
    CHECK(manifest_value(out + ".manifest", "q") == "0.3");
}

TEST_CASE("simulate emits per-replication rows plus matching aggregates") {
    const std::string res = path("results.csv"), agg = path("aggregate.csv");
    const RunResult r =
        run("simulate --kind band --p 6 --n 40 --reps 2 --methods fixed,bh --seed 11 --out " +
            res + " --aggregate-out " + agg);
    CHECK(r.exit_code == 0);

    std::ifstream rin(res);
    const CsvTable rt = read_table_csv(rin);
    CHECK(rt.header == std::vector<std::string>{"kind", "p", "n", "b", "q", "method", "seed",
                                                "fdp", "tpp", "runtime_ms"});
    CHECK(rt.rows.size() == 4);  // 1 setting x 2 reps x 2 methods

    std::ifstream ain(agg);
    const CsvTable at = read_table_csv(ain);
    REQUIRE(at.rows.size() == 2);
    for (const auto& arow : at.rows) {
        const std::string& method = arow[5];
        double sum = 0.0;
        int count = 0;
        for (const auto& row : rt.rows)
            if (row[5] == method) {
                sum += std::stod(row[7]);
                ++count;
            }
        REQUIRE(count == 2);
        CHECK(std::abs(std::stod(arow[7]) - sum / count) <= 1e-12);
    }

    // round-trip: re-serializing the parsed tables reproduces the files
    std::ostringstream rs, as;
    write_table_csv(rs, rt);
    write_table_csv(as, at);
    CHECK(rs.str() == slurp(res));
    CHECK(as.str() == slurp(agg));
}

TEST_CASE("simulate is deterministic apart from wall-clock timings") {
    const std::string r1 = path("sim1.csv"), r2 = path("sim2.csv");
    const std::string a1 = path("simagg1.csv"), a2 = path("simagg2.csv");
    const std::string common =
        "simulate --kind band --p 6 --n 40 --reps 3 --methods fixed,by --seed 21";
    CHECK(run(common + " --out " + r1 + " --aggregate-out " + a1).exit_code == 0);
    CHECK(run(common + " --out " + r2 + " --aggregate-out " + a2).exit_code == 0);
    CHECK(slurp(a1) == slurp(a2));

    std::ifstream i1(r1), i2(r2);
    CsvTable t1 = read_table_csv(i1), t2 = read_table_csv(i2);
    REQUIRE(t1.rows.size() == t2.rows.size());
    for (std::size_t r = 0; r < t1.rows.size(); ++r) {
        t1.rows[r].back() = t2.rows[r].back() = "";  // mask runtime_ms
        CHECK(t1.rows[r] == t2.rows[r]);
    }
}

TEST_CASE("infeasible simulation settings exit 3") {
    CHECK(run("simulate --p 10 --n 30 --methods recycle --reps 1 --seed 1 --out " +
              path("x.csv") + " --aggregate-out " + path("y.csv")).exit_code == 3);
}
