// End-to-end tests of the fqr binary: exit codes, JSON payloads, CSV output,
// determinism, and the malformed-config corpus.
#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run(const std::string& args) {
    std::string cmd = std::string(FQR_BINARY) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult res;
    char buf[4096];
    while (std::size_t got = std::fread(buf, 1, sizeof buf, pipe)) res.out.append(buf, got);
    int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path fresh_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("fqr_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("catalog lists the six built-ins") {
    auto res = run("catalog --json");
    REQUIRE(res.exit_code == 0);
    auto j = json::parse(res.out);
    CHECK(j["patches"].size() == 6);
    CHECK(j["patches"][0]["name"] == "riemannian-only");
}

TEST_CASE("check-reversible passes on the exact patch and fails on the rotational one") {
    auto pass = run("check-reversible --patch euclidean-exact --json");
    CHECK(pass.exit_code == 0);
    auto jp = json::parse(pass.out);
    CHECK(jp["pass"] == true);

    auto fail = run("check-reversible --patch rotational --json");
    CHECK(fail.exit_code == 1);
    auto jf = json::parse(fail.out);
    CHECK(jf["pass"] == false);
    // closedness report carries max omega = 0.2
    bool found = false;
    for (const auto& rep : jf["reports"]) {
        if (rep["name"] == "closedness") {
            CHECK(rep["pass"] == false);
            CHECK(std::abs(rep["max_residual"].get<double>() - 0.2) < 1e-9);
            found = true;
        }
    }
    CHECK(found);
}

TEST_CASE("distance subcommand returns the Euclidean value") {
    auto res = run("distance --patch riemannian-only --from 0,0 --to 3,4 --json");
    REQUIRE(res.exit_code == 0);
    auto j = json::parse(res.out);
    CHECK(std::abs(j["value"].get<double>() - 5.0) < 1e-6);
    CHECK(j["converged"] == true);
}

TEST_CASE("eval emits the metric quantities") {
    auto res = run("eval --patch euclidean-exact --x 0,0 --y 3,4 --json");
    REQUIRE(res.exit_code == 0);
    auto j = json::parse(res.out);
    CHECK(std::abs(j["alpha"].get<double>() - 5.0) < 1e-12);
    CHECK(std::abs(j["beta"].get<double>() - 0.6) < 1e-12);
    CHECK(std::abs(j["F"].get<double>() - 5.600259) < 1e-6);
    CHECK(j["strongly_convex"] == true);
    CHECK(j["g"].size() == 2);
}

TEST_CASE("geodesic prints CSV to stdout when no output directory is given") {
    auto res = run("geodesic --patch riemannian-only --x 0,0 --y 1,0 --t-end 1 --steps 8");
    REQUIRE(res.exit_code == 0);
    CHECK(res.out.rfind("t,x1,x2,y1,y2,speed\n", 0) == 0);
}

TEST_CASE("geodesic writes CSV artifacts into --out") {
    auto dir = fresh_dir("geo");
    auto res = run("geodesic --patch conformal --x 0,0 --y 1,0 --t-end 1 --steps 16 --out " +
                   dir.string() + " --json");
    REQUIRE(res.exit_code == 0);
    CHECK(fs::exists(dir / "geodesic-conformal.csv"));
    CHECK(fs::exists(dir / "geodesic-conformal.json"));
    std::string csv = slurp(dir / "geodesic-conformal.csv");
    CHECK(csv.rfind("t,x1,x2,y1,y2,speed\n", 0) == 0);
    fs::remove_all(dir);
}

TEST_CASE("check-weightable refuses the non-closed patch with a structured error") {
    auto res = run("check-weightable --patch rotational --json");
    CHECK(res.exit_code == 2);
    auto j = json::parse(res.out);
    CHECK(j["error"]["type"] == "not-closed");
}

TEST_CASE("triangle passes on closed patches and fails on the rotational patch") {
    auto ok = run("triangle --patch euclidean-exact --json");
    CHECK(ok.exit_code == 0);
    auto bad = run("triangle --patch rotational --json");
    CHECK(bad.exit_code == 1);
    auto j = json::parse(bad.out);
    bool flagged = false;
    for (const auto& rep : j["reports"])
        for (const auto& d : rep["details"])
            if (d.get<std::string>().find("precondition violated") != std::string::npos)
                flagged = true;
    CHECK(flagged);
}

TEST_CASE("identical manifest and seed produce byte-identical reports") {
    auto dir1 = fresh_dir("det1");
    auto dir2 = fresh_dir("det2");
    std::string base = "check-reversible --patch exact-bump --seed 777 --json --out ";
    auto r1 = run(base + dir1.string());
    auto r2 = run(base + dir2.string());
    REQUIRE(r1.exit_code == 0);
    REQUIRE(r2.exit_code == 0);
    CHECK(r1.out == r2.out);
    CHECK(slurp(dir1 / "check-reversible-exact-bump.json") ==
          slurp(dir2 / "check-reversible-exact-bump.json"));
    fs::remove_all(dir1);
    fs::remove_all(dir2);
}

TEST_CASE("malformed configs fail with structured JSON, never a bare crash") {
    const std::vector<std::string> corpus = {
        "",                                                            // empty file
        "name = \"x\"\n",                                              // missing keys
        "name = \"x\"\ndim = 2\ndomain = [[-1,1],[-1,1]]\na = [\"1\",\"0\",\"0\",\"1\"]\n",  // no b
        "garbage\n",                                                   // no key/value shape
        "name = \"x\"\ndim = 0\ndomain = []\na = []\nb = []\n",        // dim too small
        "name = \"x\"\ndim = two\ndomain = [[-1,1],[-1,1]]\na = [\"1\",\"0\",\"0\",\"1\"]\nb = [\"0\",\"0\"]\n",
        "name = \"x\"\ndim = 2\ndomain = [[-1,1]]\na = [\"1\",\"0\",\"0\",\"1\"]\nb = [\"0\",\"0\"]\n",
        "name = \"x\"\ndim = 2\ndomain = [[1,-1],[-1,1]]\na = [\"1\",\"0\",\"0\",\"1\"]\nb = [\"0\",\"0\"]\n",
        "name = \"x\"\ndim = 2\ndomain = [[-1,1],[-1,1]]\na = [\"1\",\"0\",\"0\"]\nb = [\"0\",\"0\"]\n",
        "name = \"x\"\ndim = 2\ndomain = [[-1,1],[-1,1]]\na = [\"1\",\"x1\",\"x2\",\"1\"]\nb = [\"0\",\"0\"]\n",
        "name = \"x\"\ndim = 2\ndomain = [[-1,1],[-1,1]]\na = [\"1\",\"0\",\"0\",\"1\"]\nb = [\"x3\",\"0\"]\n",
        "name = \"x\"\ndim = 2\ndomain = [[-1,1],[-1,1]]\na = [\"1\",\"0\",\"0\",\"1\"]\nb = [\"x1 +\",\"0\"]\n",
        "name = \"x\"\ndim = 2\ndomain = [[-1,1],[-1,1]]\na = [\"1\",\"0\",\"0\",\"1\"]\nb = [\"abs(x1)\",\"0\"]\n",
        "name = \"x\"\ndim = 2\ndomain = [[-1,1],[-1,1]]\na = [\"1\",\"0\",\"0\",\"-1\"]\nb = [\"0\",\"0\"]\n",  // not SPD
        "name = \"x\"\ndim = 2\ndomain = [[-1,1],[-1,1]]\na = [\"1\",\"0\",\"0\",\"1\"]\nb = [\"0\",\"0\"]\nzzz = 1\n",
        "name = \"x\"\ndim = 2\ndomain = [[-1,1],[-1,1]\na = [\"1\",\"0\",\"0\",\"1\"]\nb = [\"0\",\"0\"]\n",  // unbalanced
        "name = \"x\ndim = 2\ndomain = [[-1,1],[-1,1]]\na = [\"1\",\"0\",\"0\",\"1\"]\nb = [\"0\",\"0\"]\n",  // unterminated string
        "name = \"x\"\ndim = 2\ndomain = [[-1,1],[-1,1]] extra\na = [\"1\",\"0\",\"0\",\"1\"]\nb = [\"0\",\"0\"]\n",
        "name = \"x\"\ndim = 2\ndomain = [[-1,1],[-1,1]]\na = [\"1\",\"0\",\"0\",\"1\"]\nb = [\"1/0\",\"0\"]\n",  // eval blows up in SPD scan
        "\x01\x02\xff binary garbage\n",
    };
    auto dir = fresh_dir("fuzz");
    int idx = 0;
    for (const auto& text : corpus) {
        fs::path file = dir / ("bad_" + std::to_string(idx++) + ".toml");
        std::ofstream(file, std::ios::binary) << text;
        auto res = run("eval --patch " + file.string() + " --x 0,0 --y 1,0 --json");
        INFO("config #" << idx - 1 << ": " << text.substr(0, 60));
        CHECK(res.exit_code == 2);
        REQUIRE_NOTHROW(json::parse(res.out));
        auto j = json::parse(res.out);
        CHECK(j.contains("error"));
        CHECK_FALSE(j["error"]["message"].get<std::string>().empty());
    }
    fs::remove_all(dir);
}

TEST_CASE("malformed point arguments produce structured errors") {
    auto res = run("eval --patch euclidean-exact --x 0,0,0 --y 1,0 --json");
    CHECK(res.exit_code == 2);
    auto j = json::parse(res.out);
    CHECK(j["error"]["type"] == "error");
    auto res2 = run("eval --patch euclidean-exact --x 0,zebra --y 1,0 --json");
    CHECK(res2.exit_code == 2);
}

TEST_CASE("y = 0 at the CLI surface is a structured error") {
    auto res = run("eval --patch euclidean-exact --x 0,0 --y 0,0 --json");
    CHECK(res.exit_code == 2);
    auto j = json::parse(res.out);
    CHECK(j["error"]["type"] == "invalid-direction");
}
