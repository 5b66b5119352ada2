#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#ifndef BSSLAB_BIN
#error "BSSLAB_BIN must point at the CLI binary"
#endif

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(BSSLAB_BIN) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string tmp_path(const std::string& name) {
    return std::string("/tmp/bsslab_test_") + name;
}

}  // namespace

TEST_CASE("cli: moments row matches the closed form and output is deterministic") {
    const std::string out1 = tmp_path("m1.csv");
    const std::string out2 = tmp_path("m2.csv");
    const std::string args =
        "moments --variant classical --n 9 --p 1 --x 2 --out ";
    REQUIRE(run(args + out1) == 0);
    REQUIRE(run(args + out2) == 0);
    const std::string a = slurp(out1);
    CHECK(a == slurp(out2));
    CHECK(a.find("# command=moments") != std::string::npos);
    CHECK(a.find("2.1000000000000001") != std::string::npos);  // e1 = 2.1 round-tripped
}

TEST_CASE("cli: king outside I_n exits 2 naming the interval") {
    CHECK(run("moments --variant king --n 2 --p 1 --x 0.1") == 2);
}

TEST_CASE("cli: impossible tolerance exits 3") {
    CHECK(run("moments --variant classical --n 9 --p 1 --x 2 --tol 1e-18") == 3);
}

TEST_CASE("cli: malformed input exits 2") {
    CHECK(run("eval --variant classical --f 't*(' --x 1") == 2);
    CHECK(run("eval --variant classical --x-grid 0:5:-1") == 2);
    CHECK(run("eval --variant classical --f 'exp(t)' --x 1") == 2);
    CHECK(run("moments --variant stancu --alpha 3 --beta 1 --x 1") == 2);
}

TEST_CASE("cli: eval of e0 over a grid gives six unit rows") {
    const std::string out = tmp_path("eval.csv");
    REQUIRE(run("eval --variant classical --f e0 --x-grid 0:5:1 --n 10 --p 1 --out " + out) == 0);
    const std::string body = slurp(out);
    int ones = 0;
    std::istringstream is(body);
    std::string line;
    while (std::getline(is, line))
        if (line.find(",1,0") != std::string::npos || line.find(",0.99999") != std::string::npos)
            ++ones;
    CHECK(ones == 6);
}

TEST_CASE("cli: voronovskaja scaled errors for e1") {
    const std::string out = tmp_path("vor.json");
    REQUIRE(run("voronovskaja --variant classical --f e1 --x 1 --n-list 10,100,1000 --p 1 "
                "--format json --out " + out) == 0);
    const auto j = nlohmann::json::parse(slurp(out));
    REQUIRE(j["records"].size() == 3);
    const double first = std::stod(j["records"][0]["scaled_error"].get<std::string>());
    CHECK_THAT(first, Catch::Matchers::WithinRel(10.0 / 11.0, 1e-9));
    const double target = std::stod(j["records"][0]["target"].get<std::string>());
    CHECK(target == 1.0);
}

TEST_CASE("cli: statconv square-perturbed run passes") {
    const std::string out = tmp_path("stat.csv");
    REQUIRE(run("statconv --schedule square-perturbed --N 100000 --eps 0.05 --out " + out) == 0);
    const std::string body = slurp(out);
    CHECK(body.find("alpha") != std::string::npos);
    CHECK(body.find("gamma") != std::string::npos);
}

TEST_CASE("cli: q-moments instance") {
    const std::string out = tmp_path("qm.json");
    REQUIRE(run("moments --variant q --n 4 --p 1 --q 0.9 --x 1 --format json --out " + out) == 0);
    const auto j = nlohmann::json::parse(slurp(out));
    const double e1 = std::stod(j["records"][0]["e1"].get<std::string>());
    CHECK_THAT(e1, Catch::Matchers::WithinRel(1.5058948800900616, 1e-12));
}

TEST_CASE("cli: bounds subcommand holds on a smooth function") {
    CHECK(run("bounds --variant classical --f exp_neg --n 20 --p 1 --b 2 --x 1") == 0);
}
