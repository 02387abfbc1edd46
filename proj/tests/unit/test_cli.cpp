#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "diracgap/cli.hpp"
#include "doctest.h"

using namespace diracgap;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    std::vector<const char*> argv{"diracgap"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream o, e;
    const int c = cli::run(static_cast<int>(argv.size()), argv.data(), o, e);
    return {c, o.str(), e.str()};
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST_CASE("eigenvalues command") {
    const Run r = run({"eigenvalues", "--dim", "3", "--nu", "0.5", "--k", "1"});
    REQUIRE(r.code == 0);
    const auto j = cli::Json::parse(r.out);
    CHECK(j["records"][0]["lambda"].get<double>() == doctest::Approx(0.8660254).epsilon(1e-4));
    CHECK(j["records"][0]["rel_error"].get<double>() <= 1e-4);
}

TEST_CASE("exit codes") {
    CHECK(run({"eigenvalues", "--dim", "2", "--nu", "0", "--k", "1"}).code == 2);
    CHECK(run({"eigenvalues", "--dim", "3", "--nu", "1.0"}).code == 1);
    CHECK(run({"eigenvalues", "--dim", "4", "--nu", "0.1"}).code == 1);
    CHECK(run({"eigenvalues", "--dim", "3"}).code == 1);
    CHECK(run({"eigenvalues", "--dim", "3", "--nu", "0.5", "--method", "bogus"}).code == 1);
    const Run core = run({"core-check", "--dim", "3", "--nu", "0.5"});
    CHECK(core.code == 1);
    CHECK(core.err.find("trivial branch") != std::string::npos);
    CHECK(run({"no-such-command"}).code == 1);
    CHECK(run({"hardy-check", "--dim", "3", "--nu", "1.0", "--samples", "4", "--nodes", "300"}).code == 0);
}

TEST_CASE("flags override the config file which overrides defaults") {
    const std::string path = "diracgap_test_config.json";
    {
        std::ofstream o(path);
        o << R"({"dim": 2, "nu": 0.25, "nodes": 600})";
    }
    const auto a = cli::Json::parse(run({"eigenvalues", "--config", path}).out);
    CHECK(a["dim"] == 2);
    CHECK(a["nu"].get<double>() == 0.25);
    CHECK(a["records"][0]["mesh"].get<std::string>().find("nodes=600") != std::string::npos);
    const auto b = cli::Json::parse(run({"eigenvalues", "--config", path, "--nu", "0.1"}).out);
    CHECK(b["nu"].get<double>() == 0.1);
    CHECK(b["dim"] == 2);
    {
        std::ofstream o(path);
        o << R"({"dim": 2, "frobnicate": 1})";
    }
    CHECK(run({"eigenvalues", "--config", path}).code == 1);
    std::remove(path.c_str());
}

TEST_CASE("stable CSV headers") {
    const Run s = run({"sweep", "--dim", "3", "--nus", "0.1,0.3", "--format", "csv"});
    CHECK(s.code == 0);
    CHECK(first_line(s.out) == "nu,lambda_num,lambda_analytic,rel_error,method,status,flagged");
    const Run t = run({"sweep", "--dim", "3", "--nus", "0.1", "--format", "csv", "--timing"});
    CHECK(first_line(t.out) == "nu,lambda_num,lambda_analytic,rel_error,runtime_ms,method,status,flagged");
    const Run e = run({"eigenvalues", "--dim", "3", "--nu", "0.3", "--format", "csv"});
    CHECK(first_line(e.out) == "method,dim,nu,kappa,channel,k,lambda,residual,analytic,rel_error");
}

TEST_CASE("sweep keeps going past failing rows") {
    const Run s = run({"sweep", "--dim", "2", "--nus", "0.1,0.7,0.0"});
    REQUIRE(s.code == 0);
    const auto j = cli::Json::parse(s.out);
    REQUIRE(j["rows"].size() == 3);
    CHECK(j["rows"][0]["status"] == 0);
    CHECK(j["rows"][1]["status"] == 1);
    CHECK(j["rows"][2]["status"] == 2);
    const Run empty = run({"sweep", "--dim", "3", "--format", "csv"});
    CHECK(empty.code == 0);
    CHECK(empty.out == "nu,lambda_num,lambda_analytic,rel_error,method,status,flagged\n");
}

TEST_CASE("near-critical sweep rows are flagged") {
    const auto j = cli::Json::parse(run({"sweep", "--dim", "3", "--nus", "0.999"}).out);
    CHECK(j["rows"][0]["flagged"] == true);
}

TEST_CASE("output is byte-identical across thread counts") {
    for (const std::vector<std::string>& base :
         {std::vector<std::string>{"hardy-check", "--dim", "2", "--nu", "0.25", "--samples", "8", "--nodes", "300"},
          std::vector<std::string>{"eigenvalues", "--dim", "3", "--nu", "0.4", "--kappa-max", "2", "--k", "3"},
          std::vector<std::string>{"certificate", "--dim", "3", "--samples", "5", "--cells", "60"}}) {
        auto a = base, b = base;
        a.insert(a.end(), {"--threads", "1"});
        b.insert(b.end(), {"--threads", "4"});
        const Run ra = run(a), rb = run(b);
        CHECK(ra.code == 0);
        CHECK(ra.out == rb.out);
    }
}

TEST_CASE("output file") {
    const std::string path = "diracgap_test_out.json";
    CHECK(run({"kernel-check", "--samples", "3", "--cells", "40", "-o", path}).code == 0);
    std::ifstream in(path);
    const auto j = cli::Json::parse(in);
    CHECK(j["command"] == "kernel-check");
    std::remove(path.c_str());
}
