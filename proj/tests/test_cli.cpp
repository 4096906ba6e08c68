#include "tsolve/cli.hpp"
#include "tsolve/errors.hpp"
#include "tsolve/json_io.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

using namespace tsolve;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args)
{
    args.insert(args.begin(), "tsolve");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = run_command(int(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string data(const std::string& f) { return std::string(TSOLVE_EXAMPLES_DIR) + "/" + f; }

} // namespace

TEST_CASE("expsum subcommand")
{
    Run r = run({"expsum", "--r", "9", "--clip"});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["schema"] == 1);
    CHECK(j["r"] == 9);
    CHECK(j["clipped"] == true);
    CHECK(j["nodes"].size() == j["weights"].size());
    CHECK(j["clip_threshold"].get<double>() == doctest::Approx(6.45596140562437e-4));
    ExpSum s = expsum_from_json(j);
    CHECK(s.r_nominal == 9);
}

TEST_CASE("missing d is a configuration error naming the field")
{
    Run r = run({"spectral-solve", "--config", data("missing_d.json")});
    CHECK(r.code == 2);
    json e = json::parse(r.err);
    CHECK(e["error"]["field"] == "operator.d");
    CHECK(e["error"]["type"] == "config");
}

TEST_CASE("usage errors")
{
    CHECK(run({}).code == 2);
    CHECK(run({"validate", "--suite", "bogus"}).code == 2);
    CHECK(run({"spectral-solve", "--config", "/nonexistent.json"}).code == 2);
    CHECK(run({"bench-dims", "--d", "2,x"}).code == 2);
}

TEST_CASE("spectral-solve report")
{
    Run r = run({"spectral-solve", "--config", data("spectral_d2.json")});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    for (const char* k : {"r", "R", "rank", "parameter_count", "errors", "bounds", "timestamp"}) CHECK(j.contains(k));
    CHECK(j["errors"]["l2"].get<double>() >= 0);
    CHECK(j["errors"]["h1"].get<double>() <= 1e-2 * 10);
    CHECK(j["rank"].get<int>() <= 2 * j["R"].get<int>());
}

TEST_CASE("scheme-exp is deterministic and writes CSV")
{
    Run a = run({"scheme-exp", "--config", data("scheme_d3.json"), "--threads", "2"});
    Run b = run({"scheme-exp", "--config", data("scheme_d3.json"), "--threads", "1"});
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    json ja = json::parse(a.out), jb = json::parse(b.out);
    ja.erase("timestamp");
    jb.erase("timestamp");
    CHECK(ja.dump() == jb.dump());
    REQUIRE(ja["runs"].size() == 2);
    for (const auto& run : ja["runs"]) {
        CHECK(run["rank"].get<int>() <= run["r"].get<int>() * run["R"].get<int>());
        CHECK(run["errors"]["rel_h1"].get<double>() <= run["eps"].get<double>());
    }
}

TEST_CASE("bench-dims sweep")
{
    Run r = run({"bench-dims", "--d", "2,4,8", "--eps", "1e-2"});
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) lines.push_back(line);
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "d,eps,r,R,N,rank,params,work,h1_error");
    CHECK(lines[1].rfind("2,", 0) == 0);
    CHECK(lines[3].rfind("8,", 0) == 0);
}

TEST_CASE("validate suite")
{
    Run r = run({"validate", "--suite", "expsum"});
    CHECK(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["pass"] == true);
    CHECK(j["criteria"].size() == 2);
    CHECK(r.err.find("AC1 PASS") != std::string::npos);
}

TEST_CASE("factor generators")
{
    auto p = parse_generator("poly:x*(1-x)", "g");
    CHECK(p(0.25) == doctest::Approx(0.1875));
    CHECK(parse_generator("poly:2^3^2 - -1", "g")(0.0) == doctest::Approx(513.0));
    CHECK(parse_generator("poly:sin(pi*x)^2 + exp(0)/2", "g")(0.5) == doctest::Approx(1.5));
    CHECK(parse_generator("const:2.5", "g")(0.7) == 2.5);
    CHECK(parse_generator("gauss:0.5,0.1", "g")(0.5) == doctest::Approx(1.0));
    CHECK_THROWS_AS(parse_generator("poly:x*(1-x", "data.factor"), ConfigError);
    CHECK_THROWS_AS(parse_generator("poly:y", "data.factor"), ConfigError);
    CHECK_THROWS_AS(parse_generator("wave:1", "data.factor"), ConfigError);
    try {
        parse_generator("gauss:0.5", "data.terms[1].factors[0]");
    } catch (const ConfigError& e) {
        CHECK(e.field == "data.terms[1].factors[0]");
    }
}

TEST_CASE("config parsing")
{
    SeparableOperator op = operator_from_json(json::parse(R"({"d": 2, "factors": [
        {"type": "dirichlet_laplacian", "length": 2.0}, {"type": "explicit", "eigenvalues": [1, 4, 9]}]})"), "operator");
    CHECK(op.d() == 2);
    CHECK(op.factors[1].modes() == 3);
    try {
        operator_from_json(json::parse(R"({"d": 2, "factors": [{"type": "dirichlet_laplacian"}, {"type": "spline"}]})"), "operator");
        FAIL("expected a configuration error");
    } catch (const ConfigError& e) {
        CHECK(e.field == "operator.factors[1].type");
    }
    try {
        params_from_json(json::parse(R"({"element_order": 3})"), "params");
        FAIL("expected a configuration error");
    } catch (const ConfigError& e) {
        CHECK(e.field == "params.element_order");
    }
    GrowthClass g = growth_from_json(json::parse(R"({"kind": "polynomial", "alpha": 3})"), "growth");
    CHECK(g.gamma(2) == doctest::Approx(8.0));

    TensorSum t = tensor_from_json(json::parse(R"({"representation": "eigen", "d": 2,
        "terms": [{"factors": [{"indices": [1, 3], "values": [1, 0.5]}, {"indices": [2], "values": [2]}]}]})"), "data.tensor");
    CHECK(t.rank() == 1);
    CHECK(t.terms[0].eig[0].at(3) == 0.5);
    json back = tensor_json(t);
    CHECK(tensor_from_json(back, "x").terms[0].eig[1].at(2) == 2.0);
}
