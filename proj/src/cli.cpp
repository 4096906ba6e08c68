#include "tsolve/cli.hpp"

#include "tsolve/errors.hpp"
#include "tsolve/json_io.hpp"
#include "tsolve/oracle.hpp"
#include "tsolve/parallel.hpp"
#include "tsolve/scheme_exp.hpp"
#include "tsolve/spectral_pipeline.hpp"
#include "tsolve/validation.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace tsolve {

namespace {

using Fn = std::function<double(double)>;

std::string timestamp()
{
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

json load_json_file(const std::string& path, const std::string& field)
{
    std::ifstream in(path);
    if (!in) throw ConfigError(field, "cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(field, std::string("invalid JSON: ") + e.what());
    }
}

void write_text(const std::string& path, const std::string& text, std::ostream& fallback)
{
    if (path.empty() || path == "-") {
        fallback << text;
        return;
    }
    std::ofstream o(path);
    if (!o) throw std::runtime_error("cannot write '" + path + "'");
    o << text;
}

json envelope(const std::string& command, std::uint64_t seed)
{
    return json{{"schema", 1}, {"command", command}, {"seed", seed}, {"timestamp", timestamp()}};
}

// Parsed "data" block: either closed-form factor generators or an explicit tensor.
struct DataSpec {
    std::vector<std::vector<Fn>> functions;
    bool has_tensor = false;
    TensorSum tensor;
    int modes = 64;
};

DataSpec data_from_json(const json& j, int d, const std::string& base_dir)
{
    const std::string path = "data";
    DataSpec ds;
    if (!j.is_object()) throw ConfigError(path, "missing required field");
    if (j.contains("modes")) {
        if (!j.at("modes").is_number_integer() || j.at("modes").get<int>() < 1)
            throw ConfigError("data.modes", "must be a positive integer");
        ds.modes = j.at("modes").get<int>();
    }
    auto gens = [&](const json& arr, const std::string& p) {
        if (!arr.is_array() || int(arr.size()) != d) throw ConfigError(p, "expected d generator strings");
        std::vector<Fn> fs;
        for (int k = 0; k < d; ++k) {
            std::string pk = p + "[" + std::to_string(k) + "]";
            if (!arr[k].is_string()) throw ConfigError(pk, "expected a generator string");
            fs.push_back(parse_generator(arr[k].get<std::string>(), pk));
        }
        return fs;
    };
    if (j.contains("factor")) {
        if (!j.at("factor").is_string()) throw ConfigError("data.factor", "expected a generator string");
        ds.functions.push_back(std::vector<Fn>(d, parse_generator(j.at("factor").get<std::string>(), "data.factor")));
    } else if (j.contains("factors")) {
        ds.functions.push_back(gens(j.at("factors"), "data.factors"));
    } else if (j.contains("terms")) {
        const json& t = j.at("terms");
        if (!t.is_array() || t.empty()) throw ConfigError("data.terms", "expected a nonempty list");
        for (std::size_t k = 0; k < t.size(); ++k) {
            std::string p = "data.terms[" + std::to_string(k) + "]";
            ds.functions.push_back(gens(require(t[k], "factors", p), p + ".factors"));
        }
    } else if (j.contains("tensor") || j.contains("file")) {
        ds.has_tensor = true;
        if (j.contains("tensor")) ds.tensor = tensor_from_json(j.at("tensor"), "data.tensor");
        else {
            std::string f = j.at("file").get<std::string>();
            if (!f.empty() && f[0] != '/' && !base_dir.empty()) f = base_dir + "/" + f;
            ds.tensor = tensor_from_json(load_json_file(f, "data.file"), "data.file");
        }
        if (ds.tensor.d != d) throw ConfigError("data", "tensor dimension differs from operator.d");
        if (ds.tensor.terms.empty()) throw ConfigError("data", "tensor has no terms");
    } else {
        throw ConfigError(path, "one of factor, factors, terms, tensor, file is required");
    }
    return ds;
}

bool has_evaluators(const SeparableOperator& op)
{
    for (const auto& f : op.factors)
        if (!f.evaluator) return false;
    return true;
}

TensorSum project(const SeparableOperator& op, const DataSpec& ds)
{
    if (!has_evaluators(op)) throw ConfigError("data", "generator data needs factors with known eigenfunctions");
    TensorSum f;
    f.d = op.d();
    for (const auto& term : ds.functions) {
        std::vector<SparseVec> fac;
        for (int j = 0; j < op.d(); ++j) {
            int M = std::min(ds.modes, op.factors[j].modes());
            fac.push_back(project_sine(term[j], op.factors[j], M));
        }
        f.push(RankOneTerm::eigen(std::move(fac)));
    }
    return f;
}

std::vector<double> eps_list(const json& cfg)
{
    const json& e = require(cfg, "eps", "");
    std::vector<double> out;
    if (e.is_number()) out.push_back(e.get<double>());
    else if (e.is_array()) {
        for (const auto& v : e) {
            if (!v.is_number()) throw ConfigError("eps", "expected numbers");
            out.push_back(v.get<double>());
        }
    } else throw ConfigError("eps", "expected a number or a list");
    if (out.empty()) throw ConfigError("eps", "list is empty");
    for (double v : out)
        if (!(v > 0 && v < 1)) throw ConfigError("eps", "each eps must lie in (0, 1)");
    return out;
}

std::string dir_of(const std::string& p)
{
    auto s = p.find_last_of('/');
    return s == std::string::npos ? "" : p.substr(0, s);
}

std::vector<int> int_list(const std::string& s, const std::string& field)
{
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            int v = std::stoi(tok, &used);
            if (used != tok.size() || v < 1) throw std::invalid_argument(tok);
            out.push_back(v);
        } catch (const std::exception&) {
            throw ConfigError(field, "malformed entry '" + tok + "'");
        }
    }
    if (out.empty()) throw ConfigError(field, "list is empty");
    return out;
}

std::vector<double> double_list(const std::string& s, const std::string& field)
{
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            double v = std::stod(tok, &used);
            if (used != tok.size() || !(v > 0 && v < 1)) throw std::invalid_argument(tok);
            out.push_back(v);
        } catch (const std::exception&) {
            throw ConfigError(field, "malformed entry '" + tok + "'");
        }
    }
    if (out.empty()) throw ConfigError(field, "list is empty");
    return out;
}

struct Options {
    std::string config, out, csv, suite = "all", d_list = "2,4,8", eps_list = "1e-2";
    unsigned threads = 0;
    std::uint64_t seed = 20240601;
    int r = 16;
    double beta = 1.0;
    bool clip = false, polish = false;
};

int cmd_expsum(const Options& o, std::ostream& out)
{
    if (o.r < 1) throw ConfigError("r", "must be >= 1");
    if (!(o.beta > 0)) throw ConfigError("beta", "must be positive");
    ExpSum s = rescale(build_expsum(o.r, o.polish), o.beta);
    if (o.clip) s = clip(s);
    json j = envelope("expsum", o.seed);
    j.update(expsum_json(s));
    write_text(o.out, j.dump(2) + "\n", out);
    return 0;
}

int cmd_spectral(const Options& o, std::ostream& out)
{
    if (o.config.empty()) throw ConfigError("config", "--config is required");
    json cfg = load_json_file(o.config, "config");
    SeparableOperator op = operator_from_json(require(cfg, "operator", ""), "operator");
    DataSpec ds = data_from_json(require(cfg, "data", ""), op.d(), dir_of(o.config));
    SchemeParameters p = params_from_json(cfg.value("params", json()), "params");
    GrowthClass gamma = growth_from_json(cfg.value("growth", json()), "growth");
    double eps = eps_list(cfg).front();
    bool clipped = cfg.value("clipped", true);
    TensorSum f = ds.has_tensor ? ds.tensor : project(op, ds);
    if (f.rep != Representation::eigen) throw ConfigError("data", "spectral-solve needs eigen-represented data");
    try {
        validate(p, op.lambda_min());
    } catch (const DomainError& e) {
        throw ConfigError("params", e.what());
    }
    SpectralSolution sol = solve_spectral(op, f, [&](int) { return f; }, gamma, eps, p, clipped, true);
    json j = envelope("spectral-solve", cfg.value("seed", o.seed));
    j.update(report_json(sol.report));
    j["eps"] = eps;
    j["d"] = op.d();
    j["clipped"] = clipped;
    j["growth"] = growth_json(gamma);
    j["constants_used"] = params_json(p);
    write_text(o.out, j.dump(2) + "\n", out);
    return 0;
}

struct SchemeRun {
    SolveReport rep;
    bool has_errors = false;
    ErrorNorms err;
};

json scheme_run_json(const SchemeRun& run)
{
    json j = report_json(run.rep);
    if (run.has_errors)
        j["errors"] = {{"h1", run.err.h1},
                       {"l2", run.err.l2},
                       {"rel_h1", run.err.h1 / run.err.exact_h1},
                       {"rel_l2", run.err.l2 / run.err.exact_l2}};
    return j;
}

std::string csv_header() { return "d,eps,r,R,N,rank,params,work,h1_error\n"; }

std::string csv_row(const SolveReport& r, double h1)
{
    std::ostringstream s;
    s << std::setprecision(10) << r.d << ',' << r.eps << ',' << r.r << ',' << r.R << ',' << r.N << ',' << r.rank_out
      << ',' << r.parameter_count << ',' << work_estimate(r) << ',' << h1 << '\n';
    return s.str();
}

int cmd_scheme(const Options& o, std::ostream& out)
{
    if (o.config.empty()) throw ConfigError("config", "--config is required");
    json cfg = load_json_file(o.config, "config");
    SeparableOperator op = operator_from_json(require(cfg, "operator", ""), "operator");
    DataSpec ds = data_from_json(require(cfg, "data", ""), op.d(), dir_of(o.config));
    SchemeParameters p = params_from_json(cfg.value("params", json()), "params");
    GrowthClass gamma = growth_from_json(cfg.value("growth", json()), "growth");
    std::vector<double> eps = eps_list(cfg);
    if (ds.has_tensor && ds.tensor.rep != Representation::nodal)
        throw ConfigError("data", "scheme-exp needs nodal data or factor generators");
    try {
        validate(p, op.lambda_min());
    } catch (const DomainError& e) {
        throw ConfigError("params", e.what());
    }
    bool oracle = cfg.value("oracle", true) && !ds.has_tensor && has_evaluators(op);
    ExactProblem ex;
    if (oracle) {
        ex.op = op;
        ex.f = project(op, ds);
        ex.functions = ds.functions;
    }

    std::vector<SchemeRun> runs;
    for (double e : eps) {
        TensorSum g;
        if (ds.has_tensor) g = ds.tensor;
        else {
            g.d = op.d();
            g.rep = Representation::nodal;
            for (const auto& term : ds.functions) {
                std::vector<GridFunction> fac;
                for (int j = 0; j < op.d(); ++j) fac.push_back(interpolate(scheme_mesh(op, j, e, p), term[j]));
                g.push(RankOneTerm::grid(std::move(fac)));
            }
        }
        SchemeResult res = run_scheme_exp(op, g, e, p, gamma);
        SchemeRun run{res.report, false, {}};
        if (oracle) {
            run.err = error_norms(ex, res.u);
            run.has_errors = true;
        }
        runs.push_back(run);
    }

    json j = envelope("scheme-exp", cfg.value("seed", o.seed));
    if (runs.size() == 1) j.update(scheme_run_json(runs[0]));
    else {
        j["runs"] = json::array();
        for (const auto& r : runs) j["runs"].push_back(scheme_run_json(r));
    }
    write_text(o.out, j.dump(2) + "\n", out);
    if (!o.csv.empty()) {
        std::string text = csv_header();
        for (const auto& r : runs) text += csv_row(r.rep, r.has_errors ? r.err.h1 : std::nan(""));
        write_text(o.csv, text, out);
    }
    return 0;
}

int cmd_validate(const Options& o, std::ostream& out, std::ostream& log)
{
    std::vector<CriterionResult> res = run_suite(o.suite, o.seed);
    bool all = true;
    json j = envelope("validate", o.seed);
    j["suite"] = o.suite;
    j["criteria"] = json::array();
    for (const auto& c : res) {
        all = all && c.pass;
        j["criteria"].push_back(criterion_json(c));
        log << "AC" << c.id << ' ' << (c.pass ? "PASS" : "FAIL") << ' ' << c.name << " (" << std::fixed
                  << std::setprecision(1) << c.seconds << "s): " << c.detail << '\n';
        log.unsetf(std::ios::floatfield);
    }
    j["pass"] = all;
    write_text(o.out, j.dump(2) + "\n", out);
    return all ? 0 : 1;
}

int cmd_bench(const Options& o, std::ostream& out)
{
    std::vector<int> ds = int_list(o.d_list, "d");
    std::vector<double> es = double_list(o.eps_list, "eps");
    SchemeParameters p;
    GrowthClass gamma = GrowthClass::stretched_exponential(1.0, 1.0);
    if (!o.config.empty()) {
        json cfg = load_json_file(o.config, "config");
        p = params_from_json(cfg.value("params", json()), "params");
        gamma = growth_from_json(cfg.value("growth", json()), "growth");
    }
    std::string text = csv_header();
    json j = envelope("bench-dims", o.seed);
    j["rows"] = json::array();
    for (double e : es)
        for (int d : ds) {
            BenchRow row = run_bench_row(d, e, p, gamma);
            text += csv_row(row.report, row.errors.h1);
            json rj = report_json(row.report);
            rj["errors"] = {{"h1", row.errors.h1}, {"rel_h1", row.errors.h1 / row.errors.exact_h1}};
            rj["data_norm_surrogate"] = row.surrogate;
            j["rows"].push_back(rj);
        }
    write_text(o.csv, text, out);
    if (!o.out.empty()) write_text(o.out, j.dump(2) + "\n", out);
    return 0;
}

json error_json(const std::string& type, const std::string& msg, const std::string& field = "")
{
    json e{{"type", type}, {"message", msg}};
    if (!field.empty()) e["field"] = field;
    return json{{"schema", 1}, {"error", e}};
}

} // namespace

int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"tsolve: tensor-sparse solver for separable elliptic operator equations"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--threads", o.threads, "worker threads (0: TSOLVE_THREADS or hardware)");

    auto* es = app.add_subcommand("expsum", "build an exponential sum for 1/x on [beta, inf)");
    es->add_option("--r", o.r, "number of terms")->required();
    es->add_option("--beta", o.beta, "left end of the interval");
    es->add_flag("--clip", o.clip, "zero weights below the clipping threshold");
    es->add_flag("--polish", o.polish, "least-squares refinement of the sinc sum");
    es->add_option("--out", o.out, "output JSON (default stdout)");
    es->add_option("--seed", o.seed);

    auto* sp = app.add_subcommand("spectral-solve", "exact spectral realization of the approximate inverse");
    sp->add_option("--config", o.config)->required();
    sp->add_option("--out", o.out);
    sp->add_option("--seed", o.seed);

    auto* sc = app.add_subcommand("scheme-exp", "finite element realization through contour quadrature");
    sc->add_option("--config", o.config)->required();
    sc->add_option("--out", o.out);
    sc->add_option("--csv", o.csv);
    sc->add_option("--seed", o.seed);

    auto* va = app.add_subcommand("validate", "run acceptance suites");
    va->add_option("--suite", o.suite)->check(CLI::IsMember({"expsum", "spectral", "contour", "scheme", "all"}));
    va->add_option("--seed", o.seed);
    va->add_option("--out", o.out);

    auto* be = app.add_subcommand("bench-dims", "dimension sweep on the x(1-x) rank-one problem");
    be->add_option("--d", o.d_list, "comma-separated dimensions");
    be->add_option("--eps", o.eps_list, "comma-separated tolerances");
    be->add_option("--config", o.config, "optional params/growth overrides");
    be->add_option("--csv", o.csv, "CSV output (default stdout)");
    be->add_option("--out", o.out, "optional JSON report");
    be->add_option("--seed", o.seed);

    for (auto* s : {es, sp, sc, va, be}) s->add_option("--threads", o.threads);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << error_json("usage", e.what()).dump() << '\n';
        return 2;
    }

    try {
        if (o.threads > 0) set_threads(o.threads);
        if (*es) return cmd_expsum(o, out);
        if (*sp) return cmd_spectral(o, out);
        if (*sc) return cmd_scheme(o, out);
        if (*va) return cmd_validate(o, out, err);
        if (*be) return cmd_bench(o, out);
    } catch (const ConfigError& e) {
        err << error_json("config", e.what(), e.field).dump() << '\n';
        return 2;
    } catch (const json::exception& e) {
        err << error_json("config", e.what(), "config").dump() << '\n';
        return 2;
    } catch (const CapacityError& e) {
        err << error_json("capacity", e.what()).dump() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << error_json("runtime", e.what()).dump() << '\n';
        return 1;
    }
    return 2;
}

} // namespace tsolve
