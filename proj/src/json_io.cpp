#include "tsolve/json_io.hpp"

#include "tsolve/errors.hpp"

#include <cctype>
#include <cmath>
#include <memory>

namespace tsolve {

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

} // namespace

const json& require(const json& j, const std::string& key, const std::string& path)
{
    if (!j.is_object() || !j.contains(key)) throw ConfigError(join(path, key), "missing required field");
    return j.at(key);
}

double require_number(const json& j, const std::string& key, const std::string& path)
{
    const json& v = require(j, key, path);
    if (!v.is_number()) throw ConfigError(join(path, key), "expected a number");
    return v.get<double>();
}

static double opt_number(const json& j, const std::string& key, const std::string& path, double dflt)
{
    if (!j.is_object() || !j.contains(key)) return dflt;
    if (!j.at(key).is_number()) throw ConfigError(join(path, key), "expected a number");
    return j.at(key).get<double>();
}

json expsum_json(const ExpSum& s)
{
    return json{{"r", s.r_nominal},
                {"beta", s.beta},
                {"clipped", s.clipped},
                {"polished", s.polished},
                {"nodes", s.nodes},
                {"weights", s.weights},
                {"measured_sup_error", s.measured_sup_error},
                {"tail_bound", s.tail_bound},
                {"reference_bound", best_bound(s.r_nominal, s.beta)},
                {"clip_threshold", clip_threshold(s.r_nominal) / s.beta}};
}

ExpSum expsum_from_json(const json& j)
{
    ExpSum s;
    s.r_nominal = require(j, "r", "").get<int>();
    s.beta = require_number(j, "beta", "");
    s.clipped = j.value("clipped", false);
    s.polished = j.value("polished", false);
    s.nodes = require(j, "nodes", "").get<std::vector<double>>();
    s.weights = require(j, "weights", "").get<std::vector<double>>();
    s.measured_sup_error = j.value("measured_sup_error", std::nan(""));
    s.tail_bound = j.value("tail_bound", std::nan(""));
    if (s.nodes.size() != s.weights.size()) throw ConfigError("weights", "nodes and weights differ in length");
    return s;
}

json tensor_json(const TensorSum& t)
{
    json terms = json::array();
    for (const auto& term : t.terms) {
        json fac = json::array();
        if (term.rep == Representation::eigen)
            for (const auto& f : term.eig) fac.push_back({{"indices", f.idx}, {"values", f.val}});
        else
            for (const auto& f : term.nodal)
                fac.push_back({{"grid_n", f.mesh.n()},
                               {"elements", f.mesh.elements},
                               {"order", f.mesh.order},
                               {"length", f.mesh.L},
                               {"values", f.values}});
        terms.push_back({{"factors", fac}});
    }
    return json{{"representation", t.rep == Representation::eigen ? "eigen" : "nodal"}, {"d", t.d}, {"terms", terms}};
}

TensorSum tensor_from_json(const json& j, const std::string& path)
{
    std::string rep = require(j, "representation", path).get<std::string>();
    int d = int(require_number(j, "d", path));
    if (rep != "eigen" && rep != "nodal") throw ConfigError(join(path, "representation"), "must be eigen or nodal");
    TensorSum out;
    out.d = d;
    out.rep = rep == "eigen" ? Representation::eigen : Representation::nodal;
    const json& terms = require(j, "terms", path);
    for (std::size_t k = 0; k < terms.size(); ++k) {
        std::string tp = join(path, "terms[" + std::to_string(k) + "]");
        const json& fac = require(terms[k], "factors", tp);
        if (int(fac.size()) != d) throw ConfigError(join(tp, "factors"), "expected d factors");
        if (out.rep == Representation::eigen) {
            std::vector<SparseVec> fs;
            for (std::size_t i = 0; i < fac.size(); ++i) {
                std::string fp = join(tp, "factors[" + std::to_string(i) + "]");
                SparseVec v;
                v.idx = require(fac[i], "indices", fp).get<std::vector<int>>();
                v.val = require(fac[i], "values", fp).get<std::vector<double>>();
                if (v.idx.size() != v.val.size()) throw ConfigError(fp, "indices and values differ in length");
                for (std::size_t q = 0; q < v.idx.size(); ++q)
                    if (v.idx[q] < 1 || (q && v.idx[q] <= v.idx[q - 1]))
                        throw ConfigError(join(fp, "indices"), "indices must be ascending and >= 1");
                fs.push_back(std::move(v));
            }
            out.terms.push_back(RankOneTerm::eigen(std::move(fs)));
        } else {
            std::vector<GridFunction> fs;
            for (std::size_t i = 0; i < fac.size(); ++i) {
                std::string fp = join(tp, "factors[" + std::to_string(i) + "]");
                GridFunction g;
                g.values = require(fac[i], "values", fp).get<std::vector<double>>();
                g.mesh.order = int(opt_number(fac[i], "order", fp, 1));
                g.mesh.L = opt_number(fac[i], "length", fp, 1.0);
                int n = int(opt_number(fac[i], "grid_n", fp, double(g.values.size())));
                g.mesh.elements = g.mesh.order == 1 ? n + 1 : (n + 1) / 2;
                if (g.mesh.n() != int(g.values.size()))
                    throw ConfigError(join(fp, "values"), "value count does not match grid_n and order");
                fs.push_back(std::move(g));
            }
            out.terms.push_back(RankOneTerm::grid(std::move(fs)));
        }
    }
    return out;
}

json params_json(const SchemeParameters& p)
{
    return json{{"t", p.t},           {"zeta", p.zeta},     {"A1", p.A1},
                {"a_under", p.a_under}, {"c6", p.c6},         {"b", p.b},
                {"c_under", p.c_under}, {"Cbar0", p.Cbar0},   {"rho_bar", p.rho_bar},
                {"M", p.M},           {"element_order", p.element_order}, {"c8", p.c8_for_order()}};
}

SchemeParameters params_from_json(const json& j, const std::string& path)
{
    SchemeParameters p;
    if (j.is_null()) return p;
    if (!j.is_object()) throw ConfigError(path, "expected an object");
    p.t = opt_number(j, "t", path, p.t);
    p.zeta = opt_number(j, "zeta", path, p.zeta);
    p.A1 = opt_number(j, "A1", path, p.A1);
    p.a_under = opt_number(j, "a_under", path, p.a_under);
    p.c6 = opt_number(j, "c6", path, p.c6);
    p.b = opt_number(j, "b", path, p.b);
    p.c_under = opt_number(j, "c_under", path, p.c_under);
    p.Cbar0 = opt_number(j, "Cbar0", path, p.Cbar0);
    p.rho_bar = opt_number(j, "rho_bar", path, p.rho_bar);
    p.M = opt_number(j, "M", path, p.M);
    p.element_order = int(opt_number(j, "element_order", path, p.element_order));
    p.c8 = opt_number(j, "c8", path, p.c8);
    if (!(p.zeta > 0 && p.zeta <= 2)) throw ConfigError(join(path, "zeta"), "zeta must lie in (0, 2]");
    if (!(p.A1 >= 1)) throw ConfigError(join(path, "A1"), "A1 must be >= 1");
    if (!(p.a_under > 0 && p.a_under < M_PI)) throw ConfigError(join(path, "a_under"), "a_under must lie in (0, pi)");
    if (p.element_order != 1 && p.element_order != 2)
        throw ConfigError(join(path, "element_order"), "element_order must be 1 or 2");
    return p;
}

json growth_json(const GrowthClass& g)
{
    switch (g.kind) {
    case GrowthClass::Kind::polynomial: return json{{"kind", "polynomial"}, {"alpha", g.a}};
    case GrowthClass::Kind::stretched_exponential:
        return json{{"kind", "stretched_exponential"}, {"c", g.a}, {"beta", g.b}};
    case GrowthClass::Kind::tabulated: return json{{"kind", "tabulated"}, {"values", g.table}};
    }
    return {};
}

GrowthClass growth_from_json(const json& j, const std::string& path)
{
    if (j.is_null()) return GrowthClass::stretched_exponential(1.0, 1.0);
    std::string kind = require(j, "kind", path).get<std::string>();
    try {
        if (kind == "polynomial") return GrowthClass::polynomial(require_number(j, "alpha", path));
        if (kind == "stretched_exponential")
            return GrowthClass::stretched_exponential(require_number(j, "c", path), opt_number(j, "beta", path, 1.0));
        if (kind == "tabulated") return GrowthClass::tabulated(require(j, "values", path).get<std::vector<double>>());
    } catch (const DomainError& e) {
        throw ConfigError(path, e.what());
    }
    throw ConfigError(join(path, "kind"), "unknown growth kind '" + kind + "'");
}

namespace {

FactorSpectrum factor_from_json(const json& j, const std::string& path)
{
    std::string type = require(j, "type", path).get<std::string>();
    if (type == "dirichlet_laplacian") {
        int n = int(opt_number(j, "n_modes", path, 128));
        double L = opt_number(j, "length", path, 1.0);
        if (n < 1) throw ConfigError(join(path, "n_modes"), "must be >= 1");
        if (!(L > 0)) throw ConfigError(join(path, "length"), "must be positive");
        return dirichlet_laplacian_factor(n, L);
    }
    if (type == "explicit") {
        try {
            return explicit_factor(require(j, "eigenvalues", path).get<std::vector<double>>());
        } catch (const DomainError& e) {
            throw ConfigError(join(path, "eigenvalues"), e.what());
        }
    }
    throw ConfigError(join(path, "type"), "unknown factor type '" + type + "'");
}

} // namespace

SeparableOperator operator_from_json(const json& j, const std::string& path)
{
    const json& jd = require(j, "d", path);
    if (!jd.is_number_integer() || jd.get<int>() < 1) throw ConfigError(join(path, "d"), "d must be a positive integer");
    int d = jd.get<int>();
    SeparableOperator op;
    if (j.contains("factors")) {
        const json& fs = j.at("factors");
        if (!fs.is_array() || int(fs.size()) != d) throw ConfigError(join(path, "factors"), "expected d factor entries");
        for (int k = 0; k < d; ++k) op.factors.push_back(factor_from_json(fs[k], join(path, "factors[" + std::to_string(k) + "]")));
    } else {
        json f = j.value("factor", json{{"type", "dirichlet_laplacian"}});
        FactorSpectrum fac = factor_from_json(f, join(path, "factor"));
        op.factors.assign(d, fac);
    }
    if (j.contains("rotation")) {
        const json& R = j.at("rotation");
        if (!R.is_array() || int(R.size()) != d) throw ConfigError(join(path, "rotation"), "expected a d x d matrix");
        Eigen::MatrixXd A(d, d);
        for (int a = 0; a < d; ++a) {
            if (!R[a].is_array() || int(R[a].size()) != d) throw ConfigError(join(path, "rotation"), "expected a d x d matrix");
            for (int b = 0; b < d; ++b) A(a, b) = R[a][b].get<double>();
        }
        try {
            op = apply_rotation(op, rotate_spd(A));
        } catch (const DomainError& e) {
            throw ConfigError(join(path, "rotation"), e.what());
        }
    }
    return op;
}

json report_json(const SolveReport& r)
{
    return json{{"d", r.d},
                {"eps", r.eps},
                {"r", r.r},
                {"R", r.R},
                {"h", r.h},
                {"N", r.N},
                {"N_per_term", r.N_per_term},
                {"alphas", r.alphas},
                {"omegas", r.omegas},
                {"delta", r.delta},
                {"zeta_eff", r.zeta_eff},
                {"dofs", r.dofs},
                {"rank_in", r.rank_in},
                {"rank", r.rank_out},
                {"parameter_count", r.parameter_count},
                {"work",
                 {{"solves_nominal", r.solves_nominal},
                  {"solves_executed", r.solves_executed},
                  {"flops", r.flops}}},
                {"alpha_floor", {{"one_over_T_R", r.alpha_floor_tr}, {"eps_floor", r.alpha_floor_eps}, {"cbar", r.cbar}}},
                {"stability", {{"tripnorm_h1", r.stability_h1}}},
                {"constants_used", params_json(r.params)},
                {"growth", r.growth}};
}

json report_json(const SpectralReport& r)
{
    return json{{"r", r.r},
                {"R", r.R},
                {"rank", r.rank},
                {"parameter_count", r.parameter_count},
                {"sparsity_cost", r.sparsity},
                {"errors", {{"l2", r.err_l2}, {"h1", r.err_h1}, {"t_plus_2", r.err_t2}, {"inverse", r.err_inverse}}},
                {"bounds",
                 {{"C0", r.c0},
                  {"data_residual", r.residual_data},
                  {"inverse_bound", r.inverse_bound},
                  {"tripnorm_u_t2", r.trip_t2},
                  {"tripnorm_u_t2_zeta", r.trip_t2_zeta},
                  {"tripnorm_g_t_zeta", r.trip_g_zeta},
                  {"alpha_min", r.alpha_min}}}};
}

json criterion_json(const CriterionResult& c)
{
    json m = json::object();
    for (const auto& [k, v] : c.metrics) m[k] = v;
    return json{{"id", c.id}, {"name", c.name}, {"pass", c.pass}, {"detail", c.detail}, {"metrics", m}};
}

namespace {

// Recursive-descent parser over x with + - * / ^, parentheses and sin/cos/exp/sqrt.
struct ExprParser {
    using Fn = std::function<double(double)>;
    std::string s;
    std::size_t i = 0;
    std::string path;

    [[noreturn]] void fail(const std::string& msg) const
    {
        throw ConfigError(path, msg + " at position " + std::to_string(i) + " in '" + s + "'");
    }
    void ws()
    {
        while (i < s.size() && std::isspace((unsigned char)s[i])) ++i;
    }
    bool eat(char c)
    {
        ws();
        if (i < s.size() && s[i] == c) {
            ++i;
            return true;
        }
        return false;
    }
    Fn parse()
    {
        Fn f = expr();
        ws();
        if (i != s.size()) fail("unexpected character");
        return f;
    }
    Fn expr()
    {
        Fn a = term();
        for (;;) {
            if (eat('+')) {
                Fn b = term();
                a = [a, b](double x) { return a(x) + b(x); };
            } else if (eat('-')) {
                Fn b = term();
                a = [a, b](double x) { return a(x) - b(x); };
            } else return a;
        }
    }
    Fn term()
    {
        Fn a = power();
        for (;;) {
            if (eat('*')) {
                Fn b = power();
                a = [a, b](double x) { return a(x) * b(x); };
            } else if (eat('/')) {
                Fn b = power();
                a = [a, b](double x) { return a(x) / b(x); };
            } else return a;
        }
    }
    Fn power()
    {
        Fn a = unary();
        if (eat('^')) {
            Fn b = power();
            return [a, b](double x) { return std::pow(a(x), b(x)); };
        }
        return a;
    }
    Fn unary()
    {
        if (eat('-')) {
            Fn a = unary();
            return [a](double x) { return -a(x); };
        }
        return primary();
    }
    Fn primary()
    {
        ws();
        if (eat('(')) {
            Fn a = expr();
            if (!eat(')')) fail("expected ')'");
            return a;
        }
        if (i < s.size() && (std::isdigit((unsigned char)s[i]) || s[i] == '.')) {
            std::size_t used = 0;
            double v = std::stod(s.substr(i), &used);
            i += used;
            return [v](double) { return v; };
        }
        std::size_t st = i;
        while (i < s.size() && std::isalpha((unsigned char)s[i])) ++i;
        std::string id = s.substr(st, i - st);
        if (id == "x") return [](double x) { return x; };
        if (id == "pi") return [](double) { return M_PI; };
        double (*fn)(double) = nullptr;
        if (id == "sin") fn = [](double v) { return std::sin(v); };
        else if (id == "cos") fn = [](double v) { return std::cos(v); };
        else if (id == "exp") fn = [](double v) { return std::exp(v); };
        else if (id == "sqrt") fn = [](double v) { return std::sqrt(v); };
        if (!fn) fail(id.empty() ? "expected a term" : "unknown identifier '" + id + "'");
        if (!eat('(')) fail("expected '(' after function name");
        Fn a = expr();
        if (!eat(')')) fail("expected ')'");
        return [fn, a](double x) { return fn(a(x)); };
    }
};

} // namespace

std::function<double(double)> parse_generator(const std::string& text, const std::string& path)
{
    auto colon = text.find(':');
    if (colon == std::string::npos) throw ConfigError(path, "generator must look like kind:args");
    std::string kind = text.substr(0, colon), arg = text.substr(colon + 1);
    try {
        if (kind == "const") {
            double c = std::stod(arg);
            return [c](double) { return c; };
        }
        if (kind == "gauss") {
            auto comma = arg.find(',');
            if (comma == std::string::npos) throw ConfigError(path, "gauss generator needs m,s");
            double m = std::stod(arg.substr(0, comma)), s = std::stod(arg.substr(comma + 1));
            if (!(s > 0)) throw ConfigError(path, "gauss width must be positive");
            return [m, s](double x) { return std::exp(-(x - m) * (x - m) / (2 * s * s)); };
        }
    } catch (const std::invalid_argument&) {
        throw ConfigError(path, "malformed number in generator '" + text + "'");
    }
    if (kind == "poly") return ExprParser{arg, 0, path}.parse();
    throw ConfigError(path, "unknown generator kind '" + kind + "'");
}

} // namespace tsolve
