#include "polylab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <set>
#include <thread>

#include "polylab/abelint.hpp"
#include "polylab/chainstrata.hpp"
#include "polylab/errors.hpp"
#include "polylab/interp.hpp"
#include "polylab/io.hpp"
#include "polylab/multijet.hpp"
#include "polylab/perturb.hpp"
#include "polylab/pfaffrolle.hpp"
#include "polylab/rng.hpp"

namespace polylab::cli {

using nlohmann::ordered_json;

namespace {

void check_keys(const ordered_json& j, const std::string& path,
                const std::set<std::string>& allowed,
                const std::set<std::string>& required) {
    if (!j.is_object()) throw SchemaError(path, "expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key()))
            throw SchemaError(path + "." + it.key(), "unknown field");
    }
    for (const auto& k : required) {
        if (!j.contains(k)) throw SchemaError(path + "." + k, "missing field");
    }
}

double require_number(const ordered_json& j, const std::string& path) {
    if (!j.is_number()) throw SchemaError(path, "expected a number");
    return j.get<double>();
}

long long require_integer(const ordered_json& j, const std::string& path) {
    if (!j.is_number_integer()) throw SchemaError(path, "expected an integer");
    return j.get<long long>();
}

std::string require_string(const ordered_json& j, const std::string& path) {
    if (!j.is_string()) throw SchemaError(path, "expected a string");
    return j.get<std::string>();
}

std::vector<double> require_number_array(const ordered_json& j,
                                         const std::string& path) {
    if (!j.is_array()) throw SchemaError(path, "expected an array");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(require_number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

} // namespace

// Optional per-run tolerance overrides (top-level "tolerances" object).
struct Tolerances {
    double trace_step = 0.0;       // 0 = subcommand default
    double h_tol = 0.0;            // abel zero refinement
    double regularity_floor = 0.0; // cycles |Delta' - 1| classification
};

namespace {

Tolerances parse_tolerances(const ordered_json& config) {
    Tolerances t;
    if (!config.contains("tolerances")) return t;
    const auto& j = config["tolerances"];
    check_keys(j, "$.tolerances", {"trace_step", "h_tol", "regularity_floor"},
               {});
    if (j.contains("trace_step"))
        t.trace_step = require_number(j["trace_step"], "$.tolerances.trace_step");
    if (j.contains("h_tol"))
        t.h_tol = require_number(j["h_tol"], "$.tolerances.h_tol");
    if (j.contains("regularity_floor"))
        t.regularity_floor =
            require_number(j["regularity_floor"], "$.tolerances.regularity_floor");
    return t;
}

} // namespace

Polynomial polynomial_from_json(const ordered_json& j, const std::string& path) {
    check_keys(j, path, {"vars", "terms"}, {"vars", "terms"});
    const int nvars = static_cast<int>(require_integer(j["vars"], path + ".vars"));
    Polynomial p(nvars);
    const auto& terms = j["terms"];
    if (!terms.is_array()) throw SchemaError(path + ".terms", "expected an array");
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const std::string tp = path + ".terms[" + std::to_string(i) + "]";
        check_keys(terms[i], tp, {"c", "e"}, {"c", "e"});
        const double c = require_number(terms[i]["c"], tp + ".c");
        const auto evec = require_number_array(terms[i]["e"], tp + ".e");
        if (static_cast<int>(evec.size()) != nvars)
            throw SchemaError(tp + ".e", "exponent arity mismatch");
        Polynomial::Exponents e(nvars);
        for (int k = 0; k < nvars; ++k) e[k] = static_cast<int>(evec[k]);
        p.add_term(e, c);
    }
    return p;
}

ordered_json polynomial_to_json(const Polynomial& p) {
    ordered_json j;
    j["vars"] = p.nvars();
    j["terms"] = ordered_json::array();
    for (const auto& [e, c] : p.terms()) {
        ordered_json t;
        t["c"] = c;
        t["e"] = e;
        j["terms"].push_back(t);
    }
    return j;
}

normalforms::NormalFormSpec normal_form_from_json(const ordered_json& j,
                                                  const std::string& path) {
    if (!j.is_object() || !j.contains("type"))
        throw SchemaError(path, "expected a normal-form object with a type tag");
    const std::string type = require_string(j["type"], path + ".type");
    if (type == "S0") {
        check_keys(j, path, {"type", "lambda"}, {"type", "lambda"});
        normalforms::S0 s;
        s.lambda = require_number(j["lambda"], path + ".lambda");
        return s;
    }
    if (type == "Smu") {
        check_keys(j, path,
                   {"type", "m", "n", "mu", "sign", "weierstrass", "lambda_top"},
                   {"type", "m", "n", "mu", "sign", "weierstrass", "lambda_top"});
        normalforms::Smu s;
        s.m = static_cast<int>(require_integer(j["m"], path + ".m"));
        s.n = static_cast<int>(require_integer(j["n"], path + ".n"));
        s.mu = static_cast<int>(require_integer(j["mu"], path + ".mu"));
        s.sign = static_cast<int>(require_integer(j["sign"], path + ".sign"));
        s.weierstrass = require_number_array(j["weierstrass"], path + ".weierstrass");
        s.lambda_top = require_number(j["lambda_top"], path + ".lambda_top");
        return s;
    }
    if (type == "Dc" || type == "Dh") {
        check_keys(j, path, {"type", "mu", "sign", "weierstrass", "lambda_top"},
                   {"type", "mu", "sign", "weierstrass", "lambda_top"});
        const int mu = static_cast<int>(require_integer(j["mu"], path + ".mu"));
        const int sign = static_cast<int>(require_integer(j["sign"], path + ".sign"));
        const auto w = require_number_array(j["weierstrass"], path + ".weierstrass");
        const double lt = require_number(j["lambda_top"], path + ".lambda_top");
        if (type == "Dc") {
            normalforms::Dc d;
            d.mu = mu;
            d.sign = sign;
            d.weierstrass = w;
            d.lambda_top = lt;
            return d;
        }
        normalforms::Dh h;
        h.mu = mu;
        h.sign = sign;
        h.weierstrass = w;
        h.lambda_top = lt;
        return h;
    }
    throw SchemaError(path + ".type", "unknown normal-form type");
}

ordered_json normal_form_to_json(const normalforms::NormalFormSpec& spec) {
    ordered_json j;
    j["type"] = normalforms::variant_name(spec);
    if (const auto* s0 = std::get_if<normalforms::S0>(&spec)) {
        j["lambda"] = s0->lambda;
    } else if (const auto* s = std::get_if<normalforms::Smu>(&spec)) {
        j["m"] = s->m;
        j["n"] = s->n;
        j["mu"] = s->mu;
        j["sign"] = s->sign;
        j["weierstrass"] = s->weierstrass;
        j["lambda_top"] = s->lambda_top;
    } else if (const auto* d = std::get_if<normalforms::Dc>(&spec)) {
        j["mu"] = d->mu;
        j["sign"] = d->sign;
        j["weierstrass"] = d->weierstrass;
        j["lambda_top"] = d->lambda_top;
    } else {
        const auto& h = std::get<normalforms::Dh>(spec);
        j["mu"] = h.mu;
        j["sign"] = h.sign;
        j["weierstrass"] = h.weierstrass;
        j["lambda_top"] = h.lambda_top;
    }
    return j;
}

normalforms::PolycycleModel model_from_json(const ordered_json& j,
                                            const std::string& path) {
    check_keys(j, path, {"vertices", "connectors"}, {"vertices", "connectors"});
    normalforms::PolycycleModel model;
    const auto& verts = j["vertices"];
    if (!verts.is_array()) throw SchemaError(path + ".vertices", "expected array");
    for (std::size_t i = 0; i < verts.size(); ++i)
        model.vertices.push_back(normal_form_from_json(
            verts[i], path + ".vertices[" + std::to_string(i) + "]"));
    const auto& conns = j["connectors"];
    if (!conns.is_array()) throw SchemaError(path + ".connectors", "expected array");
    for (std::size_t i = 0; i < conns.size(); ++i) {
        const std::string cp = path + ".connectors[" + std::to_string(i) + "]";
        check_keys(conns[i], cp, {"type", "scale", "offset"}, {"type"});
        const std::string type = require_string(conns[i]["type"], cp + ".type");
        if (type != "affine") throw SchemaError(cp + ".type", "unknown connector");
        const double scale = conns[i].contains("scale")
                                 ? require_number(conns[i]["scale"], cp + ".scale")
                                 : 1.0;
        const double offset =
            conns[i].contains("offset")
                ? require_number(conns[i]["offset"], cp + ".offset")
                : 0.0;
        model.connectors.push_back(normalforms::affine_connector(scale, offset));
    }
    return model;
}

int thread_cap() {
    if (const char* env = std::getenv("POLYLAB_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

// ---- subcommand: interp -------------------------------------------------

std::string exec_interp(const ordered_json& params, std::uint64_t seed) {
    check_keys(params, "$.params", {"k_max", "trials", "eval_points"}, {});
    const int k_max = params.contains("k_max")
                          ? static_cast<int>(require_integer(params["k_max"],
                                                             "$.params.k_max"))
                          : 12;
    const int trials =
        params.contains("trials")
            ? static_cast<int>(require_integer(params["trials"], "$.params.trials"))
            : 10;
    const int eval_points =
        params.contains("eval_points")
            ? static_cast<int>(
                  require_integer(params["eval_points"], "$.params.eval_points"))
            : 100;

    io::CsvWriter csv({"k", "jet_order", "max_error"});
    for (int m = 0; m <= 1; ++m) {
        for (int k = 2; k <= k_max; ++k) {
            auto g = rng::stream(seed, "interp", k * 2 + m);
            double worst = 0.0;
            for (int t = 0; t < trials; ++t) {
                const int degree = (m + 1) * k - 1;
                std::vector<double> coeff(degree + 1);
                for (double& c : coeff) c = rng::uniform(g, -1.0, 1.0);
                auto poly = [&coeff](double x, int order) {
                    // analytic derivatives of the random polynomial
                    double acc = 0.0;
                    for (int j = static_cast<int>(coeff.size()) - 1; j >= order;
                         --j) {
                        double f = 1.0;
                        for (int r = 0; r < order; ++r) f *= (j - r);
                        acc = acc * x + coeff[j] * f;
                    }
                    return acc;
                };
                auto nodes = rng::jittered_nodes(g, k, -1.0, 1.0);
                interp::JetFn<double> jet = [&poly](const double& x, int o) {
                    return poly(x, o);
                };
                interp::DividedDifferenceTable<double> table(
                    jet, interp::jet_expand(nodes, m));
                for (int e = 0; e < eval_points; ++e) {
                    const double x = rng::uniform(g, -1.0, 1.0);
                    worst = std::max(worst,
                                     std::abs(table.eval(x) - poly(x, 0)));
                }
                if (m == 1) {
                    for (double nd : nodes) {
                        worst = std::max(worst,
                                         std::abs(table.eval(nd) - poly(nd, 0)));
                        worst = std::max(
                            worst,
                            std::abs(table.eval_derivative(nd) - poly(nd, 1)));
                    }
                }
            }
            csv.row_numeric({static_cast<double>(k), static_cast<double>(m),
                             worst});
        }
    }
    return csv.str();
}

// ---- subcommand: multijet -----------------------------------------------

std::string exec_multijet(const ordered_json& params, std::uint64_t seed) {
    check_keys(params, "$.params", {"nodes", "trials"}, {});
    const int n = params.contains("nodes")
                      ? static_cast<int>(require_integer(params["nodes"],
                                                         "$.params.nodes"))
                      : 3;
    const int trials =
        params.contains("trials")
            ? static_cast<int>(require_integer(params["trials"], "$.params.trials"))
            : 200;

    io::CsvWriter csv({"trial", "roundtrip_error", "blowup_error"});
    for (int t = 0; t < trials; ++t) {
        auto g = rng::stream(seed, "multijet", t);
        std::vector<double> nodes;
        while (static_cast<int>(nodes.size()) < n) {
            const double cand = rng::uniform(g, -1.0, 1.0);
            bool ok = true;
            for (double nd : nodes)
                if (std::abs(nd - cand) < 0.12) ok = false;
            if (ok) nodes.push_back(cand);
        }
        std::vector<double> eps(2 * n);
        for (double& e : eps) e = rng::uniform(g, -1.0, 1.0);
        const auto u = multijet::epsilon_to_u(nodes, eps);
        const auto eps_back = multijet::u_to_epsilon(nodes, u);
        double rt = 0.0;
        for (int i = 0; i < 2 * n; ++i)
            rt = std::max(rt, std::abs(eps_back[i] - eps[i]));

        // blow-up identity against direct jets of the polynomial phi_eps
        auto phi = [&eps](double x, int order) {
            double acc = 0.0;
            for (int j = static_cast<int>(eps.size()) - 1; j >= order; --j) {
                double f = 1.0;
                for (int r = 0; r < order; ++r) f *= (j - r);
                acc = acc * x + eps[j] * f;
            }
            return acc;
        };
        interp::JetFn<double> jet = [&phi](const double& x, int o) {
            return phi(x, o);
        };
        const auto dd = multijet::dd_of_map(jet, nodes, 1);
        const auto mj = multijet::pi_map(dd);
        double be = 0.0;
        for (int i = 0; i < n; ++i) {
            be = std::max(be, std::abs(mj.values[i] - phi(nodes[i], 0)));
            be = std::max(be, std::abs(mj.derivs[i] - phi(nodes[i], 1)));
        }
        csv.row_numeric({static_cast<double>(t), rt, be});
    }
    return csv.str();
}

// ---- subcommand: perturb ------------------------------------------------

perturb::IntervalMap map_by_name(const std::string& name) {
    if (name == "logistic") return perturb::logistic_map();
    if (name == "halving") return perturb::halving_map();
    throw SchemaError("$.params.map", "unknown map name");
}

long long auto_resolution(const perturb::IntervalMap& map, int n) {
    double sup_df = 0.0;
    for (int i = 0; i <= 4096; ++i) {
        const double x = map.lo + (map.hi - map.lo) * i / 4096.0;
        sup_df = std::max(sup_df, std::abs(map.df(x)));
    }
    const double want = std::pow(std::max(sup_df, 1.0), n) / 4e-3;
    return std::llround(std::clamp(want, 1e6, 3e8));
}

std::string exec_perturb(const ordered_json& params, std::uint64_t /*seed*/) {
    check_keys(params, "$.params",
               {"map", "n_max", "delta", "resolution", "minimal_period"},
               {"map", "n_max"});
    const auto map = map_by_name(require_string(params["map"], "$.params.map"));
    const int n_max =
        static_cast<int>(require_integer(params["n_max"], "$.params.n_max"));
    const double delta = params.contains("delta")
                             ? require_number(params["delta"], "$.params.delta")
                             : 0.0;
    const long long fixed_res =
        params.contains("resolution")
            ? require_integer(params["resolution"], "$.params.resolution")
            : 0;
    const bool minimal =
        params.contains("minimal_period") && params["minimal_period"].is_boolean()
            ? params["minimal_period"].get<bool>()
            : false;

    const int threads = thread_cap();
    io::CsvWriter csv({"n", "P_n", "fitted_C"});
    std::vector<long long> counts;
    for (int n = 1; n <= n_max; ++n) {
        const long long res = fixed_res > 0 ? fixed_res : auto_resolution(map, n);
        const auto pc = perturb::count_periodic(map, n, res, minimal, threads);
        counts.push_back(pc.count);
    }
    double c_fit = 0.0;
    for (int n = 1; n <= n_max; ++n)
        if (counts[n - 1] > 1)
            c_fit = std::max(c_fit, std::log(static_cast<double>(counts[n - 1])) /
                                        std::pow(n, 1.0 + delta));
    for (int n = 1; n <= n_max; ++n)
        csv.row_numeric({static_cast<double>(n),
                         static_cast<double>(counts[n - 1]), c_fit});
    return csv.str();
}

// ---- subcommand: cycles -------------------------------------------------

std::string exec_cycles(const ordered_json& params, const std::string& base_dir,
                        const Tolerances& tol) {
    check_keys(params, "$.params",
               {"model", "model_path", "deltas", "x_lo", "x_hi", "scan_points"},
               {"deltas"});
    ordered_json model_json;
    if (params.contains("model_path")) {
        const auto p = std::filesystem::path(base_dir) /
                       require_string(params["model_path"], "$.params.model_path");
        model_json = ordered_json::parse(io::read_file(p.string()));
    } else if (params.contains("model")) {
        model_json = params["model"];
    } else {
        throw SchemaError("$.params.model", "missing field");
    }
    const auto model = model_from_json(model_json, "$.params.model");
    const auto deltas = require_number_array(params["deltas"], "$.params.deltas");
    const double x_lo = params.contains("x_lo")
                            ? require_number(params["x_lo"], "$.params.x_lo")
                            : 1e-4;
    const double x_hi = params.contains("x_hi")
                            ? require_number(params["x_hi"], "$.params.x_hi")
                            : 1.0;
    const int scan = params.contains("scan_points")
                         ? static_cast<int>(require_integer(params["scan_points"],
                                                            "$.params.scan_points"))
                         : 4000;

    const double floor =
        tol.regularity_floor > 0 ? tol.regularity_floor : 1e-6;
    const auto report = normalforms::count_limit_cycles(
        model, deltas, x_lo, x_hi, scan, 5.0, floor);
    ordered_json out;
    out["deltas"] = report.deltas;
    out["counts"] = report.counts;
    out["stable"] = report.stable;
    out["solutions"] = ordered_json::array();
    for (const auto& roots : report.roots) {
        ordered_json arr = ordered_json::array();
        for (const auto& r : roots) {
            ordered_json s;
            s["x"] = r.x;
            s["delta_prime"] = r.delta_prime;
            s["regular"] = r.regular;
            arr.push_back(s);
        }
        out["solutions"].push_back(arr);
    }
    return io::dump_json(out);
}

// ---- subcommand: rolle --------------------------------------------------

ordered_json elimination_to_json(const pfaffrolle::EliminationReport& rep) {
    ordered_json j;
    j["lhs"] = rep.lhs;
    j["jacobian_count"] = rep.jacobian_count;
    j["boundary_count"] = rep.boundary_count;
    j["rhs"] = rep.rhs;
    j["holds"] = rep.holds;
    j["components"] = rep.components;
    j["closed_components"] = rep.closed_components;
    j["min_gradient_norm"] = rep.min_gradient_norm;
    j["ledger"] = ordered_json::array();
    for (const auto& row : rep.ledger) {
        ordered_json r;
        r["seed_index"] = row.seed_index;
        r["closed"] = row.closed;
        r["lhs_crossings"] = row.lhs_crossings;
        r["jacobian_crossings"] = row.jacobian_crossings;
        r["rho_crossings"] = row.rho_crossings;
        j["ledger"].push_back(r);
    }
    return j;
}

// Raw mixed-system description: two singular equations (leaf polynomial
// plus a 4-component polynomial form) and two regular polynomials.
pfaffrolle::MixedSystem mixed_system_from_json(const ordered_json& j,
                                               const std::string& path) {
    check_keys(j, path, {"singular", "regular", "radius"},
               {"singular", "regular"});
    if (!j["singular"].is_array() || j["singular"].size() != 2)
        throw SchemaError(path + ".singular", "expected exactly two entries");
    if (!j["regular"].is_array() || j["regular"].size() != 2)
        throw SchemaError(path + ".regular", "expected exactly two entries");
    pfaffrolle::MixedSystem sys;
    sys.radius = j.contains("radius")
                     ? require_number(j["radius"], path + ".radius")
                     : 1.0;
    pfaffrolle::PfaffianEquation* eqs[2] = {&sys.singular1, &sys.singular2};
    for (int i = 0; i < 2; ++i) {
        const std::string sp = path + ".singular[" + std::to_string(i) + "]";
        const auto& se = j["singular"][i];
        check_keys(se, sp, {"leaf", "form"}, {"leaf", "form"});
        eqs[i]->level =
            pfaffrolle::from_polynomial(polynomial_from_json(se["leaf"], sp + ".leaf"));
        if (!se["form"].is_array() || se["form"].size() != 4)
            throw SchemaError(sp + ".form", "expected four covector components");
        eqs[i]->form.components.clear();
        for (int c = 0; c < 4; ++c)
            eqs[i]->form.components.push_back(polynomial_from_json(
                se["form"][c], sp + ".form[" + std::to_string(c) + "]"));
    }
    sys.regular1 = polynomial_from_json(j["regular"][0], path + ".regular[0]");
    sys.regular2 = polynomial_from_json(j["regular"][1], path + ".regular[1]");
    return sys;
}

std::string exec_rolle(const ordered_json& params, const Tolerances& tol) {
    check_keys(params, "$.params",
               {"instance", "system", "slope1", "offset1", "slope2", "offset2",
                "radius", "cascade", "step"},
               {"instance", "cascade"});
    const std::string instance =
        require_string(params["instance"], "$.params.instance");
    auto get = [&](const char* key, double dflt) {
        return params.contains(key)
                   ? require_number(params[key], std::string("$.params.") + key)
                   : dflt;
    };
    pfaffrolle::MixedSystem sys;
    if (instance == "decoupled") {
        sys = pfaffrolle::decoupled_instance(
            get("slope1", 0.5), get("offset1", -0.04), get("slope2", 0.6),
            get("offset2", -0.05), get("radius", 1.0));
    } else if (instance == "custom") {
        if (!params.contains("system"))
            throw SchemaError("$.params.system", "missing field");
        sys = mixed_system_from_json(params["system"], "$.params.system");
    } else {
        throw SchemaError("$.params.instance", "unknown instance");
    }
    const auto cascade = require_number_array(params["cascade"], "$.params.cascade");
    pfaffrolle::TraceOptions opts;
    opts.step = tol.trace_step > 0 ? tol.trace_step : get("step", 2e-3);
    opts.radius = get("radius", sys.radius);

    const auto rep = pfaffrolle::khovanskii_reduce(sys, cascade, opts);
    ordered_json out;
    out["step1"] = elimination_to_json(rep.step1);
    out["step2_chain"] = elimination_to_json(rep.step2_chain);
    out["step2_boundary"] = elimination_to_json(rep.step2_boundary);
    out["jacobian1_degree"] = rep.jacobian1_degree;
    out["jacobian1_bound"] = rep.jacobian1_bound;
    out["stable"] = rep.stable;
    out["verdict"] = rep.verdict;
    return io::dump_json(out);
}

// ---- subcommand: strata -------------------------------------------------

struct StrataFixture {
    chainstrata::StratumSample vj, vi;
    std::vector<Polynomial> map; // empty -> plain a-regularity
    chainstrata::Vec point;
    chainstrata::SequenceGenerator gen;
};

StrataFixture strata_fixture(const std::string& example) {
    using chainstrata::Vec;
    StrataFixture fx;
    if (example == "umbrella_coarse" || example == "umbrella_refined" ||
        example == "umbrella_projection") {
        const int d = 3;
        auto X = Polynomial::variable(0, d);
        auto Y = Polynomial::variable(1, d);
        auto Z = Polynomial::variable(2, d);
        chainstrata::StratumSample sheet;
        sheet.equations = {Y * Y - Z * X * X};
        sheet.inequalities = {X * X}; // x != 0
        sheet.dimension = 2;
        sheet.name = "umbrella sheet";
        fx.vj = sheet;
        if (example == "umbrella_coarse") {
            chainstrata::StratumSample axis;
            axis.equations = {X, Y};
            axis.dimension = 1;
            axis.name = "z-axis";
            fx.vi = axis;
            fx.point = Vec::Zero(3);
            Vec dir(3);
            dir << 1.0, 0.0, 0.0;
            fx.gen = chainstrata::radial_generator(fx.point, dir);
        } else {
            chainstrata::StratumSample axis;
            axis.equations = {X, Y};
            axis.inequalities = {Z}; // punctured: test on the positive half
            axis.dimension = 1;
            axis.name = "punctured z-axis";
            fx.vi = axis;
            Vec p(3);
            p << 0.0, 0.0, 0.5;
            fx.point = p;
            const double sq = std::sqrt(0.5);
            fx.gen = chainstrata::path_generator(
                [sq](double t) {
                    Vec v(3);
                    v << t, t * sq, 0.5;
                    return v;
                },
                0.4, 0.6);
            if (example == "umbrella_projection") {
                fx.map = {Polynomial::variable(0, 3), Polynomial::variable(1, 3)};
            }
        }
        return fx;
    }
    if (example == "thom") {
        const int d = 2;
        auto X = Polynomial::variable(0, d);
        auto Y = Polynomial::variable(1, d);
        chainstrata::StratumSample plane;
        plane.inequalities = {X * X}; // x != 0
        plane.dimension = 2;
        plane.name = "off the critical line";
        chainstrata::StratumSample line;
        line.equations = {X};
        line.dimension = 1;
        line.name = "critical line";
        fx.vj = plane;
        fx.vi = line;
        fx.point = chainstrata::Vec::Zero(2);
        fx.map = {X, X * Y};
        Vec dir(2);
        dir << 1.0, 0.3;
        fx.gen = chainstrata::radial_generator(fx.point, dir);
        return fx;
    }
    if (example == "grinberg") {
        const int d = 4; // (x, y, z, t)
        auto X = Polynomial::variable(0, d);
        auto Y = Polynomial::variable(1, d);
        auto Z = Polynomial::variable(2, d);
        auto T = Polynomial::variable(3, d);
        chainstrata::StratumSample big;
        big.equations = {X * X - T * T * Y - Z};
        big.inequalities = {T * T}; // t != 0
        big.dimension = 3;
        big.name = "t != 0 part";
        chainstrata::StratumSample small;
        small.equations = {X, Z, T};
        small.dimension = 1;
        small.name = "y-axis";
        fx.vj = big;
        fx.vi = small;
        Vec p(4);
        p << 0.0, 0.7, 0.0, 0.0;
        fx.point = p;
        fx.map = {Z, T};
        const double a = 0.7;
        fx.gen = chainstrata::path_generator(
            [a](double s) {
                Vec v(4);
                v << s * s, a + s * s, -a * s * s, s; // on W_a along z = -a t^2
                return v;
            },
            0.5, 0.6);
        return fx;
    }
    throw SchemaError("$.params.example", "unknown example");
}

std::string strata_witness_csv(const chainstrata::RegularityResult& res) {
    const int dim =
        res.witness_sequence.empty() ? 0 : static_cast<int>(res.witness_sequence[0].size());
    std::vector<std::string> header{"k"};
    for (int i = 0; i < dim; ++i) header.push_back("x" + std::to_string(i));
    io::CsvWriter csv(header);
    for (std::size_t k = 0; k < res.witness_sequence.size(); ++k) {
        std::vector<double> row{static_cast<double>(k)};
        for (int i = 0; i < dim; ++i) row.push_back(res.witness_sequence[k][i]);
        csv.row_numeric(row);
    }
    return csv.str();
}

chainstrata::StratumSample stratum_from_json(const ordered_json& j,
                                             const std::string& path) {
    check_keys(j, path, {"equations", "inequalities", "dimension", "name"},
               {"dimension"});
    chainstrata::StratumSample s;
    s.dimension =
        static_cast<int>(require_integer(j["dimension"], path + ".dimension"));
    if (j.contains("equations"))
        for (std::size_t i = 0; i < j["equations"].size(); ++i)
            s.equations.push_back(polynomial_from_json(
                j["equations"][i], path + ".equations[" + std::to_string(i) + "]"));
    if (j.contains("inequalities"))
        for (std::size_t i = 0; i < j["inequalities"].size(); ++i)
            s.inequalities.push_back(
                polynomial_from_json(j["inequalities"][i],
                                     path + ".inequalities[" + std::to_string(i) + "]"));
    if (j.contains("name")) s.name = require_string(j["name"], path + ".name");
    return s;
}

// Raw pair description: two strata, an optional polynomial map (a_P when
// present), the base point, and a radial sequence generator.
StrataFixture strata_fixture_from_json(const ordered_json& params) {
    StrataFixture fx;
    fx.vj = stratum_from_json(params["vj"], "$.params.vj");
    fx.vi = stratum_from_json(params["vi"], "$.params.vi");
    const auto pt = require_number_array(params["point"], "$.params.point");
    fx.point = chainstrata::Vec(pt.size());
    for (std::size_t i = 0; i < pt.size(); ++i) fx.point[i] = pt[i];
    if (params.contains("map"))
        for (std::size_t i = 0; i < params["map"].size(); ++i)
            fx.map.push_back(polynomial_from_json(
                params["map"][i], "$.params.map[" + std::to_string(i) + "]"));
    const auto dirv =
        require_number_array(params["direction"], "$.params.direction");
    if (dirv.size() != pt.size())
        throw SchemaError("$.params.direction", "arity mismatch with point");
    chainstrata::Vec dir(dirv.size());
    for (std::size_t i = 0; i < dirv.size(); ++i) dir[i] = dirv[i];
    fx.gen = chainstrata::radial_generator(fx.point, dir);
    return fx;
}

std::pair<std::string, std::string> exec_strata(const ordered_json& params) {
    check_keys(params, "$.params",
               {"example", "vj", "vi", "map", "point", "direction"}, {});
    StrataFixture fx;
    std::string example;
    if (params.contains("example")) {
        example = require_string(params["example"], "$.params.example");
        fx = strata_fixture(example);
    } else if (params.contains("vj")) {
        example = "custom";
        fx = strata_fixture_from_json(params);
    } else {
        throw SchemaError("$.params.example", "missing field");
    }

    chainstrata::RegularityResult res;
    if (fx.map.empty())
        res = chainstrata::a_regularity_test(fx.vj, fx.vi, fx.point, fx.gen);
    else
        res = chainstrata::ap_regularity_test(fx.vj, fx.vi, fx.map, fx.point,
                                              fx.gen);

    ordered_json out;
    out["example"] = example;
    out["big_stratum"] = fx.vj.name;
    out["small_stratum"] = fx.vi.name;
    out["kind"] = fx.map.empty() ? "a" : "a_P";
    out["verdict"] = chainstrata::verdict_name(res.verdict);
    out["precheck_failed"] = res.precheck_failed;
    out["d_small"] = res.d_small;
    out["d_big"] = res.d_big;
    out["offending_angle"] = res.offending_angle;
    out["note"] = res.note;
    return {io::dump_json(out), strata_witness_csv(res)};
}

// ---- subcommand: abel ---------------------------------------------------

std::pair<std::string, std::string> exec_abel(const ordered_json& params,
                                              const Tolerances& tol) {
    check_keys(params, "$.params",
               {"hamiltonian", "p", "q", "h_from", "h_to", "h_steps", "seeds",
                "working_box"},
               {"hamiltonian", "p", "q", "h_from", "h_to", "h_steps", "seeds"});
    abelint::HamiltonianProblem prob;
    prob.H = polynomial_from_json(params["hamiltonian"], "$.params.hamiltonian");
    prob.P = polynomial_from_json(params["p"], "$.params.p");
    prob.Q = polynomial_from_json(params["q"], "$.params.q");
    prob.h_min = require_number(params["h_from"], "$.params.h_from");
    prob.h_max = require_number(params["h_to"], "$.params.h_to");
    prob.working_box = params.contains("working_box")
                           ? require_number(params["working_box"],
                                            "$.params.working_box")
                           : 4.0;
    if (tol.trace_step > 0) prob.trace_step = tol.trace_step;
    const int steps =
        static_cast<int>(require_integer(params["h_steps"], "$.params.h_steps"));
    if (steps < 2) throw SchemaError("$.params.h_steps", "need at least 2 steps");
    if (!params["seeds"].is_array() || params["seeds"].empty())
        throw SchemaError("$.params.seeds", "expected a non-empty array");

    std::vector<double> grid;
    for (int i = 0; i <= steps; ++i)
        grid.push_back(prob.h_min + (prob.h_max - prob.h_min) * i / steps);

    io::CsvWriter csv({"h", "branch", "I"});
    ordered_json zeros_out;
    zeros_out["branches"] = ordered_json::array();
    for (std::size_t b = 0; b < params["seeds"].size(); ++b) {
        const auto seed_xy = require_number_array(
            params["seeds"][b], "$.params.seeds[" + std::to_string(b) + "]");
        if (seed_xy.size() != 2)
            throw SchemaError("$.params.seeds", "seed points are 2-dimensional");
        abelint::Vec seed(2);
        seed << seed_xy[0], seed_xy[1];
        const auto rep = abelint::count_zeros(
            prob, grid, seed, tol.h_tol > 0 ? tol.h_tol : 1e-8);
        for (const auto& s : rep.samples)
            csv.row_numeric({s.h, static_cast<double>(b), s.value});
        ordered_json bj;
        bj["branch"] = b;
        bj["zeros"] = rep.zeros;
        bj["identically_zero"] = rep.identically_zero;
        zeros_out["branches"].push_back(bj);
    }
    return {csv.str(), io::dump_json(zeros_out)};
}

} // namespace

RunResult run_config(const ordered_json& config, const std::string& base_dir) {
    RunResult result;
    try {
        check_keys(config, "$",
                   {"subcommand", "seed", "output", "params", "tolerances"},
                   {"subcommand", "seed", "output", "params"});
        const Tolerances tol = parse_tolerances(config);
        const std::string sub = require_string(config["subcommand"], "$.subcommand");
        if (!config["seed"].is_number_integer())
            throw SchemaError("$.seed", "expected an integer");
        const auto seed = config["seed"].get<std::uint64_t>();
        // output paths resolve against the caller's working directory;
        // input files named in params resolve against the config location
        const std::string out_path = require_string(config["output"], "$.output");
        const auto& params = config["params"];

        if (sub == "interp") {
            io::write_file(out_path, exec_interp(params, seed));
            result.artifacts.push_back(out_path);
        } else if (sub == "multijet") {
            io::write_file(out_path, exec_multijet(params, seed));
            result.artifacts.push_back(out_path);
        } else if (sub == "perturb") {
            io::write_file(out_path, exec_perturb(params, seed));
            result.artifacts.push_back(out_path);
        } else if (sub == "cycles") {
            io::write_file(out_path, exec_cycles(params, base_dir, tol));
            result.artifacts.push_back(out_path);
        } else if (sub == "rolle") {
            io::write_file(out_path, exec_rolle(params, tol));
            result.artifacts.push_back(out_path);
        } else if (sub == "strata") {
            auto [report, witness] = exec_strata(params);
            io::write_file(out_path, report);
            result.artifacts.push_back(out_path);
            const std::string wpath = out_path + ".witness.csv";
            io::write_file(wpath, witness);
            result.artifacts.push_back(wpath);
        } else if (sub == "abel") {
            auto [csv, zeros] = exec_abel(params, tol);
            io::write_file(out_path, csv);
            result.artifacts.push_back(out_path);
            const std::string zpath = out_path + ".zeros.json";
            io::write_file(zpath, zeros);
            result.artifacts.push_back(zpath);
        } else {
            throw SchemaError("$.subcommand", "unknown subcommand");
        }
    } catch (const SchemaError& e) {
        ordered_json err;
        err["error"] = "schema";
        err["path"] = e.path();
        err["message"] = e.what();
        result.exit_code = 2;
        result.error_payload = io::dump_json(err);
    } catch (const Error& e) {
        ordered_json err;
        err["error"] = e.code();
        err["message"] = e.what();
        ordered_json data;
        for (const auto& [k, v] : e.data()) data[k] = v;
        err["data"] = data;
        result.exit_code = 1;
        result.error_payload = io::dump_json(err);
    }
    return result;
}

RunResult run_config_file(const std::string& path) {
    ordered_json config;
    try {
        config = ordered_json::parse(io::read_file(path));
    } catch (const std::exception& e) {
        RunResult r;
        r.exit_code = 2;
        ordered_json err;
        err["error"] = "schema";
        err["path"] = "$";
        err["message"] = e.what();
        r.error_payload = io::dump_json(err);
        return r;
    }
    return run_config(config,
                      std::filesystem::path(path).parent_path().string());
}

} // namespace polylab::cli
