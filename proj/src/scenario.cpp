#include "pdo/scenario.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pdo/backend.hpp"
#include "pdo/diffusion.hpp"
#include "pdo/elliptic.hpp"
#include "pdo/error.hpp"
#include "pdo/funcalc.hpp"
#include "pdo/garding.hpp"
#include "pdo/parallel.hpp"
#include "pdo/report.hpp"
#include "pdo/symbol.hpp"

namespace pdo {

using json = nlohmann::json;
namespace fs = std::filesystem;

const std::vector<std::string>& scenario_tasks() {
    static const std::vector<std::string> tasks{"seminorm", "class-check", "resolvent", "param-elliptic", "parametrix",
                                                "funcalc",  "power",       "garding",   "interpolate",    "diffuse"};
    return tasks;
}

namespace {

// ---- config access -----------------------------------------------------

class Block {
public:
    Block(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail(ErrorKind::config, "'" + path_ + "' must be an object");
    }

    void allow(std::initializer_list<const char*> keys) const {
        std::set<std::string> ok(keys.begin(), keys.end());
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!ok.count(it.key())) fail(ErrorKind::config, "unknown key '" + name(it.key()) + "'");
    }

    bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

    double number(const std::string& key, std::optional<double> fallback = std::nullopt) const {
        if (!has(key)) return need(key, fallback);
        const auto& v = j_.at(key);
        if (!v.is_number()) fail(ErrorKind::config, "'" + name(key) + "' must be a number");
        return v.get<double>();
    }

    long integer(const std::string& key, std::optional<long> fallback = std::nullopt) const {
        if (!has(key)) return need(key, fallback);
        const auto& v = j_.at(key);
        if (!v.is_number_integer()) fail(ErrorKind::config, "'" + name(key) + "' must be an integer");
        return v.get<long>();
    }

    std::string text(const std::string& key, std::optional<std::string> fallback = std::nullopt) const {
        if (!has(key)) return need(key, fallback);
        const auto& v = j_.at(key);
        if (!v.is_string()) fail(ErrorKind::config, "'" + name(key) + "' must be a string");
        return v.get<std::string>();
    }

    bool flag(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        const auto& v = j_.at(key);
        if (!v.is_boolean()) fail(ErrorKind::config, "'" + name(key) + "' must be true or false");
        return v.get<bool>();
    }

    std::vector<double> numbers(const std::string& key, std::optional<std::vector<double>> fallback = std::nullopt) const {
        if (!has(key)) return need(key, fallback);
        const auto& v = j_.at(key);
        if (!v.is_array()) fail(ErrorKind::config, "'" + name(key) + "' must be an array of numbers");
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) fail(ErrorKind::config, "'" + name(key) + "' must be an array of numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }

    MultiIndex multi_index(const std::string& key) const {
        MultiIndex out;
        if (!has(key)) return out;
        const auto& v = j_.at(key);
        if (!v.is_array()) fail(ErrorKind::config, "'" + name(key) + "' must be an array of integers");
        for (const auto& e : v) {
            if (!e.is_number_integer() || e.get<long>() < 0)
                fail(ErrorKind::config, "'" + name(key) + "' must be an array of non-negative integers");
            out.push_back(static_cast<int>(e.get<long>()));
        }
        return out;
    }

    cplx complex(const std::string& key, std::optional<cplx> fallback = std::nullopt) const {
        if (!has(key)) return need(key, fallback);
        const auto& v = j_.at(key);
        if (v.is_number()) return {v.get<double>(), 0.0};
        if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
            return {v[0].get<double>(), v[1].get<double>()};
        fail(ErrorKind::config, "'" + name(key) + "' must be a number or a [re, im] pair");
    }

    Block sub(const std::string& key) const {
        if (!has(key)) fail(ErrorKind::config, "missing block '" + name(key) + "'");
        return Block(j_.at(key), name(key));
    }

    std::optional<Block> optional_sub(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        return Block(j_.at(key), name(key));
    }

    const json& raw() const { return j_; }
    std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

private:
    template <class T>
    T need(const std::string& key, const std::optional<T>& fallback) const {
        if (!fallback) fail(ErrorKind::config, "missing key '" + name(key) + "'");
        return *fallback;
    }

    const json& j_;
    std::string path_;
};

json cplx_json(cplx v) { return json::array({v.real(), v.imag()}); }

// ---- backend and symbols -----------------------------------------------

BackendParams parse_backend(const Block& b) {
    b.allow({"group", "n", "xi_max", "n_xi", "lambda_min", "lambda_max", "n_lambda", "hermite_dim"});
    BackendParams p;
    const std::string group = b.text("group");
    if (group == "abelian") {
        p.kind = GroupKind::abelian;
        p.n = static_cast<int>(b.integer("n", 1));
        p.xi_max = b.number("xi_max", 10.0);
        p.n_xi = static_cast<int>(b.integer("n_xi", 65));
    } else if (group == "heisenberg") {
        p.kind = GroupKind::heisenberg;
        p.lambda_min = b.number("lambda_min", 0.5);
        p.lambda_max = b.number("lambda_max", 4.0);
        p.n_lambda = static_cast<int>(b.integer("n_lambda", 8));
        p.hermite_dim = static_cast<int>(b.integer("hermite_dim", 8));
    } else {
        fail(ErrorKind::config, "'backend.group' must be \"abelian\" or \"heisenberg\"");
    }
    return p;
}

json backend_json(const BackendParams& p) {
    json j;
    if (p.kind == GroupKind::abelian) {
        j = {{"group", "abelian"}, {"n", p.n}, {"xi_max", p.xi_max}, {"n_xi", p.n_xi}};
    } else {
        j = {{"group", "heisenberg"},    {"lambda_min", p.lambda_min}, {"lambda_max", p.lambda_max},
             {"n_lambda", p.n_lambda}, {"hermite_dim", p.hermite_dim}};
    }
    return j;
}

struct MultiplierSpec {
    std::function<cplx(double)> f;
    double order = 0.0;
    std::string name;
};

MultiplierSpec parse_multiplier(const Block& b) {
    const std::string kind = b.text("kind");
    MultiplierSpec m;
    m.name = kind;
    if (kind == "poly") {
        b.allow({"kind", "coeffs"});
        const auto c = b.numbers("coeffs");
        if (c.empty()) fail(ErrorKind::config, "'" + b.name("coeffs") + "' must not be empty");
        m.f = [c](double t) {
            cplx acc{};
            for (std::size_t k = c.size(); k-- > 0;) acc = acc * t + c[k];
            return acc;
        };
        std::size_t deg = 0;
        for (std::size_t k = 0; k < c.size(); ++k)
            if (c[k] != 0.0) deg = k;
        m.order = 2.0 * static_cast<double>(deg);
    } else if (kind == "power") {
        b.allow({"kind", "s"});
        const double s = b.number("s");
        m.f = [s](double t) { return cplx(std::pow(t, s), 0.0); };
        m.order = 2.0 * s;
    } else if (kind == "shifted_power") {
        b.allow({"kind", "s"});
        const double s = b.number("s");
        m.f = [s](double t) { return cplx(std::pow(1.0 + t, s), 0.0); };
        m.order = 2.0 * s;
    } else if (kind == "exp_neg") {
        b.allow({"kind"});
        m.f = [](double t) { return cplx(std::exp(-t), 0.0); };
        m.order = 0.0;
    } else {
        fail(ErrorKind::config, "'" + b.name("kind") + "' must be one of poly, power, exp_neg, shifted_power");
    }
    return m;
}

struct SymbolSpec {
    MultiplierSpec multiplier;
    double order = 0.0;
    double rho = 1.0, delta = 0.0;
    double scale = 1.0;
    double perturbation = 0.0;
    bool x_dependent = false;
    double c0 = 1.0, a_sin = 0.0, a_cos = 0.0;
    std::size_t nx = 64;
};

SymbolSpec parse_symbol(const Block& b) {
    b.allow({"multiplier", "order", "rho", "delta", "scale", "perturbation", "x_profile", "nx"});
    SymbolSpec s;
    s.multiplier = parse_multiplier(b.sub("multiplier"));
    s.order = b.number("order", s.multiplier.order);
    s.rho = b.number("rho", 1.0);
    s.delta = b.number("delta", 0.0);
    s.scale = b.number("scale", 1.0);
    s.perturbation = b.number("perturbation", 0.0);
    if (auto xp = b.optional_sub("x_profile")) {
        xp->allow({"c0", "sin", "cos"});
        s.x_dependent = true;
        s.c0 = xp->number("c0", 1.0);
        s.a_sin = xp->number("sin", 0.0);
        s.a_cos = xp->number("cos", 0.0);
    }
    const long nx = b.integer("nx", 64);
    if (nx < 2) fail(ErrorKind::config, "'" + b.name("nx") + "' must be >= 2");
    s.nx = static_cast<std::size_t>(nx);
    return s;
}

Symbol build_symbol(const BackendPtr& backend, const SymbolSpec& spec, std::uint64_t seed) {
    Symbol base = multiplier_symbol(backend, spec.multiplier.f, spec.order);
    if (spec.scale != 1.0) base = spec.scale * base;
    if (spec.perturbation != 0.0) base = base + spec.perturbation * random_hermitian_symbol(backend, seed);
    if (spec.x_dependent) {
        const double c0 = spec.c0, as = spec.a_sin, ac = spec.a_cos;
        Symbol xs(backend, spec.nx, spec.order);
        for (std::size_t ix = 0; ix < spec.nx; ++ix) {
            const double x = xs.x(ix);
            const double profile = c0 + as * std::sin(x) + ac * std::cos(x);
            for (std::size_t p = 0; p < xs.num_points(); ++p) xs.at(ix, p) = profile * base.at(0, p);
        }
        base = std::move(xs);
    }
    base.set_order(spec.order);
    base.set_type(spec.rho, spec.delta);
    return base;
}

// ---- per-task runners --------------------------------------------------

struct Context {
    BackendPtr backend;
    BackendParams backend_params;
    std::optional<Block> symbol_block;
    std::optional<SymbolSpec> symbol_spec;
    Block params;
    std::uint64_t seed;
    fs::path out;
    std::vector<fs::path>* files;

    Symbol symbol() const {
        if (!symbol_spec) fail(ErrorKind::config, "this task needs a 'symbol' block");
        return build_symbol(backend, *symbol_spec, seed);
    }
    void csv(const std::string& name, const CsvTable& t) const {
        write_csv(out / name, t);
        files->push_back(out / name);
    }
    void symbol_csv(const std::string& name, const Symbol& a) const {
        write_symbol_csv(out / name, a);
        files->push_back(out / name);
    }
};

json run_seminorm(const Context& c) {
    c.params.allow({"alpha", "beta", "gamma", "m"});
    const Symbol a = c.symbol();
    const double m = c.params.number("m", a.order());
    const auto alpha = c.params.multi_index("alpha");
    const auto beta = c.params.multi_index("beta");
    const double gamma = c.params.number("gamma", 0.0);
    return {{"value", seminorm(a, alpha, beta, gamma, m)}, {"m", m}, {"gamma", gamma}, {"alpha", alpha},
            {"beta", beta}};
}

json run_class_check(const Context& c) {
    c.params.allow({"m", "rho", "delta", "k_max"});
    if (!c.symbol_spec) fail(ErrorKind::config, "this task needs a 'symbol' block");
    const double m = c.params.number("m", c.symbol_spec->order);
    const double rho = c.params.number("rho", c.symbol_spec->rho);
    const double delta = c.params.number("delta", c.symbol_spec->delta);
    const long k_max = c.params.integer("k_max", 2);
    const auto spec = *c.symbol_spec;
    const auto seed = c.seed;
    const auto rep = check_class_membership(
        [spec, seed](const BackendPtr& b) { return build_symbol(b, spec, seed); }, c.backend, m, rho, delta,
        static_cast<int>(k_max));
    const std::size_t dim = c.backend->dilation_weights().size();
    CsvTable table;
    for (std::size_t k = 0; k < dim; ++k) table.columns.push_back("alpha_" + std::to_string(k + 1));
    for (std::size_t k = 0; k < dim; ++k) table.columns.push_back("beta_" + std::to_string(k + 1));
    table.columns.insert(table.columns.end(), {"value", "refined_value", "stable"});
    json entries = json::array();
    for (const auto& e : rep.entries) {
        std::vector<double> row;
        for (std::size_t k = 0; k < dim; ++k) row.push_back(k < e.alpha.size() ? e.alpha[k] : 0);
        for (std::size_t k = 0; k < dim; ++k) row.push_back(k < e.beta.size() ? e.beta[k] : 0);
        row.insert(row.end(), {e.value, e.refined_value, e.stable ? 1.0 : 0.0});
        table.rows.push_back(row);
        entries.push_back({{"alpha", e.alpha}, {"beta", e.beta}, {"value", e.value},
                           {"refined_value", e.refined_value}, {"stable", e.stable}});
    }
    c.csv("class_table.csv", table);
    return {{"m", m},         {"rho", rho},     {"delta", delta},     {"k_max", k_max}, {"norm", rep.norm},
            {"refined_norm", rep.refined_norm}, {"stable", rep.stable}, {"entries", entries}};
}

json run_resolvent(const Context& c) {
    c.params.allow({"lambda"});
    const Symbol a = c.symbol();
    const cplx lambda = c.params.complex("lambda");
    const Symbol r = resolvent(a, lambda);
    c.symbol_csv("resolvent_symbol.csv", r);
    return {{"lambda", cplx_json(lambda)}, {"order", r.order()}, {"max_abs", max_abs(r)}};
}

CurveSpec parse_curve(const Block& b) {
    b.allow({"kind", "theta", "per_decade", "r_min", "r_max", "points"});
    const std::string kind = b.text("kind", "negative_real_axis");
    const int per_decade = static_cast<int>(b.integer("per_decade", 60));
    const double r_min = b.number("r_min", 1e-3);
    const double r_max = b.number("r_max", 1e6);
    if (kind == "negative_real_axis") return CurveSpec::negative_real_axis(per_decade, r_min, r_max);
    if (kind == "ray_pair") return CurveSpec::ray_pair(b.number("theta"), per_decade, r_min, r_max);
    if (kind == "custom") {
        if (!b.has("points") || !b.raw().at("points").is_array())
            fail(ErrorKind::config, "'" + b.name("points") + "' must be an array of [re, im] pairs");
        std::vector<cplx> pts;
        for (const auto& e : b.raw().at("points")) {
            if (e.is_number()) pts.emplace_back(e.get<double>(), 0.0);
            else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
                pts.emplace_back(e[0].get<double>(), e[1].get<double>());
            else fail(ErrorKind::config, "'" + b.name("points") + "' must be an array of [re, im] pairs");
        }
        return CurveSpec::custom(pts);
    }
    fail(ErrorKind::config, "'" + b.name("kind") + "' must be negative_real_axis, ray_pair or custom");
}

json run_param_elliptic(const Context& c) {
    c.params.allow({"curve", "m", "k", "alpha", "beta"});
    const Symbol a = c.symbol();
    const double m = c.params.number("m", a.order());
    const long k = c.params.integer("k", 0);
    const CurveSpec curve =
        c.params.has("curve") ? parse_curve(c.params.sub("curve")) : CurveSpec::negative_real_axis();
    const auto rep = resolvent_estimate_check(a, curve, m, static_cast<int>(k), c.params.multi_index("alpha"),
                                              c.params.multi_index("beta"));
    CsvTable table{{"lambda_abs", "sup_value"}, {}};
    for (std::size_t j = 0; j < rep.lambda_abs.size(); ++j) table.rows.push_back({rep.lambda_abs[j], rep.sample_sup[j]});
    c.csv("resolvent_sweep.csv", table);
    return {{"m", m},
            {"k", k},
            {"value", rep.value},
            {"refined_value", rep.refined_value},
            {"stable", rep.stable},
            {"stability_tolerance", rep.stability_tolerance},
            {"worst_lambda", cplx_json(rep.worst_lambda)},
            {"samples", rep.lambda_abs.size()}};
}

json run_parametrix(const Context& c) {
    c.params.allow({"N", "lambda_spec", "frequencies", "band"});
    const Symbol a = c.symbol();
    const long N = c.params.integer("N", 0);
    const double lambda_spec = c.params.number("lambda_spec", 0.0);
    const auto freqs = c.params.numbers("frequencies", std::vector<double>{8, 16, 32, 64});
    const long band = c.params.integer("band", 2);
    const auto study = parametrix_residual_study(a, static_cast<int>(N), lambda_spec, freqs, static_cast<int>(band));
    CsvTable table{{"cutoff", "residual_norm"}, {}};
    for (std::size_t j = 0; j < study.cutoffs.size(); ++j) table.rows.push_back({study.cutoffs[j], study.residuals[j]});
    c.csv("parametrix_residual.csv", table);
    return {{"N", N},
            {"lambda_spec", lambda_spec},
            {"slope", study.slope},
            {"expected_slope", -(a.rho() - a.delta()) * static_cast<double>(N + 1)},
            {"cutoffs", study.cutoffs},
            {"residuals", study.residuals}};
}

Contour parse_contour(const Block& b) {
    b.allow({"epsilon", "theta", "r_max", "nodes"});
    return keyhole_contour(b.number("epsilon", 0.5), b.number("theta", 0.35), b.number("r_max", 1e4),
                           static_cast<int>(b.integer("nodes", 200)));
}

// Largest per-point relative deviation from the eigendecomposition oracle,
// over hermitian blocks; negative when no block is hermitian.
double oracle_deviation(const Symbol& a, const Symbol& fa, const std::function<cplx(double)>& f) {
    double worst = -1.0;
    for (std::size_t p = 0; p < a.num_points(); ++p)
        for (std::size_t ix = 0; ix < a.x_slices(); ++ix) {
            const CMatrix blk = a.block(ix, p);
            const double scale = std::max(1.0, blk.cwiseAbs().maxCoeff());
            if ((blk - blk.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale) continue;
            const CMatrix ref = matfun_oracle(blk, f);
            const double n = ref.norm();
            const double err = (CMatrix(fa.block(ix, p)) - ref).norm() / (n > 0 ? n : 1.0);
            worst = std::max(worst, err);
        }
    return worst;
}

json run_funcalc(const Context& c) {
    c.params.allow({"function", "parameter", "contour"});
    const Symbol a = c.symbol();
    const auto F = holomorphic_from_name(c.params.text("function"), c.params.number("parameter", 0.0));
    const Contour contour = c.params.has("contour") ? parse_contour(c.params.sub("contour")) : keyhole_contour();
    const Symbol fa = dunford_riesz(a, F, contour);
    c.symbol_csv("funcalc_symbol.csv", fa);
    const double dev = oracle_deviation(a, fa, [&](double t) { return F.f(cplx(t, 0.0)); });
    return {{"function", F.name},
            {"decay", F.decay},
            {"order", fa.order()},
            {"max_abs", max_abs(fa)},
            {"contour", {{"epsilon", contour.epsilon}, {"theta", contour.theta}, {"r_max", contour.r_max},
                         {"nodes", contour.n_nodes}}},
            {"oracle_relative_error", dev >= 0 ? json(dev) : json(nullptr)}};
}

json run_power(const Context& c) {
    c.params.allow({"s", "contour", "sqrt"});
    const Symbol a = c.symbol();
    const cplx s = c.params.complex("s");
    const bool use_sqrt = c.params.flag("sqrt", false);
    if (use_sqrt && s != cplx(0.5, 0.0)) fail(ErrorKind::config, "'params.sqrt' needs s = 0.5");
    std::optional<Contour> contour;
    if (c.params.has("contour")) contour = parse_contour(c.params.sub("contour"));
    const Symbol as = use_sqrt ? sqrt_symbol(a) : complex_power(a, s, contour);
    c.symbol_csv("power_symbol.csv", as);
    const double dev = oracle_deviation(a, as, [&](double t) { return std::pow(cplx(t, 0.0), s); });
    return {{"s", cplx_json(s)},
            {"order", as.order()},
            {"max_abs", max_abs(as)},
            {"oracle_relative_error", dev >= 0 ? json(dev) : json(nullptr)}};
}

json run_garding(const Context& c) {
    c.params.allow({"m", "C0", "C1", "trials"});
    const Symbol a = c.symbol();
    const double m = c.params.number("m", a.order());
    const double C0 = c.params.number("C0");
    const double C1 = c.params.number("C1", 0.5 * C0);
    const long trials = c.params.integer("trials", 200);
    const auto rep = garding_certify(a, m, C0, C1, static_cast<int>(trials), c.seed);
    return {{"m", m},
            {"C0", rep.C0},
            {"C1", rep.C1},
            {"C2", rep.C2},
            {"margin", rep.margin},
            {"tolerance", garding_tolerance},
            {"certified", rep.certified},
            {"roundoff_flag", rep.roundoff_flag},
            {"witness", rep.witness},
            {"trials", rep.trials},
            {"seed", rep.seed},
            {"q_is_zero", rep.q_is_zero},
            {"remainder_sup", rep.remainder_sup},
            {"remainder_order", rep.remainder_order ? json(*rep.remainder_order) : json(nullptr)},
            {"expected_remainder_order", rep.expected_remainder_order}};
}

json run_interpolate(const Context& c) {
    c.params.allow({"s", "t", "eps"});
    const double s = c.params.number("s"), t = c.params.number("t"), eps = c.params.number("eps");
    const double C = interpolation_constant(*c.backend, s, t, eps);
    const double nu = c.backend->rockland_degree();
    CsvTable table{{"mu", "lhs", "rhs"}, {}};
    std::map<double, bool> seen;
    for (std::size_t p = 0; p < c.backend->num_points(); ++p)
        for (double ev : c.backend->spectrum(p)) {
            if (seen.count(ev)) continue;
            seen[ev] = true;
        }
    bool holds = true;
    for (const auto& [ev, _] : seen) {
        const double lhs = std::pow(1.0 + ev, 2.0 * t / nu);
        const double rhs = eps * std::pow(1.0 + ev, 2.0 * s / nu) + C;
        holds = holds && lhs <= rhs;
        table.rows.push_back({1.0 + ev, lhs, rhs});
    }
    c.csv("interpolation_modes.csv", table);
    return {{"s", s}, {"t", t}, {"eps", eps}, {"C_eps", C}, {"per_mode_inequality_holds", holds}};
}

json energy_json(const EnergyReport& e) {
    return {{"C", e.C},
            {"C_prime", e.C_prime},
            {"fit_feasible", e.fit_feasible},
            {"unit_constants_hold", e.unit_constants_hold},
            {"c1", e.c1},
            {"c2", e.c2},
            {"differential_form_holds", e.differential_form_holds},
            {"gronwall_holds", e.gronwall_holds},
            {"forward_bound_holds", e.forward_bound_holds}};
}

json run_diffuse(const Context& c) {
    c.params.allow({"solver", "time_factor", "data", "forcing", "s", "T", "n_steps", "m", "c0", "c2", "rtol", "atol",
                    "sobolev_s"});
    if (!c.symbol_spec) fail(ErrorKind::config, "diffuse needs a 'symbol' block describing K");
    const SymbolSpec spec = *c.symbol_spec;
    const std::string solver = c.params.text("solver", spec.x_dependent ? "abelian" : "invariant");
    if (solver != "invariant" && solver != "abelian")
        fail(ErrorKind::config, "'params.solver' must be \"invariant\" or \"abelian\"");

    double amp = 0.0;
    if (auto tf = c.params.optional_sub("time_factor")) {
        tf->allow({"kind", "amplitude"});
        const std::string kind = tf->text("kind", "constant");
        if (kind == "sin") amp = tf->number("amplitude", 0.5);
        else if (kind != "constant") fail(ErrorKind::config, "'params.time_factor.kind' must be constant or sin");
    }
    auto factor = [amp](double t) { return 1.0 + amp * std::sin(t); };

    EvolutionProblem pb;
    pb.backend = c.backend;
    pb.order = c.params.number("m", spec.order);
    pb.s = c.params.number("s", 0.0);
    pb.T = c.params.number("T", 1.0);
    pb.n_steps = static_cast<int>(c.params.integer("n_steps", 100));
    pb.c0 = c.params.number("c0", 0.0);
    pb.c2 = c.params.number("c2", 0.0);
    pb.rtol = c.params.number("rtol", 1e-10);
    pb.atol = c.params.number("atol", 1e-13);

    const Block data = c.params.sub("data");
    const std::string dkind = data.text("kind");
    std::optional<std::array<std::size_t, 3>> tracked;  // point, i, j of a single-mode datum

    double f_amp = 0.0, f_rate = 0.0;
    if (auto fb = c.params.optional_sub("forcing")) {
        fb->allow({"kind", "amplitude", "rate"});
        const std::string kind = fb->text("kind", "none");
        if (kind == "scaled_data") {
            f_amp = fb->number("amplitude", 1.0);
            f_rate = fb->number("rate", 0.0);
        } else if (kind != "none") {
            fail(ErrorKind::config, "'params.forcing.kind' must be none or scaled_data");
        }
    }

    if (solver == "invariant") {
        if (spec.x_dependent) fail(ErrorKind::config, "the invariant solver needs a symbol without x_profile");
        if (spec.perturbation != 0.0) fail(ErrorKind::config, "diffuse generators must be pure multipliers");
        const auto f = spec.multiplier.f;
        const double scale = spec.scale;
        pb.multiplier = MultiplierFamily{spec.multiplier.name,
                                         [f, scale, factor](double t, double nu) { return scale * factor(t) * f(nu); },
                                         amp == 0.0};
        FourierField u0(c.backend);
        if (dkind == "mode") {
            data.allow({"kind", "coord", "i", "j", "value"});
            const double coord = data.number("coord");
            const auto p = c.backend->find_point(std::span<const double>(&coord, 1));
            if (!p) fail(ErrorKind::config, "'params.data.coord' is not a grid point");
            const long i = data.integer("i", 0), j = data.integer("j", 0);
            if (i < 0 || j < 0 || static_cast<std::size_t>(std::max(i, j)) >= u0.dim())
                fail(ErrorKind::config, "'params.data.i/j' exceed the truncation");
            u0.at(*p, i, j) = data.complex("value", cplx(1.0, 0.0));
            tracked = {*p, static_cast<std::size_t>(i), static_cast<std::size_t>(j)};
        } else if (dkind == "gaussian") {
            data.allow({"kind", "width"});
            const double w = data.number("width", 1.0);
            for (std::size_t p = 0; p < u0.num_points(); ++p) {
                const auto spec_p = c.backend->spectrum(p);
                for (std::size_t i = 0; i < u0.dim(); ++i) u0.at(p, i, i) = std::exp(-0.5 * w * w * spec_p[i]);
            }
        } else {
            fail(ErrorKind::config, "'params.data.kind' must be mode or gaussian for the invariant solver");
        }
        pb.u0 = u0;
        if (f_amp != 0.0) {
            const FourierField base = u0;
            pb.forcing = [base, f_amp, f_rate](double t) {
                return cplx(f_amp * std::exp(-f_rate * t), 0.0) * base;
            };
        }
    } else {
        if (c.backend->kind() != GroupKind::abelian || c.backend->params().n != 1)
            fail(ErrorKind::config, "the abelian solver needs a one-dimensional abelian backend");
        pb.nx = spec.nx;
        const Symbol K0 = build_symbol(c.backend, spec, c.seed);
        pb.symbol_time_constant = amp == 0.0;
        pb.symbol_family = [K0, factor](double t) { return cplx(factor(t), 0.0) * K0; };
        data.allow({"kind", "coefficients"});
        if (dkind != "fourier") fail(ErrorKind::config, "'params.data.kind' must be fourier for the abelian solver");
        if (!data.has("coefficients") || !data.raw().at("coefficients").is_array())
            fail(ErrorKind::config, "'params.data.coefficients' must be an array of [k, re, im] triples");
        std::vector<cplx> coeffs(pb.nx, cplx{});
        for (const auto& e : data.raw().at("coefficients")) {
            if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() || !e[1].is_number() || !e[2].is_number())
                fail(ErrorKind::config, "'params.data.coefficients' must be an array of [k, re, im] triples");
            const long k = e[0].get<long>();
            if (2 * std::abs(k) >= static_cast<long>(pb.nx))
                fail(ErrorKind::config, "'params.data.coefficients' frequency exceeds nx / 2");
            const std::size_t slot = k >= 0 ? static_cast<std::size_t>(k) : pb.nx - static_cast<std::size_t>(-k);
            coeffs[slot] += cplx(e[1].get<double>(), e[2].get<double>());
        }
        pb.u0_samples = dft_inverse(coeffs);
        if (f_amp != 0.0) {
            const auto base = pb.u0_samples;
            pb.forcing_samples = [base, f_amp, f_rate](double t) {
                auto v = base;
                for (auto& x : v) x *= f_amp * std::exp(-f_rate * t);
                return v;
            };
        }
    }

    const SolutionTrace tr = solver == "invariant" ? solve_invariant(pb) : solve_abelian(pb);
    CsvTable table{{"t", "l2_norm", "hs_norm"}, {}};
    if (tracked) table.columns.insert(table.columns.end(), {"mode_re", "mode_im"});
    for (std::size_t j = 0; j < tr.times.size(); ++j) {
        std::vector<double> row{tr.times[j], tr.l2_norms[j], tr.hs_norms[j]};
        if (tracked) {
            const cplx v = tr.fields[j].at((*tracked)[0], (*tracked)[1], (*tracked)[2]);
            row.push_back(v.real());
            row.push_back(v.imag());
        }
        table.rows.push_back(row);
    }
    c.csv("energy_trace.csv", table);

    json res = {{"solver", solver},
                {"T", pb.T},
                {"n_steps", pb.n_steps},
                {"m", pb.order},
                {"accepted_steps", tr.accepted_steps},
                {"rejected_steps", tr.rejected_steps},
                {"final_l2_norm", tr.l2_norms.back()},
                {"final_hs_norm", tr.hs_norms.back()},
                {"energy", energy_json(energy_check(tr))},
                {"hypothesis_as_stated", "sigma_K(t) >= C0 pi(M)^m with dv/dt = K v + f"},
                {"convention_used", "-Re sigma_K(t) >= c0 pi(M)^m - c2"}};
    if (tracked) {
        const cplx v = tr.fields.back().at((*tracked)[0], (*tracked)[1], (*tracked)[2]);
        res["final_mode_coefficient"] = cplx_json(v);
    }
    if (c.params.has("sobolev_s")) {
        if (solver != "invariant") fail(ErrorKind::config, "'params.sobolev_s' needs the invariant solver");
        const double s = c.params.number("sobolev_s");
        const auto e = sobolev_energy_check(tr, s);
        json ej = energy_json(e);
        ej["s"] = s;
        ej["conjugation_residual"] = e.conjugation_residual;
        ej["conjugation_holds"] = e.conjugation_holds;
        res["sobolev_energy"] = ej;
    }
    return res;
}

} // namespace

ScenarioOutcome run_scenario(const std::string& config_json, const ScenarioOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    json cfg;
    try {
        cfg = json::parse(config_json);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::config, std::string("config is not valid JSON: ") + e.what());
    }
    const Block root(cfg, "");
    root.allow({"task", "seed", "threads", "output_dir", "backend", "symbol", "params"});

    std::string task = options.task;
    if (root.has("task")) {
        const std::string t = root.text("task");
        if (!task.empty() && task != t)
            fail(ErrorKind::config, "config task '" + t + "' does not match the requested task '" + task + "'");
        task = t;
    }
    if (task.empty()) fail(ErrorKind::config, "missing key 'task'");
    const auto& tasks = scenario_tasks();
    if (std::find(tasks.begin(), tasks.end(), task) == tasks.end()) fail(ErrorKind::config, "unknown task '" + task + "'");

    std::uint64_t seed = 12345;
    if (root.has("seed")) {
        const long s = root.integer("seed");
        if (s < 0) fail(ErrorKind::config, "'seed' must be >= 0");
        seed = static_cast<std::uint64_t>(s);
    }
    if (options.seed) seed = *options.seed;

    unsigned threads = 0;
    if (root.has("threads")) {
        const long t = root.integer("threads");
        if (t < 0) fail(ErrorKind::config, "'threads' must be >= 0");
        threads = static_cast<unsigned>(t);
    }
    if (options.threads) threads = *options.threads;
    set_thread_count(threads);

    fs::path out = options.output_dir;
    if (out.empty()) out = root.text("output_dir", std::string("pdo_output"));

    const BackendParams bp = parse_backend(root.sub("backend"));
    const BackendPtr backend = make_backend(bp);

    std::optional<Block> symbol_block = root.optional_sub("symbol");
    std::optional<SymbolSpec> symbol_spec;
    if (symbol_block) symbol_spec = parse_symbol(*symbol_block);

    static const json empty = json::object();
    const Block params = root.has("params") ? root.sub("params") : Block(empty, "params");

    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) fail(ErrorKind::io, "cannot create output directory '" + out.string() + "': " + ec.message());

    ScenarioOutcome outcome;
    outcome.task = task;
    outcome.output_dir = out;
    std::vector<fs::path> data_files;
    const Context ctx{backend, bp, symbol_block, symbol_spec, params, seed, out, &data_files};

    json results;
    if (task == "seminorm") results = run_seminorm(ctx);
    else if (task == "class-check") results = run_class_check(ctx);
    else if (task == "resolvent") results = run_resolvent(ctx);
    else if (task == "param-elliptic") results = run_param_elliptic(ctx);
    else if (task == "parametrix") results = run_parametrix(ctx);
    else if (task == "funcalc") results = run_funcalc(ctx);
    else if (task == "power") results = run_power(ctx);
    else if (task == "garding") results = run_garding(ctx);
    else if (task == "interpolate") results = run_interpolate(ctx);
    else results = run_diffuse(ctx);

    json report = {{"task", task},
                   {"version", version_string},
                   {"seed", seed},
                   {"backend", backend_json(bp)},
                   {"backend_description", backend->describe()},
                   {"results", results}};
    if (symbol_block) report["symbol"] = symbol_block->raw();
    json files = json::array();
    for (const auto& f : data_files) files.push_back(f.filename().string());
    report["data_files"] = files;
    write_text(out / "report.json", report.dump(2) + "\n");

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json manifest = {{"task", task},
                     {"version", version_string},
                     {"seed", seed},
                     {"threads", threads},
                     {"config", cfg},
                     {"effective_backend", backend_json(bp)},
                     {"files", files},
                     {"report", "report.json"},
                     {"wall_time_seconds", wall}};
    write_text(out / "manifest.json", manifest.dump(2) + "\n");

    outcome.files.push_back(out / "report.json");
    outcome.files.push_back(out / "manifest.json");
    outcome.files.insert(outcome.files.end(), data_files.begin(), data_files.end());
    return outcome;
}

} // namespace pdo
