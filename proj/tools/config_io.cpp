#include "config_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <set>

namespace subband::cli {

using nlohmann::json;

namespace {

void require_object(const json& j, const char* where)
{
    if (!j.is_object())
        throw ConfigError(std::string(where) + ": expected an object");
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const char* where)
{
    const std::set<std::string> k(known.begin(), known.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!k.count(it.key()))
            throw ConfigError(std::string(where) + ": unknown key '" + it.key() + "'");
}

double number(const json& j, const char* key, double fallback)
{
    if (!j.contains(key))
        return fallback;
    const json& v = j.at(key);
    if (!v.is_number())
        throw ConfigError(std::string("key '") + key + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x))
        throw ConfigError(std::string("key '") + key + "' must be finite");
    return x;
}

long long integer(const json& j, const char* key, long long fallback)
{
    if (!j.contains(key))
        return fallback;
    const json& v = j.at(key);
    if (!v.is_number_integer())
        throw ConfigError(std::string("key '") + key + "' must be an integer");
    return v.get<long long>();
}

bool boolean(const json& j, const char* key, bool fallback)
{
    if (!j.contains(key))
        return fallback;
    if (!j.at(key).is_boolean())
        throw ConfigError(std::string("key '") + key + "' must be a boolean");
    return j.at(key).get<bool>();
}

std::string text(const json& j, const char* key, const std::string& fallback)
{
    if (!j.contains(key))
        return fallback;
    if (!j.at(key).is_string())
        throw ConfigError(std::string("key '") + key + "' must be a string");
    return j.at(key).get<std::string>();
}

std::vector<double> number_list(const json& j, const char* key, std::vector<double> fallback)
{
    if (!j.contains(key))
        return fallback;
    const json& v = j.at(key);
    if (!v.is_array() || v.empty())
        throw ConfigError(std::string("key '") + key + "' must be a non-empty array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number())
            throw ConfigError(std::string("key '") + key + "' must hold numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw Error("cannot open " + path.string() + " for writing");
    return os;
}

} // namespace

RunConfig parse_config(const json& j)
{
    require_object(j, "config");
    reject_unknown(j,
                   {"M_target", "T", "beta", "vext", "theta", "fp_tol", "max_outer", "J_margin", "grid", "init",
                    "poisson", "self_consistent", "verify"},
                   "config");
    if (!j.contains("M_target"))
        throw ConfigError("config: M_target is required");
    RunConfig rc;
    SolverConfig& c = rc.solver;
    c.M_target = number(j, "M_target", 1.0);
    if (!(c.M_target > 0.0))
        throw ConfigError("M_target must be positive");

    const double T = number(j, "T", 0.0);
    if (T < 0.0)
        throw ConfigError("T must be nonnegative");
    double p = 2.0;
    if (j.contains("beta")) {
        const json& b = j.at("beta");
        require_object(b, "beta");
        reject_unknown(b, {"kind", "p"}, "beta");
        if (text(b, "kind", "power") != "power")
            throw ConfigError("beta.kind: only 'power' is supported");
        p = number(b, "p", 2.0);
        if (!(p > 1.0))
            throw ConfigError("beta.p must exceed 1");
    }
    c.model = OccupancyModel::power(T, p);

    if (j.contains("vext")) {
        const json& v = j.at("vext");
        require_object(v, "vext");
        reject_unknown(v, {"kind", "strength", "center1", "center2", "width"}, "vext");
        const std::string kind = text(v, "kind", "zero");
        if (kind == "zero")
            c.vext.kind = ExternalPotential::Kind::zero;
        else if (kind == "z_well")
            c.vext.kind = ExternalPotential::Kind::z_well;
        else if (kind == "lateral_bump")
            c.vext.kind = ExternalPotential::Kind::lateral_bump;
        else
            throw ConfigError("vext.kind must be zero, z_well or lateral_bump");
        c.vext.strength = number(v, "strength", c.vext.strength);
        c.vext.center1 = number(v, "center1", c.vext.center1);
        c.vext.center2 = number(v, "center2", c.vext.center2);
        c.vext.width = number(v, "width", c.vext.width);
        if (c.vext.strength < 0.0)
            throw ConfigError("vext.strength must be nonnegative");
        if (!(c.vext.width > 0.0))
            throw ConfigError("vext.width must be positive");
    }

    c.theta = number(j, "theta", c.theta);
    c.fp_tol = number(j, "fp_tol", c.fp_tol);
    c.max_outer = static_cast<int>(integer(j, "max_outer", c.max_outer));
    c.J_margin = static_cast<int>(integer(j, "J_margin", c.J_margin));
    c.self_consistent = boolean(j, "self_consistent", c.self_consistent);

    if (j.contains("grid")) {
        const json& g = j.at("grid");
        require_object(g, "grid");
        reject_unknown(g, {"ny1", "ny2", "nz", "L1", "L2"}, "grid");
        c.grid = Grid(static_cast<int>(integer(g, "ny1", 24)), static_cast<int>(integer(g, "ny2", 24)),
                      static_cast<int>(integer(g, "nz", 64)), number(g, "L1", 1.0), number(g, "L2", 1.0));
    }

    if (j.contains("init")) {
        const json& in = j.at("init");
        require_object(in, "init");
        reject_unknown(in, {"kind", "seed", "amplitude", "values"}, "init");
        const std::string kind = text(in, "kind", "zero");
        if (kind == "zero")
            c.init.kind = InitialPotential::Kind::zero;
        else if (kind == "random_smooth")
            c.init.kind = InitialPotential::Kind::random_smooth;
        else if (kind == "supplied")
            c.init.kind = InitialPotential::Kind::supplied;
        else
            throw ConfigError("init.kind must be zero, random_smooth or supplied");
        const long long seed = integer(in, "seed", 42);
        if (seed < 0)
            throw ConfigError("init.seed must be nonnegative");
        c.init.seed = static_cast<std::uint64_t>(seed);
        c.init.amplitude = number(in, "amplitude", 1.0);
        if (c.init.kind == InitialPotential::Kind::supplied) {
            // Flat array, z index fastest: values[k + (nz+1) * l].
            const std::vector<double> v = number_list(in, "values", {});
            const Grid& g = c.grid;
            if (static_cast<int>(v.size()) != g.z_size() * g.lateral_size())
                throw ConfigError("init.values must hold (nz+1) * ny1 * ny2 numbers");
            c.init.values = Eigen::Map<const Field3D>(v.data(), g.z_size(), g.lateral_size());
        }
    }

    if (j.contains("poisson")) {
        const json& ps = j.at("poisson");
        require_object(ps, "poisson");
        reject_unknown(ps, {"method", "tol", "max_iter"}, "poisson");
        const std::string m = text(ps, "method", "cg");
        if (m == "cg")
            c.poisson.method = PoissonMethod::cg;
        else if (m == "spectral")
            c.poisson.method = PoissonMethod::spectral;
        else
            throw ConfigError("poisson.method must be cg or spectral");
        c.poisson.rel_tol = number(ps, "tol", c.poisson.rel_tol);
        c.poisson.max_iter = static_cast<int>(integer(ps, "max_iter", 0));
    }

    if (j.contains("verify")) {
        const json& v = j.at("verify");
        require_object(v, "verify");
        reject_unknown(v,
                       {"seed", "n_pairs", "n_perturbations", "pair_bands", "s", "eps_levels", "stability_levels",
                        "unsorted_weighted_l1_pair"},
                       "verify");
        VerifyOptions& o = rc.verify;
        const long long seed = integer(v, "seed", 42);
        if (seed < 0)
            throw ConfigError("verify.seed must be nonnegative");
        o.seed = static_cast<std::uint64_t>(seed);
        o.n_pairs = static_cast<int>(integer(v, "n_pairs", o.n_pairs));
        o.n_perturbations = static_cast<int>(integer(v, "n_perturbations", o.n_perturbations));
        o.pair_bands = static_cast<int>(integer(v, "pair_bands", o.pair_bands));
        o.interpolation_s = number(v, "s", o.interpolation_s);
        o.eps_levels = number_list(v, "eps_levels", o.eps_levels);
        o.stability_levels = number_list(v, "stability_levels", o.stability_levels);
        o.unsorted_weighted_l1_pair = boolean(v, "unsorted_weighted_l1_pair", false);
        if (o.n_pairs < 0 || o.n_perturbations < 0 || o.pair_bands < 1)
            throw ConfigError("verify: counts must be nonnegative and pair_bands positive");
    }
    try {
        c.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    return rc;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is)
        throw ConfigError("cannot read config " + path.string());
    json j;
    try {
        j = json::parse(is);
    } catch (const json::exception& e) {
        throw ConfigError("malformed config " + path.string() + ": " + e.what());
    }
    return parse_config(j);
}

std::string format_double(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

json state_json(const EquilibriumState& s, const SolverConfig& cfg)
{
    const auto& e = s.energy;
    double mass = 0.0;
    for (const auto& r : s.rho_j)
        mass += integrate_omega(r, cfg.grid);
    json j;
    j["mu"] = num(s.mu);
    j["J_active"] = active_subband_count(s.spec, s.mu);
    j["J_max"] = s.spec.J;
    j["residual"] = num(s.residual);
    j["iterations"] = s.iterations;
    j["M_target"] = num(cfg.M_target);
    j["mass"] = num(mass);
    j["T"] = num(cfg.model.temperature());
    j["free_energy"] = {{"kinetic_v", num(e.kinetic_v)},
                        {"band_energy", num(e.band_energy)},
                        {"field_energy", num(e.field_energy)},
                        {"casimir", num(e.casimir)},
                        {"quantum_kinetic", num(e.quantum_kinetic)},
                        {"vext_pairing", num(e.vext_pairing)},
                        {"total_primal", num(e.total_primal)},
                        {"total_direct", num(e.total_direct)}};
    j["grid"] = {{"ny1", cfg.grid.ny1()}, {"ny2", cfg.grid.ny2()}, {"nz", cfg.grid.nz()},
                 {"L1", cfg.grid.L1()}, {"L2", cfg.grid.L2()}};
    return j;
}

json report_json(const VerifyReport& r)
{
    json checks = json::array();
    int failed = 0;
    for (const auto& c : r.checks) {
        checks.push_back({{"name", c.name}, {"lhs", num(c.lhs)}, {"rhs", num(c.rhs)}, {"ratio", num(c.ratio)},
                          {"pass", c.pass}});
        failed += c.pass ? 0 : 1;
    }
    json monitors = json::array();
    for (const auto& m : r.monitors)
        monitors.push_back({{"name", m.name}, {"min_ratio", num(m.min_ratio)}, {"max_ratio", num(m.max_ratio)},
                            {"count", m.count}, {"pass", m.pass}});
    json j;
    j["seed"] = r.seed;
    j["checks"] = std::move(checks);
    j["monitors"] = std::move(monitors);
    j["n_checks"] = r.checks.size();
    j["n_failed"] = failed;
    j["all_pass"] = r.all_pass();
    return j;
}

json report_json(const ValidateReport& r)
{
    json checks = json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"name", c.name}, {"lhs", num(c.lhs)}, {"rhs", num(c.rhs)}, {"ratio", num(c.ratio)},
                          {"pass", c.pass}});
    json j;
    j["checks"] = std::move(checks);
    j["all_pass"] = r.all_pass();
    return j;
}

void write_json(const std::filesystem::path& path, const json& j)
{
    auto os = open_out(path);
    os << j.dump(2) << '\n';
    if (!os)
        throw Error("write failed: " + path.string());
}

void write_fields_csv(const std::filesystem::path& path, const EquilibriumState& s, const Grid& g)
{
    auto os = open_out(path);
    os << "y1,y2,z,U,rho\n";
    for (int l = 0; l < g.lateral_size(); ++l) {
        const std::string y = format_double(g.y1(g.i1_of(l))) + ',' + format_double(g.y2(g.i2_of(l))) + ',';
        for (int k = 0; k <= g.nz(); ++k)
            os << y << format_double(g.z(k)) << ',' << format_double(s.U(k, l)) << ','
               << format_double(s.rho(k, l)) << '\n';
    }
    if (!os)
        throw Error("write failed: " + path.string());
}

void write_spectrum_csv(const std::filesystem::path& path, const EquilibriumState& s, const Grid& g)
{
    auto os = open_out(path);
    os << "y1,y2,j,lambda\n";
    for (int l = 0; l < g.lateral_size(); ++l)
        for (int j = 0; j < s.spec.J; ++j)
            os << format_double(g.y1(g.i1_of(l))) << ',' << format_double(g.y2(g.i2_of(l))) << ',' << j + 1 << ','
               << format_double(s.spec.lambda(l, j)) << '\n';
    if (!os)
        throw Error("write failed: " + path.string());
}

void write_trace_csv(const std::filesystem::path& path, const IterationTrace& t)
{
    auto os = open_out(path);
    os << "iter,residual,mu,F,theta\n";
    for (const auto& r : t)
        os << r.iter << ',' << format_double(r.residual) << ',' << format_double(r.mu) << ',' << format_double(r.F)
           << ',' << format_double(r.theta) << '\n';
    if (!os)
        throw Error("write failed: " + path.string());
}

} // namespace subband::cli
