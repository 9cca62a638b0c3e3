#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "config_io.hpp"

namespace fs = std::filesystem;

namespace subband::cli {

namespace {

void prepare_dir(const std::string& out_dir)
{
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir))
        throw Error("cannot create output directory " + out_dir);
}

int report_error(const char* what)
{
    std::cerr << "error: " << what << '\n';
    return 1;
}

std::vector<double> parse_values(const std::string& csv)
{
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        if (b == std::string::npos)
            continue;
        const auto e = item.find_last_not_of(" \t");
        item = item.substr(b, e - b + 1);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw InvalidArgument("--values: cannot parse '" + item + "'");
        }
        if (used != item.size() || !std::isfinite(v))
            throw InvalidArgument("--values: cannot parse '" + item + "'");
        out.push_back(v);
    }
    if (out.empty())
        throw InvalidArgument("--values: empty value list");
    return out;
}

} // namespace

int cmd_solve(const std::string& config_path, const std::string& out_dir)
{
    try {
        const RunConfig rc = load_config(config_path);
        prepare_dir(out_dir);
        const fs::path out(out_dir);
        try {
            const EquilibriumResult r = solve_equilibrium(rc.solver);
            write_json(out / "state.json", state_json(r.state, rc.solver));
            write_fields_csv(out / "fields.csv", r.state, rc.solver.grid);
            write_spectrum_csv(out / "spectrum.csv", r.state, rc.solver.grid);
            write_trace_csv(out / "trace.csv", r.trace);
            std::printf("converged in %d iterations: mu = %.12g, F = %.12g\n", r.state.iterations, r.state.mu,
                        r.state.energy.total_direct);
            return 0;
        } catch (const EquilibriumNonConvergence& e) {
            write_trace_csv(out / "trace.csv", e.trace());
            std::cerr << "error: " << e.what() << '\n';
            return 2;
        } catch (const NonConvergence& e) {
            std::cerr << "error: " << e.what() << '\n';
            return 2;
        }
    } catch (const std::exception& e) {
        return report_error(e.what());
    }
}

int cmd_verify(const std::string& config_path, const std::string& out_dir, std::optional<std::uint64_t> seed)
{
    try {
        RunConfig rc = load_config(config_path);
        if (seed)
            rc.verify.seed = *seed;
        prepare_dir(out_dir);
        VerifyReport rep;
        try {
            rep = run_verification(rc.solver, rc.verify);
        } catch (const NonConvergence& e) {
            std::cerr << "error: " << e.what() << '\n';
            return 2;
        }
        write_json(fs::path(out_dir) / "verify_report.json", report_json(rep));
        int failed = 0;
        for (const auto& c : rep.checks)
            if (!c.pass) {
                ++failed;
                std::cerr << "FAIL " << c.name << " lhs=" << c.lhs << " rhs=" << c.rhs << '\n';
            }
        for (const auto& m : rep.monitors)
            if (!m.pass)
                std::cerr << "FAIL monitor " << m.name << '\n';
        std::printf("%zu checks, %d failed\n", rep.checks.size(), failed);
        return rep.all_pass() ? 0 : 2;
    } catch (const std::exception& e) {
        return report_error(e.what());
    }
}

int cmd_validate(const std::string& out_dir)
{
    try {
        prepare_dir(out_dir);
        const ValidateReport rep = run_validation();
        write_json(fs::path(out_dir) / "validate_report.json", report_json(rep));
        for (const auto& c : rep.checks)
            std::printf("%s %s lhs=%.6e rhs=%.6e\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.lhs, c.rhs);
        return rep.all_pass() ? 0 : 2;
    } catch (const std::exception& e) {
        return report_error(e.what());
    }
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir, const std::string& param,
              const std::string& values)
{
    try {
        if (param != "M" && param != "T")
            throw InvalidArgument("--param must be M or T");
        const std::vector<double> vals = parse_values(values);
        const RunConfig rc = load_config(config_path);
        prepare_dir(out_dir);
        const fs::path path = fs::path(out_dir) / "sweep.csv";
        std::ofstream os(path, std::ios::binary);
        if (!os)
            throw Error("cannot open " + path.string());
        os << "value,mu,J_active,F_total,iterations\n";
        double prev_mu = 0.0;
        bool monotone = true;
        for (std::size_t k = 0; k < vals.size(); ++k) {
            SolverConfig cfg = rc.solver;
            if (param == "M")
                cfg.M_target = vals[k];
            else
                cfg.model = OccupancyModel(vals[k], cfg.model.casimir());
            EquilibriumResult r;
            try {
                r = solve_equilibrium(cfg);
            } catch (const NonConvergence& e) {
                std::cerr << "error: value " << vals[k] << ": " << e.what() << '\n';
                return 2;
            }
            os << format_double(vals[k]) << ',' << format_double(r.state.mu) << ','
               << active_subband_count(r.state.spec, r.state.mu) << ',' << format_double(r.state.energy.total_direct)
               << ',' << r.state.iterations << '\n';
            os.flush();
            if (k > 0 && vals[k] >= vals[k - 1] && r.state.mu < prev_mu)
                monotone = false;
            prev_mu = r.state.mu;
        }
        if (param == "M")
            std::printf("mu nondecreasing in M: %s\n", monotone ? "yes" : "no");
        return 0;
    } catch (const std::exception& e) {
        return report_error(e.what());
    }
}

} // namespace subband::cli
