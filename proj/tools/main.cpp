#include <CLI11.hpp>

#include <cstdint>
#include <optional>
#include <string>

#include "commands.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Self-consistent subband equilibria and their checks"};
    app.require_subcommand(1);

    std::string config, out, param, values;
    std::uint64_t seed = 42;

    auto* solve = app.add_subcommand("solve", "Compute an equilibrium");
    solve->add_option("--config", config, "JSON configuration")->required();
    solve->add_option("--out", out, "Output directory")->required();

    auto* verify = app.add_subcommand("verify", "Solve, then run the inequality checks");
    verify->add_option("--config", config, "JSON configuration")->required();
    verify->add_option("--out", out, "Output directory")->required();
    auto* seed_opt = verify->add_option("--seed", seed, "Seed for random pairs and perturbations (default 42)");

    auto* validate = app.add_subcommand("validate", "Discretization studies against closed forms");
    validate->add_option("--out", out, "Output directory")->required();

    auto* sweep = app.add_subcommand("sweep", "One solve per parameter value");
    sweep->add_option("--config", config, "JSON configuration")->required();
    sweep->add_option("--out", out, "Output directory")->required();
    sweep->add_option("--param", param, "M or T")->required();
    sweep->add_option("--values", values, "Comma-separated values")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    using namespace subband::cli;
    if (*solve)
        return cmd_solve(config, out);
    if (*verify)
        return cmd_verify(config, out, seed_opt->count() ? std::optional<std::uint64_t>(seed) : std::nullopt);
    if (*validate)
        return cmd_validate(out);
    return cmd_sweep(config, out, param, values);
}
