#ifndef SUBBAND_TOOLS_CONFIG_IO_HPP
#define SUBBAND_TOOLS_CONFIG_IO_HPP

#include <filesystem>
#include <string>

#include <json.hpp>

#include "subband/equilibrium.hpp"
#include "subband/validate.hpp"
#include "subband/verify.hpp"

namespace subband::cli {

class ConfigError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

struct RunConfig {
    SolverConfig solver;
    VerifyOptions verify;
};

/// Every key is optional except M_target; unknown keys are rejected.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

std::string format_double(double x); // 17 significant digits, scientific

nlohmann::json state_json(const EquilibriumState& s, const SolverConfig& cfg);
nlohmann::json report_json(const VerifyReport& r);
nlohmann::json report_json(const ValidateReport& r);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
void write_fields_csv(const std::filesystem::path& path, const EquilibriumState& s, const Grid& g);
void write_spectrum_csv(const std::filesystem::path& path, const EquilibriumState& s, const Grid& g);
void write_trace_csv(const std::filesystem::path& path, const IterationTrace& t);

} // namespace subband::cli

#endif
