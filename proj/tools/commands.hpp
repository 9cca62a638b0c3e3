#ifndef SUBBAND_TOOLS_COMMANDS_HPP
#define SUBBAND_TOOLS_COMMANDS_HPP

#include <cstdint>
#include <optional>
#include <string>

namespace subband::cli {

// Exit codes: 0 success, 1 input/IO/precondition error, 2 non-convergence
// (or, for verify/validate, a failed assertion).
int cmd_solve(const std::string& config_path, const std::string& out_dir);
int cmd_verify(const std::string& config_path, const std::string& out_dir, std::optional<std::uint64_t> seed);
int cmd_validate(const std::string& out_dir);
int cmd_sweep(const std::string& config_path, const std::string& out_dir, const std::string& param,
              const std::string& values);

} // namespace subband::cli

#endif
