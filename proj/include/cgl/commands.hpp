#ifndef CGL_COMMANDS_HPP
#define CGL_COMMANDS_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cgl/config.hpp"

namespace cgl {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitNumerical = 2,
  kExitTolerance = 3,
};

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {
      "simulate", "check-identities", "ground-state", "sweep-theta", "sweep-inviscid",
      "selftest"};
  return names;
}

/// One invocation. CLI flags override the configuration file.
struct CommandRequest {
  std::string command;
  std::optional<std::string> config_path;
  /// Used instead of config_path when set (rerun).
  std::optional<std::string> config_text;
  std::optional<std::string> output_dir;
  std::optional<int> threads;
};

/// Executes the request, writes outputs plus manifest.json into the output
/// directory and maps failures onto ExitCode. Messages go to `out` / `err`.
int run_command(const CommandRequest& request, std::ostream& out, std::ostream& err);

/// Re-executes a manifest's command from its configuration echo. The outputs
/// go to `output_dir`, or `<manifest dir>/rerun` when unset.
int rerun_manifest(const std::string& manifest_path, std::optional<std::string> output_dir,
                   std::ostream& out, std::ostream& err);

}  // namespace cgl

#endif  // CGL_COMMANDS_HPP
