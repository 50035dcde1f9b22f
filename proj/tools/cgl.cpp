#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "cgl/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Pseudo-spectral solver and limit experiments for the complex Ginzburg-Landau equation"};
  app.set_version_flag("--version", std::string(CGL_VERSION));
  app.require_subcommand(1);

  struct Options {
    std::string config;
    std::string output_dir;
    int threads = 0;
  };
  std::map<std::string, Options> options;
  std::map<std::string, CLI::App*> subs;

  const std::map<std::string, std::string> help = {
      {"simulate", "Integrate one configuration and write diagnostics.csv"},
      {"check-identities", "Integrate and check the mass and energy balance identities"},
      {"ground-state", "Print the ground-state constants for d = 3, 4"},
      {"sweep-theta", "Zero-dispersion sweep against the heat flow"},
      {"sweep-inviscid", "Inviscid sweep against the Schrodinger flow"},
      {"selftest", "Run the built-in example suite"},
  };
  for (const auto& name : cgl::command_names()) {
    auto* sub = app.add_subcommand(name, help.at(name));
    auto& o = options[name];
    sub->add_option("-c,--config", o.config, "Configuration file (key = value lines)")
        ->check(CLI::ExistingFile);
    sub->add_option("-o,--output-dir", o.output_dir, "Output directory (overrides output.dir)");
    sub->add_option("-j,--threads", o.threads, "Worker threads (overrides threads)")
        ->check(CLI::PositiveNumber);
    subs[name] = sub;
  }

  std::string manifest;
  std::string rerun_dir;
  auto* rerun = app.add_subcommand("rerun", "Repeat a run from its manifest.json");
  rerun->add_option("manifest", manifest, "Path to manifest.json")->required()->check(CLI::ExistingFile);
  rerun->add_option("-o,--output-dir", rerun_dir, "Output directory (default: <manifest dir>/rerun)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cgl::kExitOk : cgl::kExitUsage;
  }

  if (rerun->parsed())
    return cgl::rerun_manifest(manifest, rerun_dir.empty() ? std::nullopt : std::optional(rerun_dir),
                               std::cout, std::cerr);

  for (const auto& [name, sub] : subs) {
    if (!sub->parsed()) continue;
    const auto& o = options[name];
    cgl::CommandRequest request;
    request.command = name;
    if (!o.config.empty()) request.config_path = o.config;
    if (!o.output_dir.empty()) request.output_dir = o.output_dir;
    if (o.threads > 0) request.threads = o.threads;
    return cgl::run_command(request, std::cout, std::cerr);
  }
  return cgl::kExitUsage;
}
