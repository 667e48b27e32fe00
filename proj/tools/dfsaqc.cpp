// dfsaqc: run named experiments and the acceptance gate.
#include <algorithm>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "dfsaqc/acceptance.hpp"
#include "dfsaqc/experiment.hpp"

namespace {

int fail(const std::string& message, int code) {
  std::string line = message;
  std::replace(line.begin(), line.end(), '\n', ' ');
  std::cerr << "error: " << line << "\n";
  return code;
}

int run(const std::string& experiment, const std::string& config_path, const std::vector<std::string>& sets,
        const std::string& out) {
  dfsaqc::Config given = config_path.empty() ? dfsaqc::Config{} : dfsaqc::Config::load(config_path);
  for (const auto& s : sets) given.set(s);
  const dfsaqc::EffectiveConfig cfg(experiment, given);
  const auto summary = dfsaqc::run_experiment(cfg, out);
  for (const auto& w : summary.warnings) std::cerr << "warning: " << w << "\n";
  for (const auto& f : summary.files) std::cout << f << "\n";
  return dfsaqc::kExitOk;
}

int verify(const std::string& suite_name, const std::string& json_path, const std::vector<std::string>& only) {
  dfsaqc::AcceptanceOptions options;
  options.suite = dfsaqc::parse_suite(suite_name);
  options.only = only;
  std::ofstream json;
  const std::string path = json_path.empty() && options.suite == dfsaqc::Suite::Full ? "acceptance-full.jsonl" : json_path;
  if (!path.empty()) {
    json.open(path);
    if (!json) return fail("cannot open '" + path + "' for writing", dfsaqc::kExitFailure);
  }
  const auto results = dfsaqc::run_acceptance(options, [&](const dfsaqc::CriterionResult& r) {
    std::cout << dfsaqc::format_line(r) << std::endl;
    if (json.is_open()) json << dfsaqc::to_json_line(r) << "\n";
  });
  const auto passed = std::count_if(results.begin(), results.end(), [](const auto& r) { return r.pass; });
  std::cout << passed << "/" << results.size() << " criteria passed\n";
  if (json.is_open()) std::cout << "summary: " << path << "\n";
  return passed == static_cast<long>(results.size()) ? dfsaqc::kExitOk : dfsaqc::kExitFailure;
}

int describe(const std::string& experiment) {
  const auto& names = dfsaqc::experiment_names();
  for (const auto& name : names) {
    if (!experiment.empty() && name != experiment) continue;
    std::cout << "[" << name << "]\n";
    for (const auto& k : dfsaqc::experiment_keys(name))
      std::cout << "  " << k.name << " = " << k.default_value << "    # " << k.help << "\n";
  }
  if (!experiment.empty() && std::find(names.begin(), names.end(), experiment) == names.end())
    throw dfsaqc::ConfigError("unknown experiment '" + experiment + "'");
  return dfsaqc::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-protected adiabatic Grover search in a decoherence-free subspace"};
  app.set_version_flag("--version", dfsaqc::tool_version());
  app.require_subcommand(1);

  std::string experiment, config_path, out, suite = "fast", json_path;
  std::vector<std::string> sets, only;

  auto* run_cmd = app.add_subcommand("run", "Run a named experiment and write CSV output");
  run_cmd->add_option("--experiment,-e", experiment, "Experiment name")->required()->check(CLI::IsMember(dfsaqc::experiment_names()));
  run_cmd->add_option("--config,-c", config_path, "key=value config file");
  run_cmd->add_option("--set,-s", sets, "Override a key (key=value); repeatable");
  run_cmd->add_option("--out,-o", out, "Output CSV path")->required();

  auto* verify_cmd = app.add_subcommand("verify", "Run the acceptance suite");
  verify_cmd->add_option("--suite", suite, "fast or full")->check(CLI::IsMember({"fast", "full"}));
  verify_cmd->add_option("--json", json_path, "JSON-lines summary path (full suite default: acceptance-full.jsonl)");
  verify_cmd->add_option("--only", only, "Run only these criterion ids");

  auto* describe_cmd = app.add_subcommand("describe", "List experiments with their keys and defaults");
  describe_cmd->add_option("--experiment,-e", experiment, "Only this experiment");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(e.what(), dfsaqc::kExitInvalidConfig);
  }

  try {
    if (*run_cmd) return run(experiment, config_path, sets, out);
    if (*verify_cmd) return verify(suite, json_path, only);
    return describe(experiment);
  } catch (const std::exception& e) {
    return fail(e.what(), dfsaqc::exit_code_for(std::current_exception()));
  }
}
