// floquet-pt: phase diagrams, quasi-energies and stroboscopic dynamics of a
// square-wave driven non-Hermitian two-level system.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "floquet_pt/io.hpp"

namespace {

using floquet_pt::Json;

/// Recursive object merge: values in `overlay` win, nested objects merge.
void deep_merge(Json& base, const Json& overlay) {
  if (!base.is_object() || !overlay.is_object()) {
    base = overlay;
    return;
  }
  for (const auto& item : overlay.items()) {
    if (base.contains(item.key()))
      deep_merge(base[item.key()], item.value());
    else
      base[item.key()] = item.value();
  }
}

/// Applies one "--set path.to.key=value" override. Values are parsed as JSON
/// scalars when possible, otherwise taken as strings.
void apply_override(Json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw floquet_pt::ConfigError("--set expects key=value, got '" + assignment + "'");
  const std::string path = assignment.substr(0, eq);
  const std::string value_text = assignment.substr(eq + 1);

  Json value;
  try {
    value = Json::parse(value_text);
  } catch (const Json::parse_error&) {
    value = value_text;  // bare string
  }

  Json* node = &doc;
  std::istringstream keys(path);
  std::string key, next;
  if (!std::getline(keys, key, '.'))
    throw floquet_pt::ConfigError("--set: empty key in '" + assignment + "'");
  while (std::getline(keys, next, '.')) {
    if (!node->contains(key) || !(*node)[key].is_object()) (*node)[key] = Json::object();
    node = &(*node)[key];
    key = next;
  }
  (*node)[key] = value;
}

std::string preset_list() {
  std::string names;
  for (const auto& p : floquet_pt::figure_presets()) {
    if (!names.empty()) names += ", ";
    names += p.name;
  }
  return names;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Floquet PT-phase toolkit for square-wave driven two-level systems"};
  app.require_subcommand(1);

  std::string config_path, preset_name, out_dir;
  std::vector<std::string> overrides;

  const std::vector<std::string> command_names = {"classify", "quasi",     "sweep",
                                                  "ep",       "dynamics",  "hfcompare",
                                                  "resonances"};
  const std::vector<std::string> command_help = {
      "phase label, Pi and quasi-energies for one protocol",
      "quasi-energy detail for one protocol",
      "2D phase-diagram scan to CSV",
      "refine an exceptional point along a parameter ray",
      "stroboscopic propagation and norm growth rate",
      "exact Pi vs second-order high-frequency approximation",
      "multiphoton resonance predictions"};

  for (size_t i = 0; i < command_names.size(); ++i) {
    CLI::App* sub = app.add_subcommand(command_names[i], command_help[i]);
    sub->add_option("--config", config_path, "JSON configuration file");
    sub->add_option("--preset", preset_name,
                    "figure preset (" + preset_list() + ")");
    sub->add_option("--out", out_dir, "output directory (default '.')");
    sub->add_option("--set", overrides, "override a config key, e.g. --set protocol.gamma0=0.2")
        ->take_all();
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command_name = app.get_subcommands().front()->get_name();

  Json doc = Json::object();
  try {
    if (!preset_name.empty()) {
      const floquet_pt::FigurePreset* preset = floquet_pt::find_preset(preset_name);
      if (!preset)
        throw floquet_pt::ConfigError("unknown preset '" + preset_name + "' (available: " +
                                      preset_list() + ")");
      doc = floquet_pt::preset_config(*preset);
    }
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) {
        std::cerr << "io error: cannot read config file '" << config_path << "'\n";
        return floquet_pt::kExitIo;
      }
      std::stringstream buffer;
      buffer << in.rdbuf();
      Json file_doc;
      try {
        file_doc = Json::parse(buffer.str());
      } catch (const Json::parse_error& e) {
        throw floquet_pt::ConfigError(std::string("malformed JSON in ") + config_path + ": " +
                                      e.what());
      }
      deep_merge(doc, file_doc);
    }
    for (const std::string& assignment : overrides) apply_override(doc, assignment);
    if (!out_dir.empty()) doc["out"] = out_dir;

    floquet_pt::RunConfig cfg = floquet_pt::parse_config(doc);
    const auto cmd = floquet_pt::command_from_name(command_name);
    if (!cmd) throw floquet_pt::ConfigError("unknown command '" + command_name + "'");
    return floquet_pt::run_command_catching(cfg, *cmd, std::cout, std::cerr);
  } catch (const floquet_pt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return floquet_pt::kExitConfig;
  }
}
