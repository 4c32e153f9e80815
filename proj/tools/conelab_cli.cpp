#include <CLI11.hpp>

#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "conelab/conelab.h"

namespace {

const std::map<std::string, std::string> kAliases = {
    {"out", "run.output_dir"},      {"seed", "run.seed"},           {"preset", "metric.preset"},
    {"metric-file", "metric.file"}, {"link", "link.name"},          {"link-file", "link.file"},
    {"N", "grid.N"},                {"p", "grid.p"},                {"L", "metric.L"},
    {"tau", "entropy.tau"},         {"sign", "entropy.sign"},       {"normalization", "flow.normalization"},
    {"T", "flow.T"},                {"op", "convergence.op"},       {"refinements", "convergence.refinements"},
    {"orders", "mapping.orders"},   {"flow-entropy", "flow.entropy"}, {"profile", "metric.profile"},
    {"scale", "metric.scale"},      {"amplitude", "metric.amplitude"}, {"gamma", "metric.gamma"},
    {"reference", "flow.reference"}};

const std::map<std::string, std::string> kDescriptions = {
    {"link-check", "indicial roots, gamma_bar and tangential stability of the link"},
    {"lambda", "lambda-entropy and its minimizer"},
    {"mu", "mu-entropy at fixed tau"},
    {"nu", "nu-entropy, optimal tau and minimizer"},
    {"flow", "Ricci-de Turck flow with entropy monitoring"},
    {"heat-check", "cone heat kernel against flat-space oracles"},
    {"mapping", "tip exponents and decay of the heat operator on x^-N sources"},
    {"convergence", "grid refinement study with Richardson extrapolation"}};

int report_error(cl_status st) {
  std::fprintf(stderr, "conelab: %s: %s\n", cl_status_name(st), cl_last_error());
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropies, heat kernels and Ricci-de Turck flow on radial conical metrics"};
  app.set_version_flag("--version", cl_version());
  app.require_subcommand(1);

  struct Sub {
    CLI::App* app = nullptr;
    std::string config;
    std::vector<std::string> sets;
    std::map<std::string, std::string> values;  // by option name
    std::vector<std::pair<CLI::Option*, std::string>> options;  // option, config key
  };
  std::vector<std::string> names;
  for (size_t i = 0; i < cl_subcommand_count(); ++i) names.emplace_back(cl_subcommand_name(i));
  std::vector<std::string> keys;
  for (size_t i = 0; i < cl_config_key_count(); ++i) keys.emplace_back(cl_config_key_name(i));

  std::set<std::string> known = {"help", "config", "set", "version"};
  for (const auto& k : keys) known.insert(k);
  for (const auto& a : kAliases) known.insert(a.first);
  std::map<std::string, Sub> subs;
  for (const auto& name : names) {
    Sub& s = subs[name];
    s.app = app.add_subcommand(name, kDescriptions.count(name) ? kDescriptions.at(name) : name);
    s.app->add_option("-c,--config", s.config, "INI config file")->check(CLI::ExistingFile);
    s.app->add_option("--set", s.sets, "override, section.key=value (repeatable)");
    auto* grp = s.app->add_option_group("config keys", "every config key, as --section.key");
    for (const auto& k : keys) {
      if (k == "run.subcommand") continue;
      s.options.emplace_back(grp->add_option("--" + k, s.values[k], k), k);
    }
    auto* al = s.app->add_option_group("shortcuts");
    for (const auto& [alias, key] : kAliases)
      s.options.emplace_back(al->add_option("--" + alias, s.values[alias], key), key);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ExtrasError& e) {
    std::fprintf(stderr, "conelab: %s\n", e.what());
    for (int i = 1; i < argc; ++i) {  // hint for mistyped --section.key
      std::string arg = argv[i];
      if (arg.rfind("--", 0) != 0) continue;
      arg = arg.substr(2, arg.find('=') == std::string::npos ? std::string::npos : arg.find('=') - 2);
      if (known.count(arg)) continue;
      char* near = cl_config_nearest_key(arg.c_str());
      if (near && *near) std::fprintf(stderr, "  unknown option '--%s' (did you mean '--%s'?)\n", arg.c_str(), near);
      cl_string_free(near);
    }
    return 1;
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  for (auto& [name, s] : subs) {
    if (!s.app->parsed()) continue;
    cl_config* cfg = nullptr;
    cl_status st = s.config.empty() ? cl_config_new(name.c_str(), &cfg) : cl_config_from_file(s.config.c_str(), &cfg);
    if (st != CL_OK) return report_error(st);
    st = cl_config_set(cfg, "run.subcommand", name.c_str());
    for (const auto& kv : s.sets) {
      if (st != CL_OK) break;
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        std::fprintf(stderr, "conelab: --set expects section.key=value, got '%s'\n", kv.c_str());
        cl_config_free(cfg);
        return 1;
      }
      st = cl_config_set(cfg, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str());
    }
    for (const auto& [opt, key] : s.options) {
      if (st != CL_OK) break;
      if (opt->count() == 0) continue;
      st = cl_config_set(cfg, key.c_str(), opt->as<std::string>().c_str());
    }
    if (st != CL_OK) {
      cl_config_free(cfg);
      return report_error(st);
    }
    cl_result* res = nullptr;
    st = cl_run(cfg, &res);
    cl_config_free(cfg);
    const int code = cl_result_exit_code(res);
    if (st != CL_OK) std::fprintf(stderr, "conelab: %s: %s\n", cl_status_name(st), cl_last_error());
    else std::printf("%s: %s\n", cl_result_status(res), cl_result_message(res));
    if (res && *cl_result_report_path(res)) std::printf("report: %s\n", cl_result_report_path(res));
    cl_result_free(res);
    return code;
  }
  return 1;
}
