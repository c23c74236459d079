// logsense-ks <mode> --config <path> [--out <dir>] [--seed <u64>] [--threads <n>]
//
// Exit status: 0 when every assertion passed, 1 when one failed, 2 for bad
// input (config validation, unreadable files), 3 for a run that aborted.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "logsense/config.hpp"
#include "logsense/experiments.hpp"

namespace fs = std::filesystem;

namespace {

fs::path output_root(const std::string& flag, const logsense::ExperimentConfig& cfg) {
  if (!flag.empty()) return flag;
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  const char* env = std::getenv("LOGSENSE_OUT");
  const fs::path base = (env && *env) ? fs::path(env) : fs::path("logsense-out");
  return base / logsense::mode_name(cfg.mode);
}

// Fails early, before any compute, if the directory cannot be written.
void probe_writable(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw logsense::ConfigError({"output_dir: cannot create '" + dir.string() + "': " + ec.message()});
  const fs::path probe = dir / ".write-probe";
  {
    std::ofstream f(probe);
    if (!f) throw logsense::ConfigError({"output_dir: '" + dir.string() + "' is not writable"});
  }
  fs::remove(probe, ec);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical lab for the regularized Keller-Segel system with logarithmic sensitivity"};
  std::string mode_arg, config_path, out_dir;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  app.add_option("mode", mode_arg, "simulate | params | entropy-check | eps-study | refine-study | oracle")->required();
  app.add_option("--config", config_path, "JSON config file")->required();
  app.add_option("--out", out_dir, "output directory (default: config output_dir, then $LOGSENSE_OUT/<mode>)");
  auto* seed_opt = app.add_option("--seed", seed, "master seed, overrides the config");
  app.add_option("--threads", threads, "worker threads for independent runs")->check(CLI::Range(1u, 1024u));
  CLI11_PARSE(app, argc, argv);

  const auto mode = logsense::parse_mode(mode_arg);
  if (!mode) {
    std::cerr << "unknown mode '" << mode_arg << "'\n";
    return 2;
  }
  logsense::ExperimentConfig cfg;
  fs::path out;
  try {
    std::ifstream in(config_path);
    if (!in) throw logsense::ConfigError({"--config: cannot read '" + config_path + "'"});
    std::stringstream text;
    text << in.rdbuf();
    cfg = logsense::parse_config_text(text.str(), mode);
    if (*seed_opt) cfg.seed = seed;
    out = output_root(out_dir, cfg);
    probe_writable(out);
  } catch (const logsense::ConfigError& e) {
    std::cerr << "invalid config:\n";
    for (const auto& p : e.problems()) std::cerr << "  " << p << "\n";
    return 2;
  }

  try {
    const auto outcome = logsense::run_experiment(cfg, out, threads);
    for (const auto& a : outcome.manifest["assertions"]) {
      const bool ok = a["passed"].get<bool>();
      std::cout << (ok ? "PASS " : (a["kind"] == "flag" ? "FLAG " : "FAIL ")) << a["name"].get<std::string>() << "\n";
    }
    std::cout << "manifest: " << (out / "manifest.json").string() << "\n";
    return outcome.passed ? 0 : 1;
  } catch (const logsense::StudyFailure& e) {
    std::cerr << "run failed at eps=" << e.eps() << ": " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << "\n";
  }
  return 3;
}
