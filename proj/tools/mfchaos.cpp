#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mfchaos/mfchaos.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  long seed_offset = 0;
  int threads = -1;
};

int run_subcommand(const std::string& name, const CommonOpts& opts) {
  mfchaos::RunConfig cfg = mfchaos::parse_config(opts.config_path);
  cfg.kv["experiment"] = name;
  if (!opts.out_dir.empty()) cfg.kv["out_dir"] = opts.out_dir;
  if (opts.threads >= 0) cfg.kv["threads"] = std::to_string(opts.threads);
  if (opts.seed_offset != 0) {
    std::string shifted;
    for (std::uint64_t s : cfg.int_list("seeds")) {
      if (!shifted.empty()) shifted += ',';
      shifted += std::to_string(s + std::uint64_t(opts.seed_offset));
    }
    cfg.kv["seeds"] = shifted;
  }
  return mfchaos::dispatch(cfg, std::cout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mfchaos: regularized mean-field dynamics with implicit volatility"};
  app.require_subcommand(1);

  const std::vector<std::string> subcommands = {
      "check-stability", "solve-fp",   "simulate-particles", "converge-n",
      "converge-eps",    "uniqueness", "stability-sweep",    "smoothing"};

  CommonOpts opts;
  std::string selected;
  for (const std::string& name : subcommands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", opts.config_path, "config file (key = value)")->required();
    sub->add_option("--out", opts.out_dir, "output directory (overrides out_dir)");
    sub->add_option("--seed-offset", opts.seed_offset, "added to every seed in the list");
    sub->add_option("--threads", opts.threads, "worker pool size (0 = all cores)");
    sub->callback([&selected, name]() { selected = name; });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    return run_subcommand(selected, opts);
  } catch (const mfchaos::ParseError& e) {
    std::cerr << "parse error (line " << e.line << ", col " << e.column << "): " << e.what()
              << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return 1;
}
