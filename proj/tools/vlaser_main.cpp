// Command-line front end: vlaser <mode> --config <path> [--out <path>]
// [--format csv|json] [--workers k] [--seed n].  The subcommand selects the
// run mode (overriding any `mode` key in the file); the remaining flags
// override their config keys when given.  Exit codes: 0 success, 1 bad
// input (parse/validation), 2 runtime failure (solver/io).

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "vlaser.h"

namespace {

constexpr const char* kModes[] = {"steady",     "stability", "threshold",
                                  "floquet",    "ramp",      "trajectory",
                                  "sweep2d",    "estimates"};

int exit_code_for(vlaser_status s) {
  switch (s) {
    case VLASER_OK:
      return 0;
    case VLASER_ERR_PARSE:
    case VLASER_ERR_INVALID_ARGUMENT:
      return 1;
    default:
      return 2;
  }
}

int report(vlaser_status s) {
  if (s != VLASER_OK)
    std::fprintf(stderr, "vlaser: %s: %s\n", vlaser_status_name(s),
                 vlaser_last_error());
  return exit_code_for(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mean-field solver for a driven three-level gas in a cavity"};
  app.require_subcommand(1);

  std::string config_path, out_path, format;
  int workers = 0;
  std::string seed;

  for (const char* mode : kModes) {
    CLI::App* sub = app.add_subcommand(mode);
    sub->add_option("--config", config_path, "config file (key = value lines)")
        ->required();
    sub->add_option("--out", out_path, "output path (default: stdout)");
    sub->add_option("--format", format, "output format: csv or json");
    sub->add_option("--workers", workers, "parallel workers for sweep2d");
    sub->add_option("--seed", seed, "random seed (reserved)");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string mode = app.get_subcommands().front()->get_name();
  const CLI::App* sub = app.get_subcommands().front();

  vlaser_config* cfg = nullptr;
  vlaser_status s = vlaser_config_parse_file(config_path.c_str(), &cfg);
  if (s != VLASER_OK) return report(s);

  s = vlaser_config_set(cfg, "mode", mode.c_str());
  if (s == VLASER_OK && sub->count("--out"))
    s = vlaser_config_set(cfg, "out", out_path.c_str());
  if (s == VLASER_OK && sub->count("--format"))
    s = vlaser_config_set(cfg, "format", format.c_str());
  if (s == VLASER_OK && sub->count("--workers"))
    s = vlaser_config_set(cfg, "workers", std::to_string(workers).c_str());
  if (s == VLASER_OK && sub->count("--seed"))
    s = vlaser_config_set(cfg, "seed", seed.c_str());

  if (s == VLASER_OK) s = vlaser_run(cfg);

  vlaser_config_free(cfg);
  return report(s);
}
