#include <iostream>
#include <sstream>

#if __has_include("CLI11.hpp")
#include "CLI11.hpp"
#else
#include <CLI/CLI.hpp>
#endif

#include "app.hpp"

int main(int argc, char** argv) {
  using namespace geoconvex::cli;

  Invocation inv;
  std::string file;
  std::string point;
  std::uint64_t seed = 0;
  int probes = 0;
  bool json_only = false;

  CLI::App app{"Geodesic convexity toolkit: projection, separation, cones and KKT certificates"};
  app.add_option("command", inv.command, "project | separate | support | cone | kkt | solve | verify")
      ->required();
  app.add_option("file", file, "problem file (optional for verify)");
  auto* point_opt = app.add_option("--point", point, "point coordinates, e.g. \"1,0,0\"");
  auto* seed_opt = app.add_option("--seed", seed, "seed; overrides GEOCONVEX_SEED and the file");
  auto* probes_opt = app.add_option("--probes", probes, "probe or sample count");
  app.add_flag("--use-start", inv.use_start, "kkt: certify the file's start point");
  app.add_flag("--json-only", json_only, "suppress the human-readable log on stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    Report report(inv.command.empty() ? "unknown" : inv.command, "", 0);
    report.error(geoconvex::ErrorKind::InvalidArgument, e.what(), kExitInput);
    std::cout << report.finish(0.0).dump(2) << '\n';
    std::cerr << "error: " << e.what() << '\n' << app.help();
    return kExitInput;
  }
  if (!file.empty()) inv.file = file;
  if (*point_opt) inv.point = point;
  if (*seed_opt) inv.seed = seed;
  if (*probes_opt) inv.probes = probes;

  std::ostringstream discard;
  std::ostream& log = json_only ? static_cast<std::ostream&>(discard) : std::cerr;
  const Outcome out = run(inv, log);
  std::cout << out.report.dump(2) << '\n';
  return out.exit_code;
}
