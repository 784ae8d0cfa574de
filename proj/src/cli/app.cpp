#include "cropforge/cli.hpp"

#include <algorithm>
#include <ostream>

#include "cli/common.hpp"

namespace cropforge::cli {

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App root{"cropforge: crop-model calibration, ensembles and surrogates", "cropforge"};
  root.set_version_flag("--version", std::string("cropforge ") + CROPFORGE_VERSION);
  root.require_subcommand(1);

  Registry registry;
  register_calibrate(root, registry);
  register_evaluate(root, registry);
  register_benchmark(root, registry);
  register_sample(root, registry);
  register_train(root, registry);
  register_predict(root, registry);
  register_report(root, registry);
  register_simulate(root, registry);
  register_gen_weather(root, registry);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    root.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << root.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << root.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << root.version() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    // Help requested on a subcommand surfaces as CallForHelp from that subcommand.
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  Session session{out, err};
  for (Command& cmd : registry) {
    if (!cmd.app->parsed()) continue;
    try {
      cmd.run(session);
      return kExitOk;
    } catch (const CLI::ParseError& e) {
      err << "error: " << e.what() << "\n";
      return kExitUsage;
    } catch (const ValidationError& e) {
      err << "error: " << e.what() << "\n";
      return kExitUsage;
    } catch (const ParseError& e) {
      err << "error: " << e.what() << "\n";
      return kExitUsage;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kExitRuntime;
    }
  }
  err << "error: no command given\n";
  return kExitUsage;
}

}  // namespace cropforge::cli
