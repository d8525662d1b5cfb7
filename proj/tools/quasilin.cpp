#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include <CLI11.hpp>

#include "runner.hpp"

namespace {

std::string slurp(std::istream& in) { return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()}; }

}  // namespace

int main(int argc, char** argv) {
  using namespace quasilin;
  CLI::App app{"Quasilinear quadratic forms in characteristic 2: invariants, splitting towers, conjecture checks"};
  cli::Options opt;
  std::string path = "-";
  std::string inline_script;
  bool print_only = false;
  app.add_option("script", path, "Script file, or - for stdin")->capture_default_str();
  app.add_option("-e,--eval", inline_script, "Script text given on the command line");
  app.add_flag("--json", opt.json, "Emit one JSON document (schema quasilin/1)");
  app.add_option("--seed", opt.seed, "Default seed for fuzz")->capture_default_str();
  app.add_option("--var-budget", opt.var_budget, "Maximum number of transcendental variables in any field")
      ->envname("QUASILIN_VAR_BUDGET")
      ->capture_default_str();
  app.add_option("--timeout-s", opt.timeout_s, "Wall-clock limit for the whole script, 0 for none")
      ->capture_default_str();
  app.add_flag("--print", print_only, "Print the canonical form of the script and exit");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::parse_error;
  }

  std::string text;
  if (!inline_script.empty()) {
    text = inline_script;
  } else if (path == "-") {
    text = slurp(std::cin);
  } else {
    std::ifstream in(path);
    if (!in) {
      std::cerr << "cannot open " << path << "\n";
      return cli::parse_error;
    }
    text = slurp(in);
  }

  if (print_only) {
    try {
      std::cout << script::to_string(script::parse(text));
      return cli::ok;
    } catch (const ParseError& e) {
      std::cerr << "error (parse): " << e.what() << "\n";
      return cli::parse_error;
    }
  }

  const cli::RunResult r = cli::run(text, opt);
  if (opt.json) {
    std::cout << r.document.dump(2) << "\n";
  } else {
    const auto cut = r.document.contains("error") ? r.text.rfind("error (") : std::string::npos;
    std::cout << r.text.substr(0, cut);
    if (cut != std::string::npos) std::cerr << r.text.substr(cut);
  }
  return r.exit_code;
}
