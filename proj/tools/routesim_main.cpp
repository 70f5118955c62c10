#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "routesim/runner.hpp"
#include "routesim/scenario.hpp"

// Exit codes: 0 success, 1 parse/usage error, 2 runtime error.

namespace {

routesim::Protocol pick_protocol(const routesim::Scenario& s,
                                 const std::string& override_name) {
  if (!override_name.empty()) {
    auto p = routesim::protocol_from_name(override_name);
    if (!p) {
      throw routesim::ParseError(0, "unknown protocol '" + override_name +
                                        "' (expected rip|ospf|isis|eigrp)");
    }
    return *p;
  }
  if (s.protocol) return *s.protocol;
  throw routesim::ParseError(
      0, "scenario sets no protocol; pass --protocol rip|ospf|isis|eigrp");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic packet-level simulator comparing RIP, OSPF, "
               "IS-IS and EIGRP"};
  app.require_subcommand(1);

  std::string run_file, run_protocol, run_out;
  auto* run = app.add_subcommand("run", "simulate one scenario file");
  run->add_option("file", run_file, "scenario file")->required();
  run->add_option("--protocol", run_protocol,
                  "rip|ospf|isis|eigrp (overrides the file's choice)");
  run->add_option("--out", run_out, "directory for the csv + summary files");

  std::string cmp_file, cmp_out;
  auto* cmp = app.add_subcommand(
      "compare", "run all four protocols and write side-by-side reports");
  cmp->add_option("file", cmp_file, "scenario file")->required();
  cmp->add_option("--out", cmp_out, "output directory")->required();

  auto* scen = app.add_subcommand("scenarios", "built-in scenarios");
  scen->require_subcommand(1);
  scen->add_subcommand("list", "print the built-in scenario names");
  std::string dump_name;
  auto* dump =
      scen->add_subcommand("dump", "print a built-in in the file format");
  dump->add_option("name", dump_name, "scenario name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) {
      routesim::Scenario s = routesim::load_scenario_file(run_file);
      routesim::Protocol p = pick_protocol(s, run_protocol);
      routesim::RunResult r = routesim::run_scenario(s, p);
      if (run_out.empty()) {
        std::cout << routesim::report_summary_text(r);
      } else {
        routesim::write_reports(r, run_out);
        std::cout << "wrote " << run_out << "/" << r.scenario_name << "."
                  << routesim::protocol_name(p) << ".{csv,summary.txt}\n";
      }
      return 0;
    }

    if (cmp->parsed()) {
      routesim::Scenario s = routesim::load_scenario_file(cmp_file);
      auto runs = routesim::compare_scenario(s, cmp_out);
      std::cout << routesim::comparison_text(runs);
      return 0;
    }

    if (scen->parsed()) {
      if (scen->get_subcommand("list")->parsed()) {
        for (const auto& s : routesim::reference_scenarios()) {
          std::cout << s.name << "\n";
        }
        return 0;
      }
      auto s = routesim::find_reference_scenario(dump_name);
      if (!s) {
        std::cerr << "unknown built-in scenario '" << dump_name << "'\n";
        return 1;
      }
      std::cout << routesim::serialize_scenario(*s);
      return 0;
    }
  } catch (const routesim::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
