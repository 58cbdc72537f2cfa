#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "gradman/cli.hpp"

using namespace gradman;

int main(int argc, char** argv) {
  CLI::App app{"gradman: exact computations on graded manifolds"};
  app.require_subcommand(1, 1);
  std::string file;
  std::string points;
  std::string fields;
  RunOptions opts;
  app.add_option("--format", opts.format, "output format")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--max-degree", opts.max_degree, "truncation degree of function algebras");
  app.add_option("--sample-points", points, "points like \"(0,0) (1,2)\"");
  app.add_option("--fields", fields, "comma separated vector field names");
  app.add_flag("--single-field", opts.single_field, "frobenius: single field normal form");
  for (const auto& name : subcommands()) {
    auto* sub = app.add_subcommand(name);
    sub->fallthrough();
    sub->add_option("file", file, ".gm document")->required();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return UsageError;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  auto start = std::chrono::steady_clock::now();
  Report report;
  std::ifstream in(file);
  if (!in) {
    report.json = {{"schema", 1}, {"command", command}, {"items", nlohmann::json::array()},
                   {"error", {{"kind", "Usage"}, {"message", "cannot read " + file}}},
                   {"verdict", "usage-error"}, {"exit_code", int(UsageError)}};
    report.exit_code = UsageError;
  } else {
    std::ostringstream text;
    text << in.rdbuf();
    try {
      if (!points.empty()) opts.sample_points = parse_points(points);
      std::stringstream fs(fields);
      for (std::string f; std::getline(fs, f, ',');)
        if (!f.empty()) opts.fields.push_back(f);
      report = run(command, text.str(), opts);
    } catch (const ParseError& e) {
      report.json = {{"schema", 1}, {"command", command}, {"items", nlohmann::json::array()},
                     {"error", {{"kind", "Usage"}, {"message", std::string("--sample-points: ") + e.what()}}},
                     {"verdict", "usage-error"}, {"exit_code", int(UsageError)}};
      report.exit_code = UsageError;
    }
  }
  auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  report.json["file"] = file;
  report.json["elapsed_ms"] = ms;
  if (opts.format == "json") {
    std::cout << report.json.dump(2) << "\n";
  } else {
    if (report.json.contains("error") && report.json["error"].contains("line"))
      std::cerr << file << ":" << report.json["error"]["line"] << ":" << report.json["error"]["column"] << ": "
                << report.json["error"]["message"].get<std::string>() << "\n";
    std::cout << render_text(report.json);
  }
  return report.exit_code;
}
