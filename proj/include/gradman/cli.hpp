#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "gradman/distrib.hpp"

namespace gradman {

struct Diagnostic {
  int line = 0;
  int column = 0;
  std::string message;
  std::vector<std::string> expected;
};

class ParseError : public std::runtime_error {
 public:
  explicit ParseError(Diagnostic d);
  const Diagnostic& diagnostic() const { return diag_; }

 private:
  Diagnostic diag_;
};

struct CoalgebraDecl {
  std::string name;
  CoalgebraBundle bundle;
};

struct MorphismDecl {
  std::string name, source, target;
  CoalgebraMorphism phi;
};

struct FieldDecl {
  std::string name;
  VectorField field;
};

struct DistDecl {
  std::string name;
  std::vector<std::string> generators;
  std::vector<std::vector<Rat>> points;
};

// Expression over the frame coordinates th<i>_<a> of a coalgebra; parsed when run.
struct ReduceDecl {
  std::string coalgebra;
  std::string expr;
  int line = 0, column = 0;
};

struct Document {
  std::string chart;  // optional chart name
  std::vector<std::string> base;
  std::vector<Generator> coords;  // declared order
  SigPtr sig;                     // chart signature, base-only when no coords
  std::vector<CoalgebraDecl> coalgebras;
  std::vector<MorphismDecl> morphisms;
  std::vector<FieldDecl> fields;
  std::vector<DistDecl> dists;
  std::vector<ReduceDecl> reductions;

  const CoalgebraDecl* find_coalgebra(const std::string& name) const;
  const FieldDecl* find_field(const std::string& name) const;
  bool operator==(const Document& o) const;
};

// max_degree < 0 keeps the signature default.
Document parse(std::string_view source, int max_degree = -1);
std::string pretty(const Document& doc);
// Parses an expression over a signature; diagnostics are relative to the expression text.
GradedFunction parse_expression(std::string_view text, const SigPtr& sig);

struct RunOptions {
  std::string format = "text";
  int max_degree = -1;
  std::vector<std::vector<Rat>> sample_points;  // overrides document points when set
  std::vector<std::string> fields;              // bracket / tangent / qsquare selection
  bool single_field = false;
};

enum ExitCode { Positive = 0, Negative = 1, UsageError = 2, UnsupportedCase = 3 };

struct Report {
  nlohmann::json json;
  int exit_code = 0;
};

const std::vector<std::string>& subcommands();
std::vector<std::vector<Rat>> parse_points(std::string_view text);
// Parses the source then dispatches; parse errors become exit code 2.
Report run(const std::string& subcommand, std::string_view source, const RunOptions& opts);
Report run(const std::string& subcommand, const Document& doc, const RunOptions& opts);
std::string render_text(const nlohmann::json& report);

}  // namespace gradman
