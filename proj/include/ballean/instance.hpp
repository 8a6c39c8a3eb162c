#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "ballean/analysis.hpp"
#include "ballean/finiterel.hpp"
#include "ballean/sexpr.hpp"

namespace ballean {

/// A named map for coarse-map checks.
struct MapValue {
  std::string name;
  std::function<Element(const Element&)> fn;
};

using Value = std::variant<SetExpr, BornologyPresentation, BalleanExpr,
                           Entourage, MapValue, SlowFunction>;

struct RunOptions {
  Budget budget;
  std::string format = "plain";  // plain | lines
  std::vector<Rational> epsGrid = {Rational(1, 2), Rational(1, 4),
                                   Rational(1, 8)};
};

/// Executes instance documents: declarations bind names, directives produce
/// report lines and verdicts. Exit codes: 0 all True/expected, 1 some False,
/// 2 Unknown present, 3 error.
class Runner {
 public:
  explicit Runner(RunOptions opt) : opt_(std::move(opt)) {}

  /// Loads declarations and executes directives from a document.
  void execDocument(const std::string& text);
  /// Executes a single form (declaration or directive).
  void execForm(const Sexpr& form);
  /// Registers every entourage declared in the text as a witness.
  void loadWitnesses(const std::string& text);

  Value eval(const Sexpr& expr);

  int exitCode() const;
  const std::vector<std::string>& lines() const { return lines_; }
  const std::vector<std::string>& records() const { return records_; }
  std::size_t declaredBalleanCount() const { return declaredBalleans_.size(); }
  std::string renderedReport() const;

 private:
  void recordVerdict(const std::string& name, const std::string& property,
                     const Verdict& v, const Sexpr* expectForm);
  void directiveCheck(const Sexpr& form);
  void directiveInfer(const Sexpr& form);
  void directiveSeparate(const Sexpr& form);
  void directiveInvariants(const Sexpr& form);
  void directiveEnumerate(const Sexpr& form);
  void directiveCrossValidate(const Sexpr& form);

  RunOptions opt_;
  std::map<std::string, Value> env_;
  std::vector<std::pair<std::string, BalleanExpr>> declaredBalleans_;
  std::vector<SetExpr> catalog_;
  std::vector<Entourage> witnesses_;
  std::vector<std::string> lines_;
  std::vector<std::string> records_;
  bool sawFalse_ = false;
  bool sawUnknown_ = false;
  bool sawError_ = false;
};

}  // namespace ballean
