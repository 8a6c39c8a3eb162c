#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ballean/instance.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CommonFlags {
  std::string file;
  std::string witnessFile;
  std::string format = "plain";
  std::uint64_t horizon = 4096;
  std::string eps;

  void attach(CLI::App* cmd) {
    cmd->add_option("--file", file, "instance file with declarations");
    cmd->add_option("--witnesses", witnessFile,
                    "file whose entourage definitions register as witnesses");
    cmd->add_option("--horizon", horizon, "enumeration horizon")
        ->default_val(4096);
    cmd->add_option("--format", format, "plain | lines")->default_val("plain");
    cmd->add_option("--eps", eps, "epsilon p/q for oscillation checks");
  }

  ballean::Runner makeRunner() const {
    ballean::RunOptions opt;
    opt.budget.horizon = horizon;
    opt.format = format;
    if (!eps.empty()) opt.epsGrid = {ballean::Rational::parse(eps)};
    ballean::Runner runner(std::move(opt));
    if (!file.empty()) runner.execDocument(slurp(file));
    if (!witnessFile.empty()) runner.loadWitnesses(slurp(witnessFile));
    return runner;
  }
};

int finish(ballean::Runner& runner) {
  std::cout << runner.renderedReport();
  return runner.exitCode();
}

// Quotes positional arguments into a directive form.
std::string joinArgs(const std::vector<std::string>& args) {
  std::string out;
  for (const auto& a : args) out += " " + a;
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coarse-space toolkit: balleans, bornologies, inference"};
  app.require_subcommand(1);

  CommonFlags runFlags, checkFlags, inferFlags, sepFlags, invFlags, enumFlags,
      cvFlags;

  auto* cmdRun = app.add_subcommand("run", "execute an instance file");
  std::string runFile;
  cmdRun->add_option("instance", runFile, "instance file")->required();
  runFlags.attach(cmdRun);

  auto* cmdCheck =
      app.add_subcommand("check", "run one predicate, e.g. "
                                  "check asymptotically-disjoint Y Z --space "
                                  "'(metric-nat)'");
  std::vector<std::string> checkArgs;
  std::string checkSpace, checkFrom, checkTo, checkExpect;
  cmdCheck->add_option("predicate-and-args", checkArgs)->required();
  cmdCheck->add_option("--space", checkSpace, "ballean expression or name");
  cmdCheck->add_option("--from", checkFrom, "source ballean (coarse-map)");
  cmdCheck->add_option("--to", checkTo, "target ballean (coarse-map)");
  cmdCheck->add_option("--expect", checkExpect, "true | false | unknown");
  checkFlags.attach(cmdCheck);

  auto* cmdInfer = app.add_subcommand("infer", "symbolic property report");
  std::vector<std::string> inferArgs;
  cmdInfer->add_option("ballean", inferArgs, "ballean expression or name")
      ->required();
  inferFlags.attach(cmdInfer);

  auto* cmdSep = app.add_subcommand("separate", "synthesize a separator");
  std::vector<std::string> sepArgs;
  std::string sepSpace;
  cmdSep->add_option("sets", sepArgs, "Y Z")->required();
  cmdSep->add_option("--space", sepSpace)->required();
  sepFlags.attach(cmdSep);

  auto* cmdInv = app.add_subcommand("invariants", "add/cov/cof of a bornology");
  std::vector<std::string> invArgs;
  cmdInv->add_option("bornology", invArgs)->required();
  invFlags.attach(cmdInv);

  auto* cmdEnum =
      app.add_subcommand("enumerate-finite", "count coarse structures");
  std::uint64_t enumN = 2;
  cmdEnum->add_option("points", enumN)->required();
  enumFlags.attach(cmdEnum);

  auto* cmdCv = app.add_subcommand(
      "cross-validate", "rule-derived verdicts vs executable oracles");
  cvFlags.attach(cmdCv);

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmdRun->parsed()) {
      auto runner = runFlags.makeRunner();
      runner.execDocument(slurp(runFile));
      return finish(runner);
    }
    if (cmdCheck->parsed()) {
      auto runner = checkFlags.makeRunner();
      std::string form = "(check" + joinArgs(checkArgs);
      if (!checkSpace.empty()) form += " :space " + checkSpace;
      if (!checkFrom.empty()) form += " :from " + checkFrom;
      if (!checkTo.empty()) form += " :to " + checkTo;
      if (!checkExpect.empty()) form += " :expect " + checkExpect;
      form += ")";
      runner.execDocument(form);
      return finish(runner);
    }
    if (cmdInfer->parsed()) {
      auto runner = inferFlags.makeRunner();
      runner.execDocument("(infer" + joinArgs(inferArgs) + ")");
      return finish(runner);
    }
    if (cmdSep->parsed()) {
      auto runner = sepFlags.makeRunner();
      runner.execDocument("(separate" + joinArgs(sepArgs) + " :space " +
                          sepSpace + ")");
      return finish(runner);
    }
    if (cmdInv->parsed()) {
      auto runner = invFlags.makeRunner();
      runner.execDocument("(invariants" + joinArgs(invArgs) + ")");
      return finish(runner);
    }
    if (cmdEnum->parsed()) {
      auto runner = enumFlags.makeRunner();
      runner.execDocument("(enumerate-finite " + std::to_string(enumN) + ")");
      return finish(runner);
    }
    if (cmdCv->parsed()) {
      auto runner = cvFlags.makeRunner();
      runner.execDocument("(cross-validate)");
      return finish(runner);
    }
  } catch (const ballean::ParseError& ex) {
    std::cerr << "parse error: " << ex.what() << "\n";
    return 3;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 3;
  }
  return 3;
}
