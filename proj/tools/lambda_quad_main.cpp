// lambda-quad: batch front-end over the verification pipeline.
//
//   lambda-quad run <spec|catalog-name> [--tol --samples --seed --route --out]
//   lambda-quad verify <spec|catalog-name> --ic x0,u0,ux0,x_end ... [--c1 --c2]
//   lambda-quad catalog list
//   lambda-quad export <catalog-name> [--out]
//
// Exit codes: 0 all checks pass, 1 some check failed, 2 bad invocation or
// unloadable spec. Reports are deterministic given (spec, flags).

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lq/catalog.hpp"
#include "lq/pipeline.hpp"

namespace {

bool is_catalog_name(const std::string& arg) {
  for (const std::string& n : lq::catalog_names())
    if (arg == n) return true;
  return arg.rfind("pg27_general:", 0) == 0;
}

lq::Problem load_problem(const std::string& arg) {
  if (is_catalog_name(arg)) return lq::get_problem(arg);
  std::ifstream in(arg);
  if (!in) throw std::runtime_error("cannot open spec file: " + arg);
  std::ostringstream text;
  text << in.rdbuf();
  return lq::import_problem(text.str());
}

void emit(const std::string& report, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << report;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write report to: " + out_path);
  out << report;
}

lq::IcRequest parse_ic(const std::string& text) {
  std::istringstream in(text);
  double vals[4];
  char sep = ',';
  for (int k = 0; k < 4; ++k) {
    if (k > 0 && (!(in >> sep) || sep != ','))
      throw CLI::ValidationError("--ic expects x0,u0,ux0,x_end");
    if (!(in >> vals[k]))
      throw CLI::ValidationError("--ic expects x0,u0,ux0,x_end");
  }
  std::string rest;
  if (in >> rest) throw CLI::ValidationError("--ic expects x0,u0,ux0,x_end");
  return {vals[0], vals[1], vals[2], vals[3]};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"verification pipeline for integrating 2nd-order ODEs by "
               "quadratures from two non-equivalent lambda-symmetries"};
  app.require_subcommand(1);

  std::string spec_arg, out_path, csv_prefix, route_arg = "both";
  lq::RunOptions opt;
  std::vector<std::string> ic_args;
  std::optional<double> c1, c2;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--tol", opt.tol, "master relative tolerance")
        ->capture_default_str();
    cmd->add_option("--samples", opt.samples, "sample points per residual")
        ->capture_default_str();
    cmd->add_option("--seed", opt.seed, "sampling seed")
        ->capture_default_str();
    cmd->add_option("--route", route_arg,
                    "which routes to execute: central, lateral, both")
        ->check(CLI::IsMember({"central", "lateral", "both"}))
        ->capture_default_str();
    cmd->add_option("--out", out_path, "write the report here (else stdout)");
  };

  CLI::App* run = app.add_subcommand("run", "run the full procedure");
  run->add_option("spec", spec_arg, "catalog name or spec JSON path")
      ->required();
  add_common(run);

  CLI::App* verify =
      app.add_subcommand("verify", "integrate ICs and check drifts");
  verify->add_option("spec", spec_arg, "catalog name or spec JSON path")
      ->required();
  verify->add_option("--ic", ic_args, "initial condition x0,u0,ux0,x_end");
  verify->add_option("--c1", c1, "constant for the closed-form solution");
  verify->add_option("--c2", c2, "constant for the closed-form solution");
  verify->add_option("--csv", csv_prefix, "trajectory CSV path prefix");
  add_common(verify);

  CLI::App* catalog = app.add_subcommand("catalog", "catalog inspection");
  catalog->require_subcommand(1);
  catalog->add_subcommand("list", "list built-in problems");

  CLI::App* exp = app.add_subcommand("export", "export a catalog problem");
  exp->add_option("name", spec_arg, "catalog name")->required();
  exp->add_option("--out", out_path, "write the spec here (else stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (catalog->parsed()) {
      for (const std::string& n : lq::catalog_names()) std::cout << n << "\n";
      return 0;
    }
    if (exp->parsed()) {
      emit(lq::export_problem(lq::get_problem(spec_arg)), out_path);
      return 0;
    }

    opt.route = route_arg == "central"   ? lq::Route::Central
                : route_arg == "lateral" ? lq::Route::Lateral
                                         : lq::Route::Both;
    lq::Problem p = load_problem(spec_arg);

    lq::RunResult result;
    if (run->parsed()) {
      result = lq::run_pipeline(p, opt);
    } else {
      std::vector<lq::IcRequest> ics;
      for (const std::string& s : ic_args) ics.push_back(parse_ic(s));
      std::optional<std::pair<double, double>> c12;
      if (c1 && c2) c12 = std::make_pair(*c1, *c2);
      result = lq::verify_trajectories(p, ics, opt, c12, csv_prefix);
    }
    emit(result.report_json, out_path);
    return result.pass ? 0 : 1;
  } catch (const std::exception& ex) {
    std::cerr << "lambda-quad: " << ex.what() << "\n";
    return 2;
  }
}
