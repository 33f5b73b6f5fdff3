#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "stablered/errors.hpp"

#include "stablered/pipeline.hpp"

using namespace stablered;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--input", "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path);
  out << data;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "stablered: stable-reduction data of p-cyclic covers Z^p = f(X0) with "
      "equidistant branch locus (monodromy polynomial, blowup centers and radii, "
      "Artin-Schreier reductions, dual tree, monodromy bound)"};

  std::string input_path, out_path, dot_path, precision_cap;
  long max_extension = 1024;
  bool verbose = false;

  app.add_option("--input", input_path, "job document (JSON)")->required();
  app.add_option("--out", out_path, "write the JSON report here (default: stdout)");
  app.add_option("--dot", dot_path, "write the reduction tree as a DOT graph");
  app.add_option("--precision-cap", precision_cap,
                 "working pi-adic precision cap, a rational like 512 or 1024/1");
  app.add_option("--max-extension", max_extension, "cap on the degree e*k of host fields");
  app.add_flag("--verbose", verbose, "print stage timings to stderr");

  CLI11_PARSE(app, argc, argv);

  JobSpec job;
  try {
    job = jobspec_from_json(read_file(input_path));
  } catch (const error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  }
  if (!precision_cap.empty()) job.precision_cap = parse_rational(precision_cap);
  job.max_extension = max_extension;
  job.verbose = verbose;
  if (const char* env = std::getenv("STABLERED_THREADS")) {
    int t = std::atoi(env);
    if (t >= 1) job.threads = t;
  }

  Report rep = run(job);

  std::string out = report_to_json(rep);
  if (out_path.empty())
    std::cout << out << std::endl;
  else
    write_file(out_path, out);

  if (!dot_path.empty() && rep.exit_code == 0) write_file(dot_path, tree_to_dot(rep.tree));

  if (verbose) {
    for (const auto& [name, ms] : rep.timings_ms)
      std::cerr << name << ": " << ms << " ms\n";
    if (rep.exit_code != 0)
      std::cerr << "failed in stage " << rep.error_stage << ": " << rep.error_message << "\n";
  }
  return rep.exit_code;
}
