// ppt <kind> --spec FILE [--out FILE] [--seed N] [--threads K] [--no-timing]
//
// Exit status: 0 when the experiment ran and every check passed, 1 when it ran
// but a check failed, 2 on invalid input or any other error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "ppt/experiment.hpp"
#include "ppt/parallel.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ppt::Error(ppt::ErrorKind::validation, "cannot open spec file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ppt::Error(ppt::ErrorKind::validation, "cannot write '" + path + "'");
  out << text;
  if (!out) throw ppt::Error(ppt::ErrorKind::validation, "write to '" + path + "' failed");
}

unsigned threads_from_env() {
  const char* env = std::getenv("PPT_THREADS");
  if (!env || !*env) return 0;
  char* end = nullptr;
  const unsigned long v = std::strtoul(env, &end, 10);
  if (*end != '\0' || v == 0) {
    throw ppt::Error(ppt::ErrorKind::validation, std::string("PPT_THREADS must be a positive integer, got '") + env + "'");
  }
  return static_cast<unsigned>(v);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Point-process transport bounds: run a declarative experiment and emit a JSON report"};
  app.set_version_flag("--version", std::string(ppt::kLibraryVersion));

  std::string kind;
  std::string spec_path;
  std::string out_path;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  bool no_timing = false;

  app.add_option("kind", kind, "distance | sample | bound | estimate | tail | isoperimetry | verify")->required();
  app.add_option("--spec", spec_path, "experiment spec (JSON)")->required();
  auto* out_opt = app.add_option("--out", out_path, "report path; overrides the spec's output_path");
  auto* seed_opt = app.add_option("--seed", seed, "overrides seed.seed in the spec");
  app.add_option("--threads", threads, "worker threads (default: PPT_THREADS, then hardware)")
      ->check(CLI::PositiveNumber);
  app.add_flag("--no-timing", no_timing, "report wall_time_ms as 0 so reruns are byte-identical");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (threads == 0) threads = threads_from_env();
    if (threads != 0) ppt::set_thread_count(threads);

    ppt::ExperimentSpec spec = ppt::parse_experiment_spec_text(read_file(spec_path));
    if (ppt::experiment_kind_from_string(kind) != spec.kind) {
      throw ppt::Error(ppt::ErrorKind::validation, "kind: command line says '" + kind + "' but the spec says '" +
                                                        std::string(ppt::to_string(spec.kind)) + "'");
    }
    if (*seed_opt) spec.seed.seed = seed;
    if (*out_opt) spec.output_path = out_path;

    const ppt::Report report = ppt::run_experiment(spec, ppt::RunOptions{!no_timing});
    const std::string text = ppt::serialize(report);
    if (spec.output_path.empty()) {
      std::cout << text;
    } else {
      write_file(spec.output_path, text);
    }
    if (!report.csv_path.empty()) write_file(report.csv_path, report.csv);
    if (!report.passed) {
      std::cerr << "ppt: one or more checks failed\n";
      return 1;
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "ppt: " << e.what() << "\n";
    return 2;
  }
}
