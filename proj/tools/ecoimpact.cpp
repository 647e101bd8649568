// ecoimpact command line: ingest, analyze, compare, serve.

#include <cstdlib>
#include <iostream>
#include <memory>
#include <thread>

#include "CLI11.hpp"
#include "ecoimpact/commands.hpp"
#include "ecoimpact/service.hpp"
#include "httplib.h"

namespace {

using namespace ecoimpact;

void add_model_flags(CLI::App& cmd, AnalysisConfig& config, BuildOptions& build) {
  cmd.add_option("--tau", config.tau, "Cumulative impact threshold in (0,1]")->capture_default_str();
  cmd.add_option("--damping", config.pagerank.damping, "PageRank damping factor")->capture_default_str();
  cmd.add_option("--trials", config.n_trials, "Monte Carlo baseline trials")->capture_default_str();
  cmd.add_option("--seed", config.seed, "Monte Carlo seed")->capture_default_str();
  cmd.add_option("--threads", config.threads, "Worker threads (0 = all cores)");
  cmd.add_flag("--include-optional,!--no-optional", build.include_optional,
               "Keep extra-gated dependencies when the input is raw NDJSON");
}

std::string env_or(const char* name, std::string fallback) {
  const char* value = std::getenv(name);
  return value && *value ? value : fallback;
}

int run_serve(const std::string& snapshot_path, const std::string& listen, std::size_t max_request_bytes,
              const AnalysisConfig& config, const BuildOptions& build) {
  const auto colon = listen.rfind(':');
  if (colon == std::string::npos) {
    std::cerr << "error: --listen expects host:port\n";
    return kExitInputError;
  }
  const std::string host = listen.substr(0, colon);
  const int port = std::atoi(listen.c_str() + colon + 1);

  ServiceLimits limits;
  limits.max_request_bytes = max_request_bytes;
  Service service(limits);
  httplib::Server server;
  service.mount(server);

  // Requests answer 503 until the snapshot is analyzed.
  std::jthread loader([&] {
    try {
      auto analysis = std::make_shared<const Analysis>(load_snapshot_input(snapshot_path, build), config);
      service.load(std::move(analysis));
      std::cerr << "snapshot loaded: " << snapshot_path << '\n';
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      server.stop();
    }
  });

  std::cerr << "listening on " << host << ':' << port << '\n';
  if (!server.listen(host, port)) {
    std::cerr << "error: cannot listen on " << listen << '\n';
    return kExitInputError;
  }
  return service.ready() ? kExitOk : kExitInputError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dependency-propagated ecosystem impact analysis"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Build a snapshot from newline-delimited registry records");
  ingest_cmd->add_option("records", ingest.raw_path, "NDJSON record file")->required()->check(CLI::ExistingFile);
  ingest_cmd->add_option("--out,-o", ingest.out_path, "Snapshot output path")->required();
  ingest_cmd->add_flag("--include-optional,!--no-optional", ingest.build.include_optional,
                       "Keep extra-gated dependencies");
  ingest_cmd->add_flag("--include-marker-gated,!--no-marker-gated", ingest.build.include_marker_gated,
                       "Keep dependencies gated by environment markers");

  AnalyzeArgs analyze;
  analyze.out_dir = ".";
  auto* analyze_cmd = app.add_subcommand("analyze", "Reach, impact, threshold selection and random baselines");
  analyze_cmd->add_option("snapshot", analyze.snapshot_path, "Snapshot or NDJSON file")->required();
  analyze_cmd->add_option("--out,-o", analyze.out_dir, "Output directory");
  add_model_flags(*analyze_cmd, analyze.config, analyze.build);

  CompareArgs compare;
  compare.out_dir = ".";
  auto* compare_cmd = app.add_subcommand("compare", "Evaluate support sets against the impact-driven selection");
  compare_cmd->add_option("snapshot", compare.snapshot_path, "Snapshot or NDJSON file")->required();
  compare_cmd->add_option("sets", compare.set_paths, "Package-name list files, one name per line");
  compare_cmd->add_option("--out,-o", compare.out_dir, "Output directory");
  add_model_flags(*compare_cmd, compare.config, compare.build);

  std::string serve_snapshot = env_or("ECOIMPACT_SNAPSHOT", "");
  std::string serve_listen = env_or("ECOIMPACT_LISTEN", "127.0.0.1:8080");
  std::size_t serve_max_bytes = std::stoull(env_or("ECOIMPACT_MAX_REQUEST_BYTES", "8388608"));
  AnalysisConfig serve_config;
  BuildOptions serve_build;
  auto* serve_cmd = app.add_subcommand("serve", "Serve the /v1 JSON API for one snapshot");
  serve_cmd->add_option("--snapshot", serve_snapshot, "Snapshot or NDJSON file (ECOIMPACT_SNAPSHOT)");
  serve_cmd->add_option("--listen", serve_listen, "host:port (ECOIMPACT_LISTEN)")->capture_default_str();
  serve_cmd->add_option("--max-request-bytes", serve_max_bytes, "Request body limit (ECOIMPACT_MAX_REQUEST_BYTES)")
      ->capture_default_str();
  add_model_flags(*serve_cmd, serve_config, serve_build);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  if (*ingest_cmd) return cmd_ingest(ingest, std::cout, std::cerr);
  if (*analyze_cmd) return cmd_analyze(analyze, std::cout, std::cerr);
  if (*compare_cmd) return cmd_compare(compare, std::cout, std::cerr);
  if (*serve_cmd) {
    if (serve_snapshot.empty()) {
      std::cerr << "error: --snapshot or ECOIMPACT_SNAPSHOT is required\n";
      return kExitInputError;
    }
    return run_serve(serve_snapshot, serve_listen, serve_max_bytes, serve_config, serve_build);
  }
  return kExitInternal;
}
