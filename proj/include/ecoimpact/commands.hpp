#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "ecoimpact/analysis.hpp"

namespace ecoimpact {

/// Process exit codes of the batch commands.
enum ExitCode : int {
  kExitOk = 0,
  kExitInputError = 2,
  kExitDegenerate = 3,
  kExitInternal = 4,
};

struct IngestArgs {
  std::filesystem::path raw_path;
  std::filesystem::path out_path;
  BuildOptions build;
};

struct AnalyzeArgs {
  std::filesystem::path snapshot_path;
  std::filesystem::path out_dir;
  AnalysisConfig config;
  BuildOptions build;  // used when the input is raw NDJSON
};

struct CompareArgs {
  std::filesystem::path snapshot_path;
  std::vector<std::filesystem::path> set_paths;
  std::filesystem::path out_dir;
  AnalysisConfig config;
  BuildOptions build;
};

/// Loads either a serialized snapshot or raw NDJSON records.
EcosystemSnapshot load_snapshot_input(const std::filesystem::path& path, const BuildOptions& build);

int cmd_ingest(const IngestArgs& args, std::ostream& out, std::ostream& err);
int cmd_analyze(const AnalyzeArgs& args, std::ostream& out, std::ostream& err);
int cmd_compare(const CompareArgs& args, std::ostream& out, std::ostream& err);

/// Maps a library exception to the command exit code.
int exit_code_for(const std::exception& e);

}  // namespace ecoimpact
