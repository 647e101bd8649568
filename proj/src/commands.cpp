#include <fstream>
#include <ostream>
#include <sstream>

#include "ecoimpact/commands.hpp"
#include "ecoimpact/error.hpp"
#include "ecoimpact/serialize.hpp"

namespace ecoimpact {

using nlohmann::json;

namespace {

void validate(const AnalysisConfig& c) {
  if (!(c.tau > 0.0 && c.tau <= 1.0)) throw Error(ErrorKind::Domain, "--tau must lie in (0,1]");
  if (!(c.pagerank.damping > 0.0 && c.pagerank.damping < 1.0)) {
    throw Error(ErrorKind::Domain, "--damping must lie in (0,1)");
  }
  if (c.n_trials < 1) throw Error(ErrorKind::Domain, "--trials must be at least 1");
}

template <typename Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  writer(out);
  if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

void write_json(const std::filesystem::path& path, const json& doc) {
  write_file(path, [&](std::ostream& out) { out << doc.dump(2) << '\n'; });
}

void prepare_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
}

void print_filter_stats(const FilterStats& s, std::ostream& out) {
  out << "  raw records:                  " << s.raw_records << '\n'
      << "  unresolvable records dropped: " << s.unresolvable_records << '\n'
      << "  requirement specifiers:       " << s.raw_specifiers << '\n'
      << "  unparseable specifiers:       " << s.unparseable_specifiers << '\n'
      << "  unresolved dependency refs:   " << s.unresolved_edges << '\n'
      << "  edges of unresolvable records:" << ' ' << s.edges_of_unresolvable_records << '\n'
      << "  optional edges excluded:      " << s.optional_edges_excluded << '\n'
      << "  marker-gated edges excluded:  " << s.marker_edges_excluded << '\n'
      << "  self edges:                   " << s.self_edges << '\n'
      << "  duplicate edges:              " << s.duplicate_edges << '\n';
}

template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

}  // namespace

int exit_code_for(const std::exception& e) {
  const auto* error = dynamic_cast<const Error*>(&e);
  if (!error) return kExitInternal;
  switch (error->kind()) {
    case ErrorKind::DegenerateScenario:
    case ErrorKind::Unreachable:
      return kExitDegenerate;
    case ErrorKind::InvalidName:
    case ErrorKind::Parse:
    case ErrorKind::Ambiguity:
    case ErrorKind::NotFound:
    case ErrorKind::Domain:
    case ErrorKind::Io:
    case ErrorKind::Format:
      return kExitInputError;
  }
  return kExitInternal;
}

EcosystemSnapshot load_snapshot_input(const std::filesystem::path& path, const BuildOptions& build) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (json::accept(text)) {
    const auto doc = json::parse(text);
    if (doc.is_object() && doc.contains("format")) return deserialize_snapshot(text);
  }
  std::istringstream lines(text);
  return build_snapshot(read_records(lines), build);
}

int cmd_ingest(const IngestArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto snapshot = build_snapshot(read_records(args.raw_path), args.build);
    write_snapshot(snapshot, args.out_path);
    out << "snapshot " << args.out_path.string() << " (" << kSnapshotFormat << ", hash " << snapshot_hash(snapshot)
        << ")\n"
        << "  packages:                     " << snapshot.package_count() << '\n'
        << "  edges:                        " << snapshot.edge_count() << '\n'
        << "  scored packages:              " << snapshot.scored_count() << '\n';
    print_filter_stats(snapshot.filter_stats(), out);
    return kExitOk;
  });
}

int cmd_analyze(const AnalyzeArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    validate(args.config);
    const Analysis analysis(load_snapshot_input(args.snapshot_path, args.build), args.config);
    const auto& dir = args.out_dir;
    prepare_dir(dir);

    write_file(dir / "reach.csv", [&](std::ostream& o) { write_reach_csv(analysis.reach(), o); });
    write_file(dir / "pagerank.csv", [&](std::ostream& o) { write_pagerank_csv(analysis.pagerank(), o); });
    write_file(dir / "impact_improvement.csv", [&](std::ostream& o) { write_impact_csv(analysis.improvement(), o); });
    write_file(dir / "impact_regression.csv", [&](std::ostream& o) { write_impact_csv(analysis.regression(), o); });
    write_file(dir / "selection_improvement.csv",
               [&](std::ostream& o) { write_selection_csv(analysis.improvement_selection(), o); });
    write_file(dir / "selection_regression.csv",
               [&](std::ostream& o) { write_selection_csv(analysis.regression_selection(), o); });
    write_file(dir / "selection_union.txt", [&](std::ostream& o) {
      for (const auto& name : analysis.union_set()) o << name << '\n';
    });
    write_json(dir / "selection_improvement.json",
               json{{"provenance", provenance(analysis)}, {"selection", analysis.improvement_selection()}});
    write_json(dir / "selection_regression.json",
               json{{"provenance", provenance(analysis)}, {"selection", analysis.regression_selection()}});

    const auto baselines = analysis.baselines();
    write_json(dir / "baseline.json", json{{"provenance", provenance(analysis)}, {"baselines", baselines}});
    write_json(dir / "manifest.json",
               json{{"provenance", provenance(analysis)},
                    {"summary", summary(analysis.snapshot(), analysis.reach(), analysis.snapshot_hash())}});

    out << "packages " << analysis.snapshot().package_count() << ", edges " << analysis.snapshot().edge_count()
        << ", scored " << analysis.snapshot().scored_count() << '\n';
    for (const auto* s : {&analysis.improvement_selection(), &analysis.regression_selection()}) {
      out << s->label << ": " << s->selected_count << " packages reach " << format_real(s->achieved_share)
          << " (tau " << format_real(s->tau) << ")\n";
    }
    out << "union: " << analysis.union_set().size() << " packages\n";
    for (const auto& b : baselines) {
      out << "baseline " << b.label << ": z = " << format_real(b.z_score) << ", p " << b.p_display() << '\n';
    }
    return kExitOk;
  });
}

int cmd_compare(const CompareArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    validate(args.config);
    const Analysis analysis(load_snapshot_input(args.snapshot_path, args.build), args.config);
    std::vector<SupportSet> sets;
    for (const auto& path : args.set_paths) sets.push_back(load_external_set(path, analysis.snapshot()));

    std::vector<StrategyEvaluation> rows{analysis.impact_row()};
    for (const auto& set : sets) rows.push_back(evaluate_support_set(set, analysis.context()));
    const auto comparison = analysis.compare_with_pagerank();

    const auto& dir = args.out_dir;
    prepare_dir(dir);
    write_file(dir / "strategies.csv", [&](std::ostream& o) { write_strategies_csv(rows, o); });
    json unresolved = json::object();
    for (const auto& set : sets) unresolved[set.label] = set.unresolved;
    write_json(dir / "strategies.json",
               json{{"provenance", provenance(analysis)}, {"rows", rows}, {"unresolved", unresolved}});
    write_json(dir / "comparison.json", json{{"provenance", provenance(analysis)}, {"comparison", comparison}});
    write_file(dir / "comparison.txt", [&](std::ostream& o) { write_comparison_table(comparison, o); });

    write_strategies_csv(rows, out);
    write_comparison_table(comparison, out);
    return kExitOk;
  });
}

}  // namespace ecoimpact
