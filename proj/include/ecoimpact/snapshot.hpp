#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ecoimpact {

inline constexpr std::string_view kSnapshotFormat = "ecoimpact-snapshot/1";

enum class OwnerKind { Individual, Organization };

struct OwnerRef {
  std::string owner_id;
  OwnerKind kind = OwnerKind::Individual;
  std::set<std::string> member_ids;

  bool operator==(const OwnerRef&) const = default;
};

struct PackageRecord {
  std::string name;
  std::string raw_name;
  std::vector<std::string> requirements;
  std::optional<double> maintained_score;
  bool has_repository_link = false;
  bool has_contact_info = false;
  bool has_donation_link = false;
  std::optional<OwnerRef> repository_owner;
  std::optional<std::uint64_t> download_count;

  bool operator==(const PackageRecord&) const = default;
};

/// A registry record as read from disk, before name normalization and
/// filtering. `resolvable` is false when the registry could not return
/// detailed metadata for the package (the record carried an "error" field).
struct RawPackageRecord {
  std::string raw_name;
  std::vector<std::string> requirements;
  std::optional<double> maintained_score;
  bool has_repository_link = false;
  bool has_contact_info = false;
  bool has_donation_link = false;
  std::optional<OwnerRef> repository_owner;
  std::optional<std::uint64_t> download_count;
  bool resolvable = true;
};

struct RequirementSpec {
  std::string target_name;
  bool is_optional = false;
  bool has_environment_marker = false;
  std::string raw;
};

struct FilterStats {
  std::uint64_t raw_records = 0;
  std::uint64_t unresolvable_records = 0;
  std::uint64_t raw_specifiers = 0;
  std::uint64_t unparseable_specifiers = 0;
  std::uint64_t unresolved_edges = 0;
  std::uint64_t edges_of_unresolvable_records = 0;
  std::uint64_t optional_edges_excluded = 0;
  std::uint64_t marker_edges_excluded = 0;
  std::uint64_t self_edges = 0;
  std::uint64_t duplicate_edges = 0;

  bool operator==(const FilterStats&) const = default;
};

struct BuildOptions {
  bool include_optional = true;
  bool include_marker_gated = true;
};

using Edge = std::pair<std::string, std::string>;  // (dependent, dependency)

class EcosystemSnapshot {
 public:
  EcosystemSnapshot() = default;
  EcosystemSnapshot(std::map<std::string, PackageRecord> packages, std::vector<Edge> edges,
                    FilterStats filter_stats);

  const std::map<std::string, PackageRecord>& packages() const noexcept { return packages_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const FilterStats& filter_stats() const noexcept { return filter_stats_; }

  std::size_t package_count() const noexcept { return packages_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::size_t scored_count() const noexcept;

  bool contains(const std::string& name) const { return packages_.count(name) != 0; }
  const PackageRecord& at(const std::string& name) const;

 private:
  std::map<std::string, PackageRecord> packages_;
  std::vector<Edge> edges_;  // sorted, unique
  FilterStats filter_stats_;
};

std::string normalize_name(std::string_view raw);

RequirementSpec parse_requirement(std::string_view spec);

EcosystemSnapshot build_snapshot(const std::vector<RawPackageRecord>& records,
                                 const BuildOptions& options = {});

/// Reads newline-delimited JSON, one record per line. Blank lines are skipped.
std::vector<RawPackageRecord> read_records(std::istream& in);
std::vector<RawPackageRecord> read_records(const std::filesystem::path& path);

std::string serialize_snapshot(const EcosystemSnapshot& snapshot);
EcosystemSnapshot deserialize_snapshot(std::string_view text);

void write_snapshot(const EcosystemSnapshot& snapshot, const std::filesystem::path& path);
EcosystemSnapshot read_snapshot(const std::filesystem::path& path);

/// 16 hex digit FNV-1a digest of the serialized snapshot.
std::string snapshot_hash(const EcosystemSnapshot& snapshot);

}  // namespace ecoimpact
