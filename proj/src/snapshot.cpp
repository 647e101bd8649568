#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "ecoimpact/error.hpp"
#include "ecoimpact/snapshot.hpp"
#include "json.hpp"

namespace ecoimpact {

using nlohmann::json;

namespace {

void validate_score(const std::optional<double>& score, const std::string& context) {
  if (score && !(*score >= 0.0 && *score <= 10.0)) {
    throw Error(ErrorKind::Domain, context + ": maintained_score outside [0,10]");
  }
}

OwnerRef owner_from_json(const json& j, const std::string& context) {
  OwnerRef owner;
  owner.owner_id = j.at("owner_id").get<std::string>();
  const auto kind = j.value("kind", std::string("individual"));
  if (kind == "individual") {
    owner.kind = OwnerKind::Individual;
  } else if (kind == "organization") {
    owner.kind = OwnerKind::Organization;
  } else {
    throw Error(ErrorKind::Domain, context + ": unknown owner kind '" + kind + "'");
  }
  if (auto it = j.find("member_ids"); it != j.end() && !it->is_null()) {
    for (const auto& m : *it) owner.member_ids.insert(m.get<std::string>());
  }
  if (owner.kind == OwnerKind::Individual) {
    if (owner.member_ids.empty()) owner.member_ids.insert(owner.owner_id);
    if (owner.member_ids.size() != 1) {
      throw Error(ErrorKind::Domain, context + ": individual owner must have exactly one member");
    }
  } else if (owner.member_ids.empty()) {
    throw Error(ErrorKind::Domain, context + ": organization owner without members");
  }
  return owner;
}

json owner_to_json(const OwnerRef& owner) {
  return json{{"owner_id", owner.owner_id},
              {"kind", owner.kind == OwnerKind::Individual ? "individual" : "organization"},
              {"member_ids", owner.member_ids}};
}

template <typename T>
std::optional<T> optional_field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

RawPackageRecord record_from_json(const json& j, const std::string& context) {
  if (!j.is_object()) throw Error(ErrorKind::Format, context + ": record is not an object");
  RawPackageRecord r;
  const auto name = optional_field<std::string>(j, "name");
  r.raw_name = optional_field<std::string>(j, "raw_name").value_or(name.value_or(""));
  if (!name && r.raw_name.empty()) throw Error(ErrorKind::Format, context + ": missing name");
  if (auto it = j.find("requirements"); it != j.end() && !it->is_null()) {
    r.requirements = it->get<std::vector<std::string>>();
  }
  r.maintained_score = optional_field<double>(j, "maintained_score");
  validate_score(r.maintained_score, context);
  r.has_repository_link = j.value("has_repository_link", false);
  r.has_contact_info = j.value("has_contact_info", false);
  r.has_donation_link = j.value("has_donation_link", false);
  if (auto it = j.find("repository_owner"); it != j.end() && !it->is_null()) {
    r.repository_owner = owner_from_json(*it, context);
    if (!r.has_repository_link) {
      throw Error(ErrorKind::Domain, context + ": repository_owner without repository link");
    }
  }
  r.download_count = optional_field<std::uint64_t>(j, "download_count");
  if (auto it = j.find("error"); it != j.end() && !it->is_null()) r.resolvable = false;
  return r;
}

json package_to_json(const PackageRecord& p) {
  json j;
  j["name"] = p.name;
  j["raw_name"] = p.raw_name;
  j["requirements"] = p.requirements;
  j["maintained_score"] = p.maintained_score ? json(*p.maintained_score) : json(nullptr);
  j["has_repository_link"] = p.has_repository_link;
  j["has_contact_info"] = p.has_contact_info;
  j["has_donation_link"] = p.has_donation_link;
  j["repository_owner"] = p.repository_owner ? owner_to_json(*p.repository_owner) : json(nullptr);
  j["download_count"] = p.download_count ? json(*p.download_count) : json(nullptr);
  return j;
}

PackageRecord package_from_json(const json& j) {
  const auto raw = record_from_json(j, "snapshot package");
  PackageRecord p;
  p.name = j.at("name").get<std::string>();
  if (p.name != normalize_name(p.name)) {
    throw Error(ErrorKind::Format, "snapshot package name not normalized: " + p.name);
  }
  p.raw_name = raw.raw_name;
  p.requirements = raw.requirements;
  p.maintained_score = raw.maintained_score;
  p.has_repository_link = raw.has_repository_link;
  p.has_contact_info = raw.has_contact_info;
  p.has_donation_link = raw.has_donation_link;
  p.repository_owner = raw.repository_owner;
  p.download_count = raw.download_count;
  return p;
}

json stats_to_json(const FilterStats& s) {
  return json{{"raw_records", s.raw_records},
              {"unresolvable_records", s.unresolvable_records},
              {"raw_specifiers", s.raw_specifiers},
              {"unparseable_specifiers", s.unparseable_specifiers},
              {"unresolved_edges", s.unresolved_edges},
              {"edges_of_unresolvable_records", s.edges_of_unresolvable_records},
              {"optional_edges_excluded", s.optional_edges_excluded},
              {"marker_edges_excluded", s.marker_edges_excluded},
              {"self_edges", s.self_edges},
              {"duplicate_edges", s.duplicate_edges}};
}

FilterStats stats_from_json(const json& j) {
  FilterStats s;
  s.raw_records = j.value("raw_records", std::uint64_t{0});
  s.unresolvable_records = j.value("unresolvable_records", std::uint64_t{0});
  s.raw_specifiers = j.value("raw_specifiers", std::uint64_t{0});
  s.unparseable_specifiers = j.value("unparseable_specifiers", std::uint64_t{0});
  s.unresolved_edges = j.value("unresolved_edges", std::uint64_t{0});
  s.edges_of_unresolvable_records = j.value("edges_of_unresolvable_records", std::uint64_t{0});
  s.optional_edges_excluded = j.value("optional_edges_excluded", std::uint64_t{0});
  s.marker_edges_excluded = j.value("marker_edges_excluded", std::uint64_t{0});
  s.self_edges = j.value("self_edges", std::uint64_t{0});
  s.duplicate_edges = j.value("duplicate_edges", std::uint64_t{0});
  return s;
}

}  // namespace

EcosystemSnapshot::EcosystemSnapshot(std::map<std::string, PackageRecord> packages,
                                     std::vector<Edge> edges, FilterStats filter_stats)
    : packages_(std::move(packages)), edges_(std::move(edges)), filter_stats_(filter_stats) {
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
    throw Error(ErrorKind::Format, "snapshot contains duplicate edges");
  }
  for (const auto& [from, to] : edges_) {
    if (from == to) throw Error(ErrorKind::Format, "snapshot contains self-edge on " + from);
    if (!contains(from) || !contains(to)) {
      throw Error(ErrorKind::Format, "edge endpoint missing from snapshot: " + from + " -> " + to);
    }
  }
}

std::size_t EcosystemSnapshot::scored_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(packages_.begin(), packages_.end(), [](const auto& kv) {
    return kv.second.maintained_score.has_value();
  }));
}

const PackageRecord& EcosystemSnapshot::at(const std::string& name) const {
  auto it = packages_.find(name);
  if (it == packages_.end()) throw Error(ErrorKind::NotFound, "unknown package: " + name);
  return it->second;
}

EcosystemSnapshot build_snapshot(const std::vector<RawPackageRecord>& records, const BuildOptions& options) {
  FilterStats stats;
  stats.raw_records = records.size();

  // Normalize names and reject collisions.
  std::map<std::string, std::vector<const RawPackageRecord*>> by_name;
  for (const auto& r : records) by_name[normalize_name(r.raw_name)].push_back(&r);
  std::string collisions;
  for (const auto& [name, group] : by_name) {
    if (group.size() < 2) continue;
    std::vector<std::string> raws;
    for (const auto* r : group) raws.push_back(r->raw_name);
    std::sort(raws.begin(), raws.end());
    collisions += "\n  " + name + ":";
    for (const auto& raw : raws) collisions += " '" + raw + "'";
  }
  if (!collisions.empty()) {
    throw Error(ErrorKind::Ambiguity, "package names collide after normalization:" + collisions);
  }

  std::map<std::string, PackageRecord> packages;
  for (const auto& [name, group] : by_name) {
    const RawPackageRecord& r = *group.front();
    if (!r.resolvable) {
      ++stats.unresolvable_records;
      continue;
    }
    validate_score(r.maintained_score, r.raw_name);
    PackageRecord p;
    p.name = name;
    p.raw_name = r.raw_name;
    p.requirements = r.requirements;
    p.maintained_score = r.maintained_score;
    p.has_repository_link = r.has_repository_link;
    p.has_contact_info = r.has_contact_info;
    p.has_donation_link = r.has_donation_link;
    p.repository_owner = r.repository_owner;
    p.download_count = r.download_count;
    packages.emplace(name, std::move(p));
  }

  // Each specifier is attributed to the first rule that drops it:
  // unparseable, unresolved target, unresolvable endpoint, optional,
  // marker-gated, self-edge, duplicate.
  std::vector<Edge> edges;
  for (const auto& [name, group] : by_name) {
    const RawPackageRecord& r = *group.front();
    const bool source_ok = r.resolvable;
    for (const auto& raw_spec : r.requirements) {
      ++stats.raw_specifiers;
      RequirementSpec spec;
      try {
        spec = parse_requirement(raw_spec);
      } catch (const Error&) {
        ++stats.unparseable_specifiers;
        continue;
      }
      auto target = by_name.find(spec.target_name);
      if (target == by_name.end()) {
        ++stats.unresolved_edges;
      } else if (!source_ok || !target->second.front()->resolvable) {
        ++stats.edges_of_unresolvable_records;
      } else if (spec.is_optional && !options.include_optional) {
        ++stats.optional_edges_excluded;
      } else if (spec.has_environment_marker && !spec.is_optional && !options.include_marker_gated) {
        ++stats.marker_edges_excluded;
      } else if (spec.target_name == name) {
        ++stats.self_edges;
      } else {
        edges.emplace_back(name, spec.target_name);
      }
    }
  }
  std::sort(edges.begin(), edges.end());
  const auto unique_end = std::unique(edges.begin(), edges.end());
  stats.duplicate_edges = static_cast<std::uint64_t>(edges.end() - unique_end);
  edges.erase(unique_end, edges.end());

  return EcosystemSnapshot(std::move(packages), std::move(edges), stats);
}

std::vector<RawPackageRecord> read_records(std::istream& in) {
  std::vector<RawPackageRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string context = "line " + std::to_string(line_no);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(context + ": malformed JSON", e.byte);
    }
    try {
      records.push_back(record_from_json(j, context));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::Format, context + ": " + e.what());
    }
  }
  return records;
}

std::vector<RawPackageRecord> read_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  return read_records(in);
}

std::string serialize_snapshot(const EcosystemSnapshot& snapshot) {
  json packages = json::array();
  for (const auto& [name, p] : snapshot.packages()) packages.push_back(package_to_json(p));
  json edges = json::array();
  for (const auto& [from, to] : snapshot.edges()) edges.push_back(json::array({from, to}));
  json doc{{"format", kSnapshotFormat},
           {"filter_stats", stats_to_json(snapshot.filter_stats())},
           {"packages", std::move(packages)},
           {"edges", std::move(edges)}};
  return doc.dump(1) + "\n";
}

EcosystemSnapshot deserialize_snapshot(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("malformed snapshot", e.byte);
  }
  try {
    if (doc.value("format", std::string()) != kSnapshotFormat) {
      throw Error(ErrorKind::Format, "unsupported snapshot format (expected " + std::string(kSnapshotFormat) + ")");
    }
    std::map<std::string, PackageRecord> packages;
    for (const auto& pj : doc.at("packages")) {
      auto p = package_from_json(pj);
      const auto name = p.name;
      if (!packages.emplace(name, std::move(p)).second) {
        throw Error(ErrorKind::Format, "duplicate package in snapshot: " + name);
      }
    }
    std::vector<Edge> edges;
    for (const auto& e : doc.at("edges")) edges.emplace_back(e.at(0).get<std::string>(), e.at(1).get<std::string>());
    return EcosystemSnapshot(std::move(packages), std::move(edges), stats_from_json(doc.value("filter_stats", json::object())));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Format, std::string("malformed snapshot: ") + e.what());
  }
}

void write_snapshot(const EcosystemSnapshot& snapshot, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << serialize_snapshot(snapshot);
  if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

EcosystemSnapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_snapshot(buf.str());
}

std::string snapshot_hash(const EcosystemSnapshot& snapshot) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize_snapshot(snapshot)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace ecoimpact
