#include "ecoimpact/service.hpp"

#include <charconv>

#include "ecoimpact/error.hpp"
#include "ecoimpact/serialize.hpp"
#include "httplib.h"

namespace ecoimpact {

using nlohmann::json;

namespace {

ServiceResponse error_response(int status, const std::string& message) {
  return {status, json{{"error", message}, {"status", status}}};
}

ServiceResponse unavailable() { return error_response(503, "snapshot is still loading"); }

int status_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Unreachable:
      return 409;
    case ErrorKind::Parse:
    case ErrorKind::Format:
      return 400;
    default:
      return 422;
  }
}

struct BadRequest : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> string_list(const json& body, const char* key) {
  std::vector<std::string> out;
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) return out;
  if (!it->is_array()) throw BadRequest(std::string("'") + key + "' must be an array of names");
  for (const auto& v : *it) {
    if (!v.is_string()) throw BadRequest(std::string("'") + key + "' must be an array of names");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::set<std::string> resolve_names(const std::vector<std::string>& names, const EcosystemSnapshot& snapshot,
                                    const char* what) {
  std::set<std::string> out;
  for (const auto& raw : names) {
    const auto name = normalize_name(raw);
    if (!snapshot.contains(name)) throw Error(ErrorKind::NotFound, std::string("unknown ") + what + " package: " + raw);
    out.insert(name);
  }
  return out;
}

json parse_body(const std::string& body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    throw BadRequest(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw BadRequest("request body must be a JSON object");
  return doc;
}

template <typename Body>
ServiceResponse guarded(Body&& body) {
  try {
    return body();
  } catch (const BadRequest& e) {
    return error_response(400, e.what());
  } catch (const Error& e) {
    return error_response(status_for(e), e.what());
  } catch (const json::exception& e) {
    return error_response(400, e.what());
  } catch (const std::exception& e) {
    return error_response(500, e.what());
  }
}

std::optional<std::size_t> query_size(const httplib::Request& req, const char* key) {
  if (!req.has_param(key)) return std::nullopt;
  const auto value = req.get_param_value(key);
  std::size_t out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) throw BadRequest(std::string("invalid ") + key);
  return out;
}

void reply(httplib::Response& res, const ServiceResponse& r) {
  res.status = r.status;
  res.set_content(r.body.dump(), "application/json");
}

}  // namespace

Service::Service(ServiceLimits limits) : limits_(limits) {}

void Service::load(std::shared_ptr<const Analysis> analysis) {
  std::lock_guard lock(mutex_);
  analysis_ = std::move(analysis);
}

bool Service::ready() const { return current() != nullptr; }

std::shared_ptr<const Analysis> Service::current() const {
  std::lock_guard lock(mutex_);
  return analysis_;
}

ServiceResponse Service::summary() const {
  const auto analysis = current();
  if (!analysis) return unavailable();
  return guarded([&] {
    return ServiceResponse{200, ecoimpact::summary(analysis->snapshot(), analysis->reach(), analysis->snapshot_hash())};
  });
}

ServiceResponse Service::selection(const std::string& body, std::size_t offset,
                                   std::optional<std::size_t> limit) const {
  const auto analysis = current();
  if (!analysis) return unavailable();
  return guarded([&] {
    const json request = parse_body(body);
    const auto& snapshot = analysis->snapshot();

    const bool has_preset = request.contains("preset") && !request["preset"].is_null();
    const bool has_deltas = request.contains("deltas") && !request["deltas"].is_null();
    if (has_preset == has_deltas) throw BadRequest("exactly one of 'preset' or 'deltas' is required");

    double tau = analysis->config().tau;
    if (auto it = request.find("tau"); it != request.end() && !it->is_null()) {
      if (!it->is_number()) throw BadRequest("'tau' must be a number");
      tau = it->get<double>();
    }
    if (!(tau > 0.0 && tau <= 1.0)) throw Error(ErrorKind::Domain, "tau must lie in (0,1]");

    SelectionOptions options;
    options.pinned = resolve_names(string_list(request, "pinned"), snapshot, "pinned");
    options.excluded = resolve_names(string_list(request, "excluded"), snapshot, "excluded");
    for (const auto& name : options.pinned) {
      if (options.excluded.count(name)) throw Error(ErrorKind::Domain, "package both pinned and excluded: " + name);
    }

    ImpactReport custom;
    const ImpactReport* report = nullptr;
    if (has_preset) {
      if (!request["preset"].is_string()) throw BadRequest("'preset' must be a string");
      const auto preset = request["preset"].get<std::string>();
      if (preset == "improvement") {
        report = &analysis->improvement();
      } else if (preset == "regression") {
        report = &analysis->regression();
      } else {
        throw BadRequest("unknown preset '" + preset + "'");
      }
    } else {
      if (!request["deltas"].is_object()) throw BadRequest("'deltas' must be an object of package -> delta");
      Scenario scenario;
      scenario.label = request.value("label", std::string("custom"));
      for (const auto& [raw, value] : request["deltas"].items()) {
        if (!value.is_number()) throw BadRequest("delta for '" + raw + "' must be a number");
        const auto name = normalize_name(raw);
        if (!snapshot.contains(name)) throw Error(ErrorKind::NotFound, "unknown package in deltas: " + raw);
        scenario.deltas[name] = value.get<double>();
      }
      custom = normalize(impact(snapshot, analysis->reach(), scenario));
      report = &custom;
    }

    const auto result = select_to_threshold(*report, tau, options);
    const auto selected = result.selected();
    const SupportSet set{"selection", {selected.begin(), selected.end()}, SetSource::ImpactSelection, {}};
    SupportSet sorted = set;
    std::sort(sorted.members.begin(), sorted.members.end());
    const auto evaluation = evaluate_support_set(sorted, analysis->context());

    return ServiceResponse{200, json{{"snapshot_hash", analysis->snapshot_hash()},
                                     {"selection", result},
                                     {"ranking", ranking_page(result, offset, limit.value_or(limits_.default_page_size))},
                                     {"evaluation", evaluation}}};
  });
}

ServiceResponse Service::package(const std::string& raw_name) const {
  const auto analysis = current();
  if (!analysis) return unavailable();
  return guarded([&] {
    std::string name;
    try {
      name = normalize_name(raw_name);
    } catch (const Error&) {
      return error_response(404, "unknown package: " + raw_name);
    }
    if (!analysis->snapshot().contains(name)) return error_response(404, "unknown package: " + raw_name);
    json body = package_detail(*analysis, name);
    body["snapshot_hash"] = analysis->snapshot_hash();
    return ServiceResponse{200, std::move(body)};
  });
}

ServiceResponse Service::compare(const std::string& body) const {
  const auto analysis = current();
  if (!analysis) return unavailable();
  return guarded([&] {
    const json request = parse_body(body);
    auto it = request.find("sets");
    if (it == request.end() || !it->is_array()) throw BadRequest("'sets' must be an array");
    if (it->size() > limits_.max_sets) return error_response(413, "too many sets");

    std::vector<SupportSet> sets;
    for (const auto& entry : *it) {
      if (!entry.is_object()) throw BadRequest("each set must be an object");
      const auto label = entry.value("label", std::string("set-") + std::to_string(sets.size() + 1));
      const auto names = string_list(entry, "packages");
      if (names.size() > limits_.max_names_per_set) return error_response(413, "too many names in set '" + label + "'");
      auto set = make_support_set(label, names, analysis->snapshot(), SetSource::ExternalList);
      if (set.members.empty()) return error_response(422, "set '" + label + "' has no resolvable packages");
      sets.push_back(std::move(set));
    }

    std::vector<StrategyEvaluation> rows{analysis->impact_row()};
    json unresolved = json::object();
    for (const auto& set : sets) {
      rows.push_back(evaluate_support_set(set, analysis->context()));
      unresolved[set.label] = set.unresolved;
    }
    return ServiceResponse{200, json{{"snapshot_hash", analysis->snapshot_hash()},
                                     {"rows", rows},
                                     {"unresolved", std::move(unresolved)}}};
  });
}

void Service::mount(httplib::Server& server) const {
  server.set_payload_max_length(limits_.max_request_bytes);
  server.Get("/v1/summary", [this](const httplib::Request&, httplib::Response& res) { reply(res, summary()); });
  server.Post("/v1/selection", [this](const httplib::Request& req, httplib::Response& res) {
    std::optional<std::size_t> offset, limit;
    try {
      offset = query_size(req, "offset");
      limit = query_size(req, "limit");
    } catch (const BadRequest& e) {
      reply(res, error_response(400, e.what()));
      return;
    }
    reply(res, selection(req.body, offset.value_or(0), limit));
  });
  server.Get(R"(/v1/package/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    reply(res, package(req.matches[1].str()));
  });
  server.Post("/v1/compare", [this](const httplib::Request& req, httplib::Response& res) {
    reply(res, compare(req.body));
  });
}

}  // namespace ecoimpact
