#pragma once

#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "ecoimpact/analysis.hpp"
#include "json.hpp"

namespace httplib {
class Server;
}

namespace ecoimpact {

struct ServiceLimits {
  std::size_t max_request_bytes = 8 * 1024 * 1024;
  std::size_t max_sets = 16;
  std::size_t max_names_per_set = 100000;
  std::size_t default_page_size = 100;
};

struct ServiceResponse {
  int status = 200;
  nlohmann::json body;
};

/// JSON API over one immutable analysis. Handlers are pure functions of the
/// loaded analysis and the request; until load() completes every endpoint
/// answers 503.
class Service {
 public:
  explicit Service(ServiceLimits limits = {});

  void load(std::shared_ptr<const Analysis> analysis);
  bool ready() const;

  ServiceResponse summary() const;
  ServiceResponse selection(const std::string& body, std::size_t offset, std::optional<std::size_t> limit) const;
  ServiceResponse package(const std::string& name) const;
  ServiceResponse compare(const std::string& body) const;

  /// Registers the /v1 routes on `server`.
  void mount(httplib::Server& server) const;

  const ServiceLimits& limits() const noexcept { return limits_; }

 private:
  std::shared_ptr<const Analysis> current() const;

  ServiceLimits limits_;
  mutable std::mutex mutex_;
  std::shared_ptr<const Analysis> analysis_;
};

}  // namespace ecoimpact
