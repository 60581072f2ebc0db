#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "tablemine/llm/fixtures.hpp"

namespace httplib {
class Server;
}

namespace tablemine::llm {

// Local chat-completions endpoint backed by a FixtureResponder. Serves
// POST /v1/chat/completions and POST /chat/completions.
class MockLlmServer {
 public:
  explicit MockLlmServer(FixtureResponder responder);
  ~MockLlmServer();
  MockLlmServer(const MockLlmServer&) = delete;
  MockLlmServer& operator=(const MockLlmServer&) = delete;

  // Port 0 picks a free port. Throws Error(PortInUse).
  void start(int port = 0, const std::string& host = "127.0.0.1");
  void stop();
  // Blocks until stop() is called from another thread.
  void wait();

  int port() const { return port_; }
  std::string base_url() const;

  // Every request body received, in arrival order.
  std::vector<nlohmann::json> requests() const;

  // The next `count` requests are answered with `status` (and a Retry-After
  // header when given) instead of a completion.
  void inject_failures(int count, int status, std::optional<int> retry_after_s = std::nullopt);

 private:
  FixtureResponder responder_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::string host_;
  int port_ = 0;

  mutable std::mutex mu_;
  std::vector<nlohmann::json> log_;
  int failures_left_ = 0;
  int failure_status_ = 500;
  std::optional<int> failure_retry_after_;
};

}  // namespace tablemine::llm
