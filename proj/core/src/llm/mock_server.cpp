#include "tablemine/llm/mock_server.hpp"

#include <httplib.h>

#include "tablemine/error.hpp"

namespace tablemine::llm {

MockLlmServer::MockLlmServer(FixtureResponder responder)
    : responder_(std::move(responder)), server_(std::make_unique<httplib::Server>()) {
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    nlohmann::json body;
    try {
      body = nlohmann::json::parse(req.body);
    } catch (const nlohmann::json::parse_error& e) {
      res.status = 400;
      res.set_content(nlohmann::json{{"error", {{"message", e.what()}}}}.dump(), "application/json");
      return;
    }
    {
      std::lock_guard lock(mu_);
      log_.push_back(body);
      if (failures_left_ > 0) {
        --failures_left_;
        res.status = failure_status_;
        if (failure_retry_after_) res.set_header("Retry-After", std::to_string(*failure_retry_after_));
        res.set_content(R"({"error":{"message":"injected failure"}})", "application/json");
        return;
      }
    }
    std::optional<std::string> reply;
    try {
      reply = responder_.respond(request_from_wire(body));
    } catch (const Error& e) {
      res.status = 400;
      res.set_content(nlohmann::json{{"error", {{"message", e.what()}}}}.dump(), "application/json");
      return;
    }
    if (!reply) {
      res.status = 404;
      res.set_content(R"({"error":{"message":"no fixture for request"}})", "application/json");
      return;
    }
    res.set_content(*reply, "application/json");
  };
  // httplib's default SO_REUSEPORT would let two servers share a port; a
  // second server must fail with PortInUse instead.
  server_->set_socket_options([](auto sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
  });
  server_->Post("/v1/chat/completions", handler);
  server_->Post("/chat/completions", handler);
}

MockLlmServer::~MockLlmServer() { stop(); }

void MockLlmServer::start(int port, const std::string& host) {
  host_ = host;
  if (port == 0) {
    port_ = server_->bind_to_any_port(host);
    if (port_ < 0) throw Error(ErrorCode::PortInUse, "could not bind " + host);
  } else {
    if (!server_->bind_to_port(host, port)) {
      throw Error(ErrorCode::PortInUse, host + ":" + std::to_string(port) + " is not available");
    }
    port_ = port;
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void MockLlmServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

void MockLlmServer::wait() {
  if (thread_.joinable()) thread_.join();
}

std::string MockLlmServer::base_url() const { return "http://" + host_ + ":" + std::to_string(port_) + "/v1"; }

std::vector<nlohmann::json> MockLlmServer::requests() const {
  std::lock_guard lock(mu_);
  return log_;
}

void MockLlmServer::inject_failures(int count, int status, std::optional<int> retry_after_s) {
  std::lock_guard lock(mu_);
  failures_left_ = count;
  failure_status_ = status;
  failure_retry_after_ = retry_after_s;
}

}  // namespace tablemine::llm
