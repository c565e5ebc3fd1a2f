#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "rankleak/engine.hpp"

namespace rankleak {

struct EndpointConfig {
    std::string host = "127.0.0.1";
    /// 0 picks an ephemeral port; read it back with Server::port().
    std::uint16_t port = 0;
};

/// Newline-delimited JSON over TCP. One thread per connection; each
/// connection is its own actor for rate limiting.
class Server {
  public:
    /// Errors: BindFailure.
    Server(std::shared_ptr<QueryEngine> engine, EndpointConfig endpoint);
    ~Server();

    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    std::uint16_t port() const { return m_port; }
    /// Safe to call repeatedly and from any thread.
    void stop();

  private:
    void accept_loop();
    void serve_connection(int fd);

    std::shared_ptr<QueryEngine> m_engine;
    int m_listen_fd = -1;
    std::uint16_t m_port = 0;
    std::atomic<bool> m_stopping{false};
    std::thread m_acceptor;
    std::mutex m_mutex;
    std::vector<int> m_client_fds;
    std::vector<std::thread> m_workers;
    std::mutex m_stop_mutex;
    bool m_stopped = false;
};

/// Line-oriented TCP client.
class WireClient {
  public:
    /// Errors: ConnectionFailure.
    WireClient(const std::string& host, std::uint16_t port);
    ~WireClient();

    WireClient(const WireClient&) = delete;
    WireClient& operator=(const WireClient&) = delete;

    /// Sends one request line and returns the reply line (both without newline).
    std::string roundtrip(std::string_view line);

  private:
    int m_fd = -1;
    std::string m_buffer;
};

/// SearchInterface over the wire protocol.
class RemoteSession final : public SearchInterface {
  public:
    RemoteSession(const std::string& host, std::uint16_t port, std::optional<std::size_t> budget = std::nullopt);

    const Schema& schema() const override { return *m_schema; }
    std::size_t k() const override { return m_k; }
    QueryKind query_kind() const override { return m_kind; }

  protected:
    RankedAnswer do_query(const Query& q) override;
    TupleId do_insert(const std::vector<Value>& values) override;

  private:
    WireClient m_client;
    std::unique_ptr<Schema> m_schema;
    std::size_t m_k = 1;
    QueryKind m_kind = QueryKind::InAllowed;
};

/// Parses "host:port".
std::pair<std::string, std::uint16_t> parse_endpoint(std::string_view text);

}  // namespace rankleak
