#include "rankleak/server.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>

#include "rankleak/wire.hpp"

namespace rankleak {

namespace {

bool send_all(int fd, std::string_view data) {
    while (!data.empty()) {
        const ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            return false;
        }
        data.remove_prefix(static_cast<std::size_t>(n));
    }
    return true;
}

/// Reads until a newline; false on EOF/error with nothing buffered.
bool read_line(int fd, std::string& buffer, std::string& line) {
    for (;;) {
        auto pos = buffer.find('\n');
        if (pos != std::string::npos) {
            line = buffer.substr(0, pos);
            buffer.erase(0, pos + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            return true;
        }
        char chunk[4096];
        const ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) return false;
        buffer.append(chunk, static_cast<std::size_t>(n));
    }
}

void set_nodelay(int fd) {
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

}  // namespace

Server::Server(std::shared_ptr<QueryEngine> engine, EndpointConfig endpoint) : m_engine(std::move(engine)) {
    m_listen_fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (m_listen_fd < 0) throw Error(Errc::BindFailure, std::string("socket: ") + std::strerror(errno));
    int one = 1;
    ::setsockopt(m_listen_fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(endpoint.port);
    if (::inet_pton(AF_INET, endpoint.host.c_str(), &addr.sin_addr) != 1) {
        ::close(m_listen_fd);
        throw Error(Errc::BindFailure, "not an IPv4 address: " + endpoint.host);
    }
    if (::bind(m_listen_fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(m_listen_fd, 64) != 0) {
        const std::string reason = std::strerror(errno);
        ::close(m_listen_fd);
        throw Error(Errc::BindFailure, "cannot listen on " + endpoint.host + ":" + std::to_string(endpoint.port) +
                                           ": " + reason);
    }
    socklen_t len = sizeof addr;
    ::getsockname(m_listen_fd, reinterpret_cast<sockaddr*>(&addr), &len);
    m_port = ntohs(addr.sin_port);
    m_acceptor = std::thread([this] { accept_loop(); });
}

Server::~Server() { stop(); }

void Server::accept_loop() {
    while (!m_stopping.load()) {
        const int fd = ::accept(m_listen_fd, nullptr, nullptr);
        if (fd < 0) {
            if (errno == EINTR) continue;
            break;
        }
        set_nodelay(fd);
        std::lock_guard lock(m_mutex);
        if (m_stopping.load()) {
            ::close(fd);
            break;
        }
        m_client_fds.push_back(fd);
        m_workers.emplace_back([this, fd] { serve_connection(fd); });
    }
}

void Server::serve_connection(int fd) {
    const ActorId actor = m_engine->new_actor();
    std::string buffer;
    std::string line;
    while (!m_stopping.load() && read_line(fd, buffer, line)) {
        if (line.empty()) continue;
        std::string reply = handle_request(*m_engine, actor, line);
        reply.push_back('\n');
        if (!send_all(fd, reply)) break;
    }
    ::shutdown(fd, SHUT_RDWR);
}

void Server::stop() {
    std::lock_guard stop_lock(m_stop_mutex);
    if (m_stopped) return;
    m_stopped = true;
    m_stopping.store(true);
    ::shutdown(m_listen_fd, SHUT_RDWR);
    if (m_acceptor.joinable()) m_acceptor.join();
    std::vector<std::thread> workers;
    {
        std::lock_guard lock(m_mutex);
        for (int fd : m_client_fds) ::shutdown(fd, SHUT_RDWR);
        workers = std::move(m_workers);
    }
    for (auto& w : workers) w.join();
    for (int fd : m_client_fds) ::close(fd);
    m_client_fds.clear();
    ::close(m_listen_fd);
}

WireClient::WireClient(const std::string& host, std::uint16_t port) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    const std::string service = std::to_string(port);
    if (::getaddrinfo(host.c_str(), service.c_str(), &hints, &res) != 0 || res == nullptr) {
        throw Error(Errc::ConnectionFailure, "cannot resolve " + host);
    }
    m_fd = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
    const bool ok = m_fd >= 0 && ::connect(m_fd, res->ai_addr, res->ai_addrlen) == 0;
    ::freeaddrinfo(res);
    if (!ok) {
        if (m_fd >= 0) ::close(m_fd);
        throw Error(Errc::ConnectionFailure, "cannot connect to " + host + ":" + service);
    }
    set_nodelay(m_fd);
}

WireClient::~WireClient() {
    if (m_fd >= 0) ::close(m_fd);
}

std::string WireClient::roundtrip(std::string_view line) {
    std::string out(line);
    out.push_back('\n');
    if (!send_all(m_fd, out)) throw Error(Errc::ConnectionFailure, "send failed");
    std::string reply;
    if (!read_line(m_fd, m_buffer, reply)) throw Error(Errc::ConnectionFailure, "connection closed by server");
    return reply;
}

namespace {

json checked_reply(const std::string& line) {
    json reply = json::parse(line, nullptr, false);
    if (reply.is_discarded() || !reply.is_object()) throw Error(Errc::ConnectionFailure, "unparseable reply");
    if (!reply.value("ok", false)) {
        const auto code = reply.value("error", std::string("bad_request"));
        throw Error(errc_from_wire(code), reply.value("message", code));
    }
    return reply;
}

}  // namespace

RemoteSession::RemoteSession(const std::string& host, std::uint16_t port, std::optional<std::size_t> budget)
    : SearchInterface(budget), m_client(host, port) {
    json reply = checked_reply(m_client.roundtrip(R"({"op":"schema"})"));
    m_schema = std::make_unique<Schema>(schema_from_json(reply));
    m_k = reply.at("k").get<std::size_t>();
    m_kind = parse_query_kind(reply.at("query_kind").get<std::string>()).value_or(QueryKind::InAllowed);
}

RankedAnswer RemoteSession::do_query(const Query& q) {
    json req{{"op", "query"}, {"predicates", query_to_json(q)}};
    return answer_from_json(checked_reply(m_client.roundtrip(req.dump())), m_k);
}

TupleId RemoteSession::do_insert(const std::vector<Value>& values) {
    json vals = json::array();
    for (Value v : values) vals.push_back(v == kNull ? json(nullptr) : json(v));
    json req{{"op", "insert"}, {"values", vals}};
    return checked_reply(m_client.roundtrip(req.dump())).at("id").get<TupleId>();
}

std::pair<std::string, std::uint16_t> parse_endpoint(std::string_view text) {
    const auto colon = text.rfind(':');
    if (colon == std::string_view::npos) throw Error(Errc::InvalidArgument, "endpoint must be host:port");
    unsigned port = 0;
    const auto digits = text.substr(colon + 1);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), port);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || port > 65535) {
        throw Error(Errc::InvalidArgument, "bad port in endpoint " + std::string(text));
    }
    return {std::string(text.substr(0, colon)), static_cast<std::uint16_t>(port)};
}

}  // namespace rankleak
