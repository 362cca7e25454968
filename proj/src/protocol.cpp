#include "risbeam/protocol.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <stdexcept>

#include "risbeam/codebook.hpp"

namespace risbeam {

namespace {
constexpr std::size_t max_line_bytes = 64 * 1024;

std::string format_double(const char* fmt, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, v);
    return buf;
}

bool send_all(int fd, const std::string& data) {
    std::size_t sent = 0;
    while (sent < data.size()) {
        ssize_t n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
        if (n <= 0) return false;
        sent += static_cast<std::size_t>(n);
    }
    return true;
}

sockaddr_in make_address(const std::string& host, std::uint16_t port) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (host.empty() || host == "0.0.0.0") {
        addr.sin_addr.s_addr = htonl(INADDR_ANY);
    } else if (host == "localhost") {
        addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    } else if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        throw std::invalid_argument("bad IPv4 address '" + host + "'");
    }
    return addr;
}

std::vector<std::string> split(const std::string& s, char sep, std::size_t max_parts) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (parts.size() + 1 < max_parts) {
        std::size_t pos = s.find(sep, start);
        if (pos == std::string::npos) break;
        parts.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    parts.push_back(s.substr(start));
    return parts;
}
}  // namespace

std::string encode_profile_line(const PhaseProfile& profile, ProfileEncoding encoding,
                                const PhaseStateSet& states) {
    const RisGeometry& g = profile.geometry;
    std::string line = "SET ";
    if (encoding == ProfileEncoding::one_bit) {
        if (!states.is_discrete() || states.state_count() != 2)
            throw std::invalid_argument("encode_profile_line: 1bit needs a two-state set");
        std::vector<std::size_t> indices(g.element_count());
        std::size_t k = 0;
        for (std::size_t m = 0; m < g.rows_z; ++m)
            for (std::size_t n = 0; n < g.cols_y; ++n)
                indices[k++] = states.nearest_state(std::arg(profile.at(m, n)));
        line += "1bit ";
        line += pack_state_indices(indices, 1);
    } else {
        line += "phase ";
        char buf[48];
        bool first = true;
        for (std::size_t m = 0; m < g.rows_z; ++m)
            for (std::size_t n = 0; n < g.cols_y; ++n) {
                std::snprintf(buf, sizeof(buf), "%.17g", std::arg(profile.at(m, n)));
                if (!first) line += ',';
                first = false;
                line += buf;
            }
    }
    line += '\n';
    return line;
}

FeedbackServer::FeedbackServer(const Scenario& scenario, const std::string& host,
                               std::uint16_t port)
    : scenario_(scenario), oracle_(std::make_unique<SimulatedOracle>(scenario)) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw std::runtime_error("FeedbackServer: socket() failed");
    int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr = make_address(host, port);
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        ::close(listen_fd_);
        throw std::runtime_error("FeedbackServer: bind() failed: " +
                                 std::string(std::strerror(errno)));
    }
    if (::listen(listen_fd_, 4) != 0) {
        ::close(listen_fd_);
        throw std::runtime_error("FeedbackServer: listen() failed");
    }
    socklen_t len = sizeof(addr);
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

FeedbackServer::~FeedbackServer() {
    stop();
    if (listen_fd_ >= 0) ::close(listen_fd_);
}

void FeedbackServer::start() {
    if (running_.exchange(true)) return;
    stop_requested_ = false;
    thread_ = std::thread([this] { run(); });
}

void FeedbackServer::stop() {
    stop_requested_ = true;
    if (thread_.joinable()) thread_.join();
    running_ = false;
}

void FeedbackServer::run() {
    running_ = true;
    while (!stop_requested_) {
        pollfd pfd{listen_fd_, POLLIN, 0};
        int r = ::poll(&pfd, 1, 100);
        if (r <= 0) continue;
        int client = ::accept(listen_fd_, nullptr, nullptr);
        if (client < 0) continue;
        serve_client(client);
        ::close(client);
    }
    running_ = false;
}

void FeedbackServer::serve_client(int client_fd) {
    std::string buffer;
    char chunk[4096];
    bool oversize = false;
    while (!stop_requested_) {
        // While serving this client, refuse any further connection attempt.
        pollfd pfds[2] = {{client_fd, POLLIN, 0}, {listen_fd_, POLLIN, 0}};
        int r = ::poll(pfds, 2, 100);
        if (r < 0) return;
        if (pfds[1].revents & POLLIN) {
            int other = ::accept(listen_fd_, nullptr, nullptr);
            if (other >= 0) {
                send_all(other, "ERR 409 server busy with another client\n");
                ::close(other);
            }
        }
        if (!(pfds[0].revents & (POLLIN | POLLHUP | POLLERR))) continue;

        ssize_t n = ::recv(client_fd, chunk, sizeof(chunk), 0);
        if (n <= 0) return;  // client closed or failed
        buffer.append(chunk, static_cast<std::size_t>(n));

        std::size_t pos;
        while ((pos = buffer.find('\n')) != std::string::npos) {
            std::string line = buffer.substr(0, pos);
            buffer.erase(0, pos + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            std::string response;
            if (oversize) {
                oversize = false;
                response = "ERR 400 line too long\n";
            } else {
                response = handle_line(line);
            }
            if (!send_all(client_fd, response)) return;
        }
        if (buffer.size() > max_line_bytes) {
            // Drop the partial line but keep the grammar total: the reply is
            // issued once the terminating LF finally arrives.
            buffer.clear();
            oversize = true;
        }
    }
}

std::string FeedbackServer::handle_line(const std::string& line) {
    if (line.empty()) return "ERR 400 empty request\n";
    for (unsigned char c : line)
        if (c < 0x20 || c > 0x7E) return "ERR 400 non-printable characters\n";

    auto parts = split(line, ' ', 3);
    const std::string& verb = parts[0];

    if (verb == "GET-COUNT") {
        if (parts.size() != 1) return "ERR 400 GET-COUNT takes no arguments\n";
        return "COUNT " + std::to_string(oracle_->query_count()) + "\n";
    }

    if (verb == "RESET") {
        if (parts.size() != 2) return "ERR 400 RESET takes one seed argument\n";
        std::uint64_t seed;
        try {
            std::size_t used = 0;
            seed = std::stoull(parts[1], &used);
            if (used != parts[1].size()) return "ERR 400 bad seed\n";
        } catch (const std::exception&) {
            return "ERR 400 bad seed\n";
        }
        oracle_->reseed(seed);
        return "OK\n";
    }

    if (verb == "SET") {
        if (parts.size() != 3) return "ERR 400 SET takes encoding and payload\n";
        const std::string& encoding = parts[1];
        const std::string& payload = parts[2];
        const RisGeometry& g = scenario_.ris.geometry;
        PhaseProfile profile = PhaseProfile::uniform(g);

        if (encoding == "1bit") {
            const PhaseStateSet& states = scenario_.ris.phase_states;
            if (!states.is_discrete() || states.state_count() != 2)
                return "ERR 400 scenario has no two-state set for 1bit\n";
            if (payload.size() != ((g.element_count() + 7) / 8) * 2)
                return "ERR 413 payload size mismatch\n";
            std::vector<std::size_t> indices;
            try {
                indices = unpack_state_indices(payload, g.element_count(), 1);
            } catch (const std::exception&) {
                return "ERR 400 bad hex payload\n";
            }
            std::size_t k = 0;
            for (std::size_t m = 0; m < g.rows_z; ++m)
                for (std::size_t n = 0; n < g.cols_y; ++n)
                    profile.at(m, n) = states.states()[indices[k++]].coefficient();
        } else if (encoding == "phase") {
            auto values = split(payload, ',', std::size_t(-1));
            if (values.size() != g.element_count()) return "ERR 413 payload size mismatch\n";
            std::size_t k = 0;
            for (std::size_t m = 0; m < g.rows_z; ++m)
                for (std::size_t n = 0; n < g.cols_y; ++n) {
                    double phase;
                    try {
                        std::size_t used = 0;
                        phase = std::stod(values[k], &used);
                        if (used != values[k].size()) throw std::invalid_argument("trailing");
                    } catch (const std::exception&) {
                        return "ERR 400 bad phase value\n";
                    }
                    if (!std::isfinite(phase)) return "ERR 400 non-finite phase\n";
                    profile.at(m, n) = std::polar(1.0, phase);
                    ++k;
                }
        } else {
            return "ERR 400 unknown encoding '" + encoding + "'\n";
        }

        double power = oracle_->query(profile);
        return "PWR " + format_double("%.4f", power) + "\n";
    }

    return "ERR 400 unknown request '" + verb + "'\n";
}

RemoteOracle::RemoteOracle(const std::string& host, std::uint16_t port,
                           ProfileEncoding encoding, const PhaseStateSet& states,
                           double timeout_s)
    : encoding_(encoding), states_(states) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw OracleError("RemoteOracle: socket() failed");
    timeval tv{};
    tv.tv_sec = static_cast<time_t>(timeout_s);
    tv.tv_usec = static_cast<suseconds_t>((timeout_s - static_cast<double>(tv.tv_sec)) * 1e6);
    ::setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
    ::setsockopt(fd_, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof(tv));
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));

    sockaddr_in addr = make_address(host.empty() ? "127.0.0.1" : host, port);
    if (addr.sin_addr.s_addr == htonl(INADDR_ANY)) addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        ::close(fd_);
        fd_ = -1;
        throw OracleError("RemoteOracle: cannot connect to " + host + ":" +
                          std::to_string(port));
    }
}

RemoteOracle::~RemoteOracle() {
    if (fd_ >= 0) ::close(fd_);
}

std::string RemoteOracle::exchange(const std::string& request_line) {
    if (fd_ < 0) throw OracleError("RemoteOracle: connection is closed");
    if (!send_all(fd_, request_line)) throw OracleError("RemoteOracle: send failed");
    while (true) {
        std::size_t pos = rx_buffer_.find('\n');
        if (pos != std::string::npos) {
            std::string line = rx_buffer_.substr(0, pos);
            rx_buffer_.erase(0, pos + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            return line;
        }
        char chunk[4096];
        ssize_t n = ::recv(fd_, chunk, sizeof(chunk), 0);
        if (n == 0) throw OracleError("RemoteOracle: server closed the connection");
        if (n < 0) throw OracleError("RemoteOracle: receive timed out or failed");
        rx_buffer_.append(chunk, static_cast<std::size_t>(n));
        if (rx_buffer_.size() > max_line_bytes)
            throw OracleError("RemoteOracle: oversize response line");
    }
}

double RemoteOracle::query(const PhaseProfile& profile) {
    std::string reply = exchange(encode_profile_line(profile, encoding_, states_));
    if (reply.rfind("PWR ", 0) != 0)
        throw OracleError("RemoteOracle: protocol violation, got '" + reply + "'");
    double value;
    try {
        value = std::stod(reply.substr(4));
    } catch (const std::exception&) {
        throw OracleError("RemoteOracle: bad PWR value in '" + reply + "'");
    }
    ++count_;
    return value;
}

void RemoteOracle::reseed(std::uint64_t seed) {
    std::string reply = exchange("RESET " + std::to_string(seed) + "\n");
    if (reply != "OK")
        throw OracleError("RemoteOracle: RESET rejected with '" + reply + "'");
}

std::uint64_t RemoteOracle::server_count() {
    std::string reply = exchange("GET-COUNT\n");
    if (reply.rfind("COUNT ", 0) != 0)
        throw OracleError("RemoteOracle: protocol violation, got '" + reply + "'");
    try {
        return std::stoull(reply.substr(6));
    } catch (const std::exception&) {
        throw OracleError("RemoteOracle: bad COUNT value in '" + reply + "'");
    }
}

}  // namespace risbeam
