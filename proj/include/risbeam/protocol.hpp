#ifndef RISBEAM_PROTOCOL_HPP
#define RISBEAM_PROTOCOL_HPP

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <thread>

#include "risbeam/channel.hpp"

namespace risbeam {

/// Raised by the remote oracle on timeouts, connection loss, or protocol
/// violations.
struct OracleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Profile payload encodings of the wire protocol. `one_bit` is the
/// codebook hex packing of state indices under the server scenario's
/// two-state set; `phase` is comma-separated radians (unit amplitudes),
/// row-major by (m, n).
enum class ProfileEncoding { one_bit, phase };

/// Stateless helpers shared by client, server and tests.
std::string encode_profile_line(const PhaseProfile& profile, ProfileEncoding encoding,
                                const PhaseStateSet& states);

/// Line-protocol server wrapping a simulated oracle for one scenario.
/// Requests are processed strictly sequentially; a second connection is
/// refused with ERR 409 while one is active.
class FeedbackServer {
  public:
    /// Binds and listens immediately; port 0 picks an ephemeral port.
    FeedbackServer(const Scenario& scenario, const std::string& host, std::uint16_t port);
    ~FeedbackServer();

    FeedbackServer(const FeedbackServer&) = delete;
    FeedbackServer& operator=(const FeedbackServer&) = delete;

    std::uint16_t port() const { return port_; }

    /// Serve until stop(); blocking.
    void run();
    /// Serve on a background thread.
    void start();
    void stop();

  private:
    void serve_client(int client_fd);
    std::string handle_line(const std::string& line);

    Scenario scenario_;
    std::unique_ptr<SimulatedOracle> oracle_;
    int listen_fd_ = -1;
    std::uint16_t port_ = 0;
    std::atomic<bool> running_{false};
    std::atomic<bool> stop_requested_{false};
    std::thread thread_;
};

/// PowerOracle over the wire protocol. Queries are sent as SET lines and
/// the returned PWR value is reported; failures raise OracleError.
class RemoteOracle final : public PowerOracle {
  public:
    RemoteOracle(const std::string& host, std::uint16_t port,
                 ProfileEncoding encoding = ProfileEncoding::phase,
                 const PhaseStateSet& states = PhaseStateSet::continuous(),
                 double timeout_s = 5.0);
    ~RemoteOracle() override;

    RemoteOracle(const RemoteOracle&) = delete;
    RemoteOracle& operator=(const RemoteOracle&) = delete;

    double query(const PhaseProfile& profile) override;
    std::uint64_t query_count() const override { return count_; }
    void reseed(std::uint64_t seed) override;

    /// Server-side query counter via GET-COUNT.
    std::uint64_t server_count();

  private:
    std::string exchange(const std::string& request_line);

    int fd_ = -1;
    ProfileEncoding encoding_;
    PhaseStateSet states_;
    std::uint64_t count_ = 0;
    std::string rx_buffer_;
};

}  // namespace risbeam

#endif
