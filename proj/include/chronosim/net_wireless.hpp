#pragma once

#include <deque>

#include "chronosim/net.hpp"

namespace chronosim::net {

enum class WirelessType { Wlan, Zigbee };

// Radio parameters. Power quantities are linear milliwatts; the reception
// rule is received_power >= signal_threshold (inclusive).
struct WirelessConfig {
    WirelessType net_type = WirelessType::Wlan;
    int network_number = 0;
    int node_count = 0;
    double data_rate = 11e6;        // bits/s (802.11b default)
    double min_frame = 272.0;       // bits
    double loss_prob = 0.0;
    double transmit_power = 20.0;   // mW
    double signal_threshold = 0.1;  // mW
    double pathloss_exp = 2.0;
    double ack_timeout = 0.0;       // seconds after tx_end
    int retry_limit = 3;
    int cw_min_slots = 32;          // initial contention window size
    double slot_time = 20e-6;       // seconds
    bool ack_lossy = false;

    void validate() const;
};

// Free-space style power law with a 1 m reference-distance clamp:
// p_rx = p_tx / max(d, 1)^alpha.
double received_power(double p_tx_mw, double d_meters, double alpha);

// Inclusive threshold reception test between two positioned nodes.
bool in_range(const Position& a, const Position& b, const WirelessConfig& cfg);

// Radio energy of one transmission: p_tx[mW] * 1e-3 * duration[s] joules.
double tx_energy(double p_tx_mw, double duration_s);

enum class ReceptionOutcome { Ok, Corrupted, OutOfRange, Dropped };

const char* to_string(ReceptionOutcome o);

// CSMA/CA medium with per-listener carrier sensing (hidden terminals are
// possible), collision-on-audible-overlap corruption, immediate min_frame
// acks for unicast frames, ack-timeout retries up to retry_limit, and
// per-transmission battery drain. Backoff draws k uniform in
// [0, cw_min_slots * 2^min(retries,5) - 1] slots; if the medium turned busy
// by the time the countdown expires the sender waits for idle and redraws.
// Broadcast frames are delivered to every audible receiver and are not
// acknowledged. ZigBee shares this MAC and differs only in defaults.
class WlanNetwork : public Network {
public:
    WlanNetwork(WirelessConfig cfg, sim::EventQueue& queue, std::uint64_t root_seed,
                NetCallbacks callbacks);

    void enqueue(Frame f, double t) override;

    const WirelessConfig& config() const { return cfg_; }

    // True when some other node's ongoing transmission is audible here.
    bool busy_at(int local, double t) const;

private:
    struct TxRecord {
        std::uint64_t tx_id = 0;
        int local = -1;
        Frame frame;
        double start = 0.0;
        double end = 0.0;
        double duration = 0.0;  // exact airtime, used for the energy charge
        bool is_ack = false;
        std::vector<int> overlap_srcs;  // locals of time-overlapping transmitters
    };

    enum class Phase { Idle, WaitIdle, Backoff, Transmitting, AwaitAck };

    struct Sender {
        std::deque<Frame> queue;
        int retries = 0;
        Phase phase = Phase::Idle;
        sim::EventId ack_timeout_event = 0;
        std::uint64_t awaiting_frame_id = 0;
    };

    void begin_attempt(int local, double t);
    void on_backoff_expiry(int local, double t);
    void start_tx(int local, double t);
    void on_tx_end(std::size_t tx_slot, double t);
    void finish_data_tx(TxRecord tx, double t);
    void finish_ack_tx(TxRecord tx, double t);
    void on_ack_timeout(int local, double t);
    void succeed(int local, double t);
    void give_up(int local, double t);
    void wake_waiters(double t);
    ReceptionOutcome outcome_at(const TxRecord& tx, int rcv_local, bool lossy);
    bool audible(int src_local, int rcv_local) const;

    WirelessConfig cfg_;
    sim::RngStream loss_rng_;
    sim::RngStream backoff_rng_;
    std::vector<Sender> senders_;
    std::vector<TxRecord> ongoing_;
    std::uint64_t next_tx_id_ = 1;
};

struct UltrasoundConfig {
    int network_number = 0;
    int node_count = 0;
    double ping_length = 0.0;     // meters
    double speed_of_sound = 0.0;  // meters/second

    void validate() const;
};

// Acoustic broadcast medium: every node within ping_length receives the
// frame after distance/speed_of_sound; no MAC, no acks, no loss.
class UltrasoundNetwork : public Network {
public:
    UltrasoundNetwork(UltrasoundConfig cfg, sim::EventQueue& queue, NetCallbacks callbacks);

    void enqueue(Frame f, double t) override;

    const UltrasoundConfig& config() const { return cfg_; }

private:
    UltrasoundConfig cfg_;
};

}  // namespace chronosim::net
