#pragma once

#include <deque>
#include <memory>

#include "chronosim/net.hpp"

namespace chronosim::net {

enum class WiredType { CsmaCd, Can, Tdma };

struct NetworkConfig {
    WiredType net_type = WiredType::CsmaCd;
    int network_number = 0;
    int node_count = 0;
    double data_rate = 0.0;   // bits/second
    double min_frame = 0.0;   // bits
    double loss_prob = 0.0;
    double tdma_slot = 0.0;   // seconds, TDMA only

    void validate() const;
};

// TDMA slot owner at nominal time t; slots are left-closed right-open, so a
// boundary instant belongs to the next slot.
int tdma_owner(double t, double tdma_slot, int node_count);

// Index into `pending` of the frame that wins CAN arbitration (numerically
// smallest can_id; node order breaks duplicates defensively).
std::size_t can_arbitrate(const std::vector<Frame>& pending);

// Ethernet-style shared bus: 1-persistent carrier sensing, same-instant
// starts collide, binary exponential backoff k*slot with k uniform in
// [0, 2^min(n,10)-1] on the n-th collision, discard after 16 attempts.
// A collision occupies the medium for one slot time (min_frame/data_rate).
// Propagation delay is zero; loss is drawn at tx_end.
class CsmaCdNetwork : public Network {
public:
    CsmaCdNetwork(NetworkConfig cfg, sim::EventQueue& queue, std::uint64_t root_seed,
                  NetCallbacks callbacks);

    void enqueue(Frame f, double t) override;

    const NetworkConfig& config() const { return cfg_; }

private:
    struct Sender {
        std::deque<Frame> queue;
        int attempts = 0;
        bool backing_off = false;
    };

    void attempt(int local, double t);
    void on_tx_start(int local, double t);
    void on_tx_end(double t);
    void on_collision_end(double t);
    void handle_collision_participant(int local, double t);
    bool medium_engaged(double t) const;
    double slot_time() const { return cfg_.min_frame / cfg_.data_rate; }

    NetworkConfig cfg_;
    sim::RngStream loss_rng_;
    sim::RngStream backoff_rng_;
    std::vector<Sender> senders_;
    std::vector<int> waiting_;  // locals deferring to medium idle, ascending

    std::optional<int> tx_node_;  // local index of the ongoing transmitter
    Frame tx_frame_;
    sim::EventId tx_end_event_ = 0;
    double tx_begin_ = -1.0;
    bool collision_ = false;
    double collision_until_ = 0.0;
};

// CAN bus: instantaneous lossless priority arbitration between the heads of
// the per-node queues, non-preemptive transmission, smallest can_id first.
class CanNetwork : public Network {
public:
    CanNetwork(NetworkConfig cfg, sim::EventQueue& queue, std::uint64_t root_seed,
               NetCallbacks callbacks);

    void enqueue(Frame f, double t) override;

    const NetworkConfig& config() const { return cfg_; }

private:
    // Arbitration runs as a same-instant event so every frame enqueued at
    // that instant contends; the numerically smallest can_id then wins.
    void request_arbitration(double t);
    void arbitrate(double t);
    void on_tx_end(double t);

    NetworkConfig cfg_;
    sim::RngStream loss_rng_;
    std::vector<std::deque<Frame>> queues_;
    std::optional<int> tx_node_;
    Frame tx_frame_;
    bool arbitration_pending_ = false;
};

// Fixed-schedule TDMA: slot s belongs to attached node s mod node_count
// (nodes ranked by node_number). A frame transmits in the earliest owned
// slot with enough remaining room; frames longer than a slot are discarded.
class TdmaNetwork : public Network {
public:
    TdmaNetwork(NetworkConfig cfg, sim::EventQueue& queue, std::uint64_t root_seed,
                NetCallbacks callbacks);

    void start() override;
    void enqueue(Frame f, double t) override;

    const NetworkConfig& config() const { return cfg_; }

private:
    void plan(int local, double t);
    void on_tx_start(int local, double t);
    void on_tx_end(int local, double t);

    NetworkConfig cfg_;
    sim::RngStream loss_rng_;
    std::vector<std::deque<Frame>> queues_;
    std::vector<int> slot_rank_;   // local index -> slot ownership rank
    std::vector<bool> planned_;
    std::optional<int> tx_node_;
};

std::unique_ptr<Network> make_wired_network(const NetworkConfig& cfg, sim::EventQueue& queue,
                                            std::uint64_t root_seed, NetCallbacks callbacks);

}  // namespace chronosim::net
