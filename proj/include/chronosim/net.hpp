#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "chronosim/event_queue.hpp"
#include "chronosim/rng.hpp"

namespace chronosim::net {

inline constexpr int kBroadcast = -1;

struct Position {
    double x = 0.0;  // meters
    double y = 0.0;
};

double distance(const Position& a, const Position& b);

// In-flight message unit. src/dst are world node indices.
struct Frame {
    std::uint64_t id = 0;
    int src = -1;
    int dst = kBroadcast;
    int size_bits = 0;
    double payload = 0.0;
    int can_id = 0;
    double enqueue_time = 0.0;
    double tx_start = 0.0;
    double tx_end = 0.0;
};

// Transmission time of a frame: messages shorter than the minimum frame are
// padded to it, so duration = max(size, min_frame) / data_rate.
double tx_duration(int size_bits, double data_rate, double min_frame_bits);

// Bernoulli packet drop, applied at tx_end so a lost frame still consumed
// bandwidth. Returns true when the frame is dropped.
bool apply_loss(sim::RngStream& stream, double loss_prob);

enum class NetTraceState { Idle, Waiting, Sending };

const char* to_string(NetTraceState s);

struct NetCallbacks {
    // Successful MAC-level delivery toward a destination node.
    std::function<void(const Frame&, int dst_node, double t)> on_deliver;
    // Per-node medium state changes for the network trace.
    std::function<void(int node_index, NetTraceState state, double t)> on_trace;
    // Drops / discards and other noteworthy events.
    std::function<void(const std::string& kind, const std::string& detail, double t)> on_event;
    // Radio energy draw (wireless networks only).
    std::function<void(int node_index, double joules, double t)> on_energy;
};

struct NetStats {
    std::uint64_t offered = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dropped_loss = 0;
    std::uint64_t discarded = 0;  // retry/attempt limits, oversize frames
    std::uint64_t delivered_bits = 0;
    std::vector<double> latencies;  // tx_end - enqueue_time per delivery
};

// Shared base for all media: attachment bookkeeping, per-node trace
// deduplication, and delivery/statistics plumbing.
class Network {
public:
    struct Attachment {
        int node_index = -1;  // world index
        int node_number = 0;  // unique within the network
        std::optional<Position> position;
        bool powered = true;
    };

    Network(int network_number, sim::EventQueue& queue, NetCallbacks callbacks)
        : network_number_(network_number), queue_(queue), callbacks_(std::move(callbacks)) {}
    virtual ~Network() = default;

    void attach(int node_index, int node_number, std::optional<Position> position);

    // True once attach() has been called for the node.
    bool is_attached(int node_index) const;

    // Marks a node as powered off; depleted nodes stop participating.
    void set_powered(int node_index, bool powered);

    virtual void start() {}
    virtual void enqueue(Frame f, double t) = 0;

    int network_number() const { return network_number_; }
    const std::vector<Attachment>& attachments() const { return attached_; }
    const NetStats& stats() const { return stats_; }

protected:
    int local_index(int node_index) const;  // -1 when not attached
    void emit_trace(int local, NetTraceState state, double t);
    // Records one successful reception; loss/collision checks already done.
    void deliver_to(const Frame& f, int dst_node, double t);
    void count_offered() { ++stats_.offered; }

    int network_number_;
    sim::EventQueue& queue_;
    NetCallbacks callbacks_;
    std::vector<Attachment> attached_;
    std::vector<NetTraceState> last_trace_;
    NetStats stats_;
    std::uint64_t next_frame_id_ = 1;
};

}  // namespace chronosim::net
