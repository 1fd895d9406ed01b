#include "chronosim/net.hpp"

#include <cmath>

namespace chronosim::net {

double distance(const Position& a, const Position& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

double tx_duration(int size_bits, double data_rate, double min_frame_bits) {
    return std::max(static_cast<double>(size_bits), min_frame_bits) / data_rate;
}

bool apply_loss(sim::RngStream& stream, double loss_prob) {
    return stream.bernoulli(loss_prob);
}

const char* to_string(NetTraceState s) {
    switch (s) {
        case NetTraceState::Idle: return "IDLE";
        case NetTraceState::Waiting: return "WAITING";
        case NetTraceState::Sending: return "SENDING";
    }
    return "?";
}

void Network::attach(int node_index, int node_number, std::optional<Position> position) {
    attached_.push_back(Attachment{node_index, node_number, position, true});
    last_trace_.push_back(NetTraceState::Idle);
}

bool Network::is_attached(int node_index) const {
    return local_index(node_index) >= 0;
}

void Network::set_powered(int node_index, bool powered) {
    int local = local_index(node_index);
    if (local >= 0) attached_[local].powered = powered;
}

int Network::local_index(int node_index) const {
    for (std::size_t i = 0; i < attached_.size(); ++i) {
        if (attached_[i].node_index == node_index) return static_cast<int>(i);
    }
    return -1;
}

void Network::emit_trace(int local, NetTraceState state, double t) {
    if (local < 0 || state == last_trace_[local]) return;
    last_trace_[local] = state;
    if (callbacks_.on_trace) callbacks_.on_trace(attached_[local].node_index, state, t);
}

void Network::deliver_to(const Frame& f, int dst_node, double t) {
    ++stats_.delivered;
    stats_.delivered_bits += static_cast<std::uint64_t>(f.size_bits);
    stats_.latencies.push_back(t - f.enqueue_time);
    if (callbacks_.on_deliver) callbacks_.on_deliver(f, dst_node, t);
}

}  // namespace chronosim::net
