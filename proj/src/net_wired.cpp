#include "chronosim/net_wired.hpp"

#include <algorithm>
#include <cmath>

#include "chronosim/errors.hpp"

namespace chronosim::net {

void NetworkConfig::validate() const {
    if (data_rate <= 0.0) throw ValidationError("BadParameter", "data_rate must be > 0");
    if (min_frame <= 0.0) throw ValidationError("BadParameter", "min_frame must be > 0");
    if (loss_prob < 0.0 || loss_prob > 1.0) {
        throw ValidationError("BadParameter", "loss_prob must be in [0,1]");
    }
    if (net_type == WiredType::Tdma && tdma_slot <= 0.0) {
        throw ValidationError("BadParameter", "tdma_slot must be > 0");
    }
}

int tdma_owner(double t, double tdma_slot, int node_count) {
    auto slot = static_cast<long long>(std::floor(t / tdma_slot));
    return static_cast<int>(slot % node_count);
}

std::size_t can_arbitrate(const std::vector<Frame>& pending) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < pending.size(); ++i) {
        if (pending[i].can_id < pending[best].can_id) best = i;
    }
    return best;
}

// ---------------------------------------------------------------- CSMA/CD

CsmaCdNetwork::CsmaCdNetwork(NetworkConfig cfg, sim::EventQueue& queue, std::uint64_t root_seed,
                             NetCallbacks callbacks)
    : Network(cfg.network_number, queue, std::move(callbacks)),
      cfg_(cfg),
      loss_rng_(root_seed, "net" + std::to_string(cfg.network_number) + ".loss"),
      backoff_rng_(root_seed, "net" + std::to_string(cfg.network_number) + ".backoff") {}

bool CsmaCdNetwork::medium_engaged(double t) const {
    if (tx_node_) return true;
    return collision_ && t < collision_until_;
}

void CsmaCdNetwork::enqueue(Frame f, double t) {
    int local = local_index(f.src);
    if (senders_.size() < attached_.size()) senders_.resize(attached_.size());
    count_offered();
    f.id = next_frame_id_++;
    Sender& s = senders_[local];
    s.queue.push_back(f);
    emit_trace(local, NetTraceState::Waiting, t);
    if (s.queue.size() == 1 && !s.backing_off) attempt(local, t);
}

void CsmaCdNetwork::attempt(int local, double t) {
    Sender& s = senders_[local];
    if (s.queue.empty()) return;
    if (medium_engaged(t)) {
        if (std::find(waiting_.begin(), waiting_.end(), local) == waiting_.end()) {
            waiting_.insert(std::lower_bound(waiting_.begin(), waiting_.end(), local), local);
        }
        emit_trace(local, NetTraceState::Waiting, t);
        return;
    }
    queue_.schedule(t, sim::EventKind::TxStart, network_number_,
                    [this, local](const sim::SimEvent& ev) { on_tx_start(local, ev.fire_time); });
}

void CsmaCdNetwork::on_tx_start(int local, double t) {
    Sender& s = senders_[local];
    if (s.queue.empty()) return;

    if (!medium_engaged(t)) {
        tx_node_ = local;
        tx_frame_ = s.queue.front();
        tx_frame_.tx_start = t;
        tx_begin_ = t;
        double dur = tx_duration(tx_frame_.size_bits, cfg_.data_rate, cfg_.min_frame);
        tx_frame_.tx_end = t + dur;
        tx_end_event_ = queue_.schedule(t + dur, sim::EventKind::TxEnd, network_number_,
                                        [this](const sim::SimEvent& ev) { on_tx_end(ev.fire_time); });
        emit_trace(local, NetTraceState::Sending, t);
        return;
    }

    if (tx_begin_ == t) {
        // Another start at this exact instant: everyone involved collides.
        if (tx_node_) {
            int other = *tx_node_;
            queue_.cancel(tx_end_event_);
            tx_node_.reset();
            collision_ = true;
            collision_until_ = t + slot_time();
            queue_.schedule(collision_until_, sim::EventKind::TimerExpiry, network_number_,
                            [this](const sim::SimEvent& ev) { on_collision_end(ev.fire_time); });
            if (callbacks_.on_event) {
                callbacks_.on_event("collision",
                                    "net " + std::to_string(cfg_.network_number) + " at t=" +
                                        std::to_string(t),
                                    t);
            }
            handle_collision_participant(other, t);
        }
        handle_collision_participant(local, t);
        return;
    }

    // Medium became busy earlier in this instant cascade: defer.
    attempt(local, t);
}

void CsmaCdNetwork::handle_collision_participant(int local, double t) {
    Sender& s = senders_[local];
    emit_trace(local, NetTraceState::Waiting, t);
    ++s.attempts;
    if (s.attempts >= 16) {
        ++stats_.discarded;
        if (callbacks_.on_event) {
            callbacks_.on_event("discard_attempts",
                                "frame from node " + std::to_string(attached_[local].node_index) +
                                    " dropped after 16 attempts",
                                t);
        }
        s.queue.pop_front();
        s.attempts = 0;
        if (!s.queue.empty()) {
            s.backing_off = true;
            queue_.schedule(collision_until_, sim::EventKind::TimerExpiry, network_number_,
                            [this, local](const sim::SimEvent& ev) {
                                senders_[local].backing_off = false;
                                attempt(local, ev.fire_time);
                            });
        } else {
            emit_trace(local, NetTraceState::Idle, t);
        }
        return;
    }
    int exponent = std::min(s.attempts, 10);
    std::uint64_t k = backoff_rng_.uniform_int(1ull << exponent);
    double retry_at = collision_until_ + static_cast<double>(k) * slot_time();
    s.backing_off = true;
    queue_.schedule(retry_at, sim::EventKind::TimerExpiry, network_number_,
                    [this, local](const sim::SimEvent& ev) {
                        senders_[local].backing_off = false;
                        attempt(local, ev.fire_time);
                    });
}

void CsmaCdNetwork::on_tx_end(double t) {
    int local = *tx_node_;
    Sender& s = senders_[local];
    Frame f = tx_frame_;
    tx_node_.reset();
    tx_begin_ = -1.0;
    s.queue.pop_front();
    s.attempts = 0;

    if (apply_loss(loss_rng_, cfg_.loss_prob)) {
        ++stats_.dropped_loss;
        if (callbacks_.on_event) {
            callbacks_.on_event("drop_loss", "net " + std::to_string(cfg_.network_number) +
                                                 " frame " + std::to_string(f.id),
                                t);
        }
    } else if (f.dst == kBroadcast) {
        for (const Attachment& a : attached_) {
            if (a.node_index != f.src) deliver_to(f, a.node_index, t);
        }
    } else {
        deliver_to(f, f.dst, t);
    }

    emit_trace(local, s.queue.empty() ? NetTraceState::Idle : NetTraceState::Waiting, t);

    // Medium is idle: deferred senders (and this node's backlog) re-attempt
    // now; simultaneous re-attempts collide, as on a real bus.
    std::vector<int> wake = waiting_;
    waiting_.clear();
    for (int w : wake) attempt(w, t);
    if (!s.queue.empty()) attempt(local, t);
}

void CsmaCdNetwork::on_collision_end(double t) {
    if (collision_ && t >= collision_until_) {
        collision_ = false;
        tx_begin_ = -1.0;
    }
    std::vector<int> wake = waiting_;
    waiting_.clear();
    for (int w : wake) attempt(w, t);
}

// -------------------------------------------------------------------- CAN

CanNetwork::CanNetwork(NetworkConfig cfg, sim::EventQueue& queue, std::uint64_t root_seed,
                       NetCallbacks callbacks)
    : Network(cfg.network_number, queue, std::move(callbacks)),
      cfg_(cfg),
      loss_rng_(root_seed, "net" + std::to_string(cfg.network_number) + ".loss") {}

void CanNetwork::enqueue(Frame f, double t) {
    if (queues_.size() < attached_.size()) queues_.resize(attached_.size());
    int local = local_index(f.src);
    count_offered();
    f.id = next_frame_id_++;
    queues_[local].push_back(f);
    emit_trace(local, NetTraceState::Waiting, t);
    request_arbitration(t);
}

void CanNetwork::request_arbitration(double t) {
    if (tx_node_ || arbitration_pending_) return;
    arbitration_pending_ = true;
    queue_.schedule(t, sim::EventKind::TxStart, network_number_,
                    [this](const sim::SimEvent& ev) {
                        arbitration_pending_ = false;
                        arbitrate(ev.fire_time);
                    });
}

void CanNetwork::arbitrate(double t) {
    if (tx_node_) return;  // non-preemptive
    int winner = -1;
    for (std::size_t i = 0; i < queues_.size(); ++i) {
        if (queues_[i].empty()) continue;
        if (winner < 0 || queues_[i].front().can_id < queues_[winner].front().can_id) {
            winner = static_cast<int>(i);
        }
    }
    if (winner < 0) return;
    tx_node_ = winner;
    tx_frame_ = queues_[winner].front();
    tx_frame_.tx_start = t;
    double dur = tx_duration(tx_frame_.size_bits, cfg_.data_rate, cfg_.min_frame);
    tx_frame_.tx_end = t + dur;
    queue_.schedule(t + dur, sim::EventKind::TxEnd, network_number_,
                    [this](const sim::SimEvent& ev) { on_tx_end(ev.fire_time); });
    emit_trace(winner, NetTraceState::Sending, t);
}

void CanNetwork::on_tx_end(double t) {
    int local = *tx_node_;
    const Frame f = tx_frame_;
    tx_node_.reset();
    queues_[local].pop_front();

    if (apply_loss(loss_rng_, cfg_.loss_prob)) {
        ++stats_.dropped_loss;
        if (callbacks_.on_event) {
            callbacks_.on_event("drop_loss", "net " + std::to_string(cfg_.network_number) +
                                                 " frame " + std::to_string(f.id),
                                t);
        }
    } else if (f.dst == kBroadcast) {
        for (const Attachment& a : attached_) {
            if (a.node_index != f.src) deliver_to(f, a.node_index, t);
        }
    } else {
        deliver_to(f, f.dst, t);
    }

    emit_trace(local, queues_[local].empty() ? NetTraceState::Idle : NetTraceState::Waiting, t);
    arbitrate(t);
}

// ------------------------------------------------------------------- TDMA

TdmaNetwork::TdmaNetwork(NetworkConfig cfg, sim::EventQueue& queue, std::uint64_t root_seed,
                         NetCallbacks callbacks)
    : Network(cfg.network_number, queue, std::move(callbacks)),
      cfg_(cfg),
      loss_rng_(root_seed, "net" + std::to_string(cfg.network_number) + ".loss") {}

void TdmaNetwork::start() {
    queues_.resize(attached_.size());
    planned_.assign(attached_.size(), false);
    // Slot ownership ranks follow ascending node_number.
    std::vector<int> order(attached_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [this](int a, int b) {
        return attached_[a].node_number < attached_[b].node_number;
    });
    slot_rank_.assign(attached_.size(), 0);
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        slot_rank_[order[rank]] = static_cast<int>(rank);
    }
}

void TdmaNetwork::enqueue(Frame f, double t) {
    if (queues_.empty()) start();
    int local = local_index(f.src);
    count_offered();
    f.id = next_frame_id_++;
    queues_[local].push_back(f);
    emit_trace(local, NetTraceState::Waiting, t);
    plan(local, t);
}

void TdmaNetwork::plan(int local, double t) {
    if (planned_[local] || queues_[local].empty()) return;
    const Frame& f = queues_[local].front();
    double dur = tx_duration(f.size_bits, cfg_.data_rate, cfg_.min_frame);
    if (dur > cfg_.tdma_slot) {
        ++stats_.discarded;
        if (callbacks_.on_event) {
            callbacks_.on_event("discard_oversize",
                                "frame " + std::to_string(f.id) + " does not fit a TDMA slot", t);
        }
        queues_[local].pop_front();
        if (queues_[local].empty()) emit_trace(local, NetTraceState::Idle, t);
        plan(local, t);
        return;
    }
    const int n = static_cast<int>(attached_.size());
    const int rank = slot_rank_[local];
    auto slot = static_cast<long long>(std::floor(t / cfg_.tdma_slot));
    long long owned = slot - (slot % n) + rank;
    if (owned < slot) owned += n;
    for (;; owned += n) {
        double slot_start = static_cast<double>(owned) * cfg_.tdma_slot;
        double begin = std::max(t, slot_start);
        if (begin + dur <= static_cast<double>(owned + 1) * cfg_.tdma_slot) {
            planned_[local] = true;
            queue_.schedule(begin, sim::EventKind::TxStart, network_number_,
                            [this, local](const sim::SimEvent& ev) {
                                on_tx_start(local, ev.fire_time);
                            });
            return;
        }
    }
}

void TdmaNetwork::on_tx_start(int local, double t) {
    planned_[local] = false;
    if (queues_[local].empty()) return;
    Frame& f = queues_[local].front();
    f.tx_start = t;
    double dur = tx_duration(f.size_bits, cfg_.data_rate, cfg_.min_frame);
    f.tx_end = t + dur;
    tx_node_ = local;
    queue_.schedule(t + dur, sim::EventKind::TxEnd, network_number_,
                    [this, local](const sim::SimEvent& ev) { on_tx_end(local, ev.fire_time); });
    emit_trace(local, NetTraceState::Sending, t);
}

void TdmaNetwork::on_tx_end(int local, double t) {
    Frame f = queues_[local].front();
    queues_[local].pop_front();
    tx_node_.reset();

    if (apply_loss(loss_rng_, cfg_.loss_prob)) {
        ++stats_.dropped_loss;
        if (callbacks_.on_event) {
            callbacks_.on_event("drop_loss", "net " + std::to_string(cfg_.network_number) +
                                                 " frame " + std::to_string(f.id),
                                t);
        }
    } else if (f.dst == kBroadcast) {
        for (const Attachment& a : attached_) {
            if (a.node_index != f.src) deliver_to(f, a.node_index, t);
        }
    } else {
        deliver_to(f, f.dst, t);
    }

    emit_trace(local, queues_[local].empty() ? NetTraceState::Idle : NetTraceState::Waiting, t);
    plan(local, t);
}

std::unique_ptr<Network> make_wired_network(const NetworkConfig& cfg, sim::EventQueue& queue,
                                            std::uint64_t root_seed, NetCallbacks callbacks) {
    cfg.validate();
    switch (cfg.net_type) {
        case WiredType::CsmaCd:
            return std::make_unique<CsmaCdNetwork>(cfg, queue, root_seed, std::move(callbacks));
        case WiredType::Can:
            return std::make_unique<CanNetwork>(cfg, queue, root_seed, std::move(callbacks));
        case WiredType::Tdma:
            return std::make_unique<TdmaNetwork>(cfg, queue, root_seed, std::move(callbacks));
    }
    throw ValidationError("BadParameter", "unknown wired network type");
}

}  // namespace chronosim::net
