#include "chronosim/net_wireless.hpp"

#include <algorithm>
#include <cmath>

#include "chronosim/errors.hpp"

namespace chronosim::net {

void WirelessConfig::validate() const {
    if (data_rate <= 0.0) throw ValidationError("BadParameter", "data_rate must be > 0");
    if (min_frame <= 0.0) throw ValidationError("BadParameter", "min_frame must be > 0");
    if (loss_prob < 0.0 || loss_prob > 1.0) {
        throw ValidationError("BadParameter", "loss_prob must be in [0,1]");
    }
    if (transmit_power <= 0.0) throw ValidationError("BadParameter", "transmit_power must be > 0");
    if (signal_threshold <= 0.0) {
        throw ValidationError("BadParameter", "signal_threshold must be > 0");
    }
    if (pathloss_exp <= 0.0) throw ValidationError("BadParameter", "pathloss_exp must be > 0");
    if (ack_timeout <= 0.0) throw ValidationError("BadParameter", "ack_timeout must be > 0");
    if (retry_limit < 0) throw ValidationError("BadParameter", "retry_limit must be >= 0");
    if (cw_min_slots < 1) throw ValidationError("BadParameter", "cw_min_slots must be >= 1");
    if (slot_time <= 0.0) throw ValidationError("BadParameter", "slot_time must be > 0");
}

void UltrasoundConfig::validate() const {
    if (ping_length <= 0.0) throw ValidationError("BadParameter", "ping_length must be > 0");
    if (speed_of_sound <= 0.0) {
        throw ValidationError("BadParameter", "speed_of_sound must be > 0");
    }
}

double received_power(double p_tx_mw, double d_meters, double alpha) {
    return p_tx_mw / std::pow(std::max(d_meters, 1.0), alpha);
}

bool in_range(const Position& a, const Position& b, const WirelessConfig& cfg) {
    return received_power(cfg.transmit_power, distance(a, b), cfg.pathloss_exp) >=
           cfg.signal_threshold;
}

double tx_energy(double p_tx_mw, double duration_s) {
    return p_tx_mw * 1e-3 * duration_s;
}

const char* to_string(ReceptionOutcome o) {
    switch (o) {
        case ReceptionOutcome::Ok: return "ok";
        case ReceptionOutcome::Corrupted: return "corrupted";
        case ReceptionOutcome::OutOfRange: return "out_of_range";
        case ReceptionOutcome::Dropped: return "dropped";
    }
    return "?";
}

WlanNetwork::WlanNetwork(WirelessConfig cfg, sim::EventQueue& queue, std::uint64_t root_seed,
                         NetCallbacks callbacks)
    : Network(cfg.network_number, queue, std::move(callbacks)),
      cfg_(cfg),
      loss_rng_(root_seed, "net" + std::to_string(cfg.network_number) + ".loss"),
      backoff_rng_(root_seed, "net" + std::to_string(cfg.network_number) + ".backoff") {}

bool WlanNetwork::audible(int src_local, int rcv_local) const {
    const auto& src = attached_[src_local];
    const auto& rcv = attached_[rcv_local];
    if (!src.position || !rcv.position) {
        throw MissingPositionError("wireless node without position");
    }
    if (src_local == rcv_local) return true;  // own transmission saturates the radio
    return received_power(cfg_.transmit_power, distance(*src.position, *rcv.position),
                          cfg_.pathloss_exp) >= cfg_.signal_threshold;
}

bool WlanNetwork::busy_at(int local, double t) const {
    for (const TxRecord& tx : ongoing_) {
        if (tx.end <= t) continue;
        if (tx.local == local) return true;
        if (audible(tx.local, local)) return true;
    }
    return false;
}

void WlanNetwork::enqueue(Frame f, double t) {
    if (senders_.size() < attached_.size()) senders_.resize(attached_.size());
    int local = local_index(f.src);
    count_offered();
    f.id = next_frame_id_++;
    Sender& s = senders_[local];
    s.queue.push_back(f);
    emit_trace(local, NetTraceState::Waiting, t);
    if (s.phase == Phase::Idle) begin_attempt(local, t);
}

void WlanNetwork::begin_attempt(int local, double t) {
    Sender& s = senders_[local];
    if (s.queue.empty()) {
        s.phase = Phase::Idle;
        emit_trace(local, NetTraceState::Idle, t);
        return;
    }
    if (!attached_[local].powered) {
        ++stats_.discarded;
        s.queue.clear();
        s.phase = Phase::Idle;
        emit_trace(local, NetTraceState::Idle, t);
        return;
    }
    if (busy_at(local, t)) {
        s.phase = Phase::WaitIdle;
        emit_trace(local, NetTraceState::Waiting, t);
        return;
    }
    int exponent = std::min(s.retries, 5);
    std::uint64_t window = static_cast<std::uint64_t>(cfg_.cw_min_slots) << exponent;
    std::uint64_t k = backoff_rng_.uniform_int(window);
    s.phase = Phase::Backoff;
    queue_.schedule(t + static_cast<double>(k) * cfg_.slot_time, sim::EventKind::TimerExpiry,
                    network_number_,
                    [this, local](const sim::SimEvent& ev) { on_backoff_expiry(local, ev.fire_time); });
}

void WlanNetwork::on_backoff_expiry(int local, double t) {
    Sender& s = senders_[local];
    if (s.queue.empty()) return;
    if (busy_at(local, t)) {
        s.phase = Phase::WaitIdle;
        return;
    }
    start_tx(local, t);
}

void WlanNetwork::start_tx(int local, double t) {
    Sender& s = senders_[local];
    if (!attached_[local].powered) {
        begin_attempt(local, t);
        return;
    }
    TxRecord tx;
    tx.tx_id = next_tx_id_++;
    tx.local = local;
    tx.frame = s.queue.front();
    tx.start = t;
    tx.duration = tx_duration(tx.frame.size_bits, cfg_.data_rate, cfg_.min_frame);
    tx.end = t + tx.duration;
    tx.frame.tx_start = tx.start;
    tx.frame.tx_end = tx.end;
    tx.is_ack = false;
    for (TxRecord& other : ongoing_) {
        if (other.end > tx.start) {
            other.overlap_srcs.push_back(local);
            tx.overlap_srcs.push_back(other.local);
        }
    }
    ongoing_.push_back(tx);
    s.phase = Phase::Transmitting;
    s.awaiting_frame_id = tx.frame.id;
    emit_trace(local, NetTraceState::Sending, t);
    std::uint64_t id = tx.tx_id;
    queue_.schedule(tx.end, sim::EventKind::TxEnd, network_number_,
                    [this, id](const sim::SimEvent& ev) {
                        for (std::size_t i = 0; i < ongoing_.size(); ++i) {
                            if (ongoing_[i].tx_id == id) {
                                on_tx_end(i, ev.fire_time);
                                return;
                            }
                        }
                    });
}

ReceptionOutcome WlanNetwork::outcome_at(const TxRecord& tx, int rcv_local, bool lossy) {
    const auto& src = attached_[tx.local];
    const auto& rcv = attached_[rcv_local];
    if (received_power(cfg_.transmit_power, distance(*src.position, *rcv.position),
                       cfg_.pathloss_exp) < cfg_.signal_threshold) {
        return ReceptionOutcome::OutOfRange;
    }
    for (int other : tx.overlap_srcs) {
        if (audible(other, rcv_local)) return ReceptionOutcome::Corrupted;
    }
    if (lossy && apply_loss(loss_rng_, cfg_.loss_prob)) return ReceptionOutcome::Dropped;
    return ReceptionOutcome::Ok;
}

void WlanNetwork::on_tx_end(std::size_t tx_slot, double t) {
    TxRecord tx = ongoing_[tx_slot];
    ongoing_.erase(ongoing_.begin() + static_cast<std::ptrdiff_t>(tx_slot));
    if (callbacks_.on_energy) {
        callbacks_.on_energy(attached_[tx.local].node_index,
                             tx_energy(cfg_.transmit_power, tx.duration), t);
    }
    if (tx.is_ack) {
        finish_ack_tx(std::move(tx), t);
    } else {
        finish_data_tx(std::move(tx), t);
    }
    wake_waiters(t);
}

void WlanNetwork::finish_data_tx(TxRecord tx, double t) {
    int local = tx.local;
    Sender& s = senders_[local];

    if (tx.frame.dst == kBroadcast) {
        for (std::size_t i = 0; i < attached_.size(); ++i) {
            if (static_cast<int>(i) == local || !attached_[i].powered) continue;
            if (outcome_at(tx, static_cast<int>(i), true) == ReceptionOutcome::Ok) {
                deliver_to(tx.frame, attached_[i].node_index, t);
            }
        }
        succeed(local, t);  // broadcasts are unacknowledged
        return;
    }

    int dst_local = local_index(tx.frame.dst);
    if (dst_local >= 0 && attached_[dst_local].powered) {
        ReceptionOutcome outcome = outcome_at(tx, dst_local, true);
        if (outcome == ReceptionOutcome::Ok) {
            deliver_to(tx.frame, tx.frame.dst, t);
            // Ack transmits immediately, without contention or backoff.
            TxRecord ack;
            ack.tx_id = next_tx_id_++;
            ack.local = dst_local;
            ack.frame.src = tx.frame.dst;
            ack.frame.dst = tx.frame.src;
            ack.frame.size_bits = static_cast<int>(cfg_.min_frame);
            ack.frame.id = tx.frame.id;  // ack carries the data frame id
            ack.start = t;
            ack.duration = cfg_.min_frame / cfg_.data_rate;
            ack.end = t + ack.duration;
            ack.is_ack = true;
            for (TxRecord& other : ongoing_) {
                if (other.end > ack.start) {
                    other.overlap_srcs.push_back(dst_local);
                    ack.overlap_srcs.push_back(other.local);
                }
            }
            ongoing_.push_back(ack);
            std::uint64_t id = ack.tx_id;
            queue_.schedule(ack.end, sim::EventKind::TxEnd, network_number_,
                            [this, id](const sim::SimEvent& ev) {
                                for (std::size_t i = 0; i < ongoing_.size(); ++i) {
                                    if (ongoing_[i].tx_id == id) {
                                        on_tx_end(i, ev.fire_time);
                                        return;
                                    }
                                }
                            });
        } else if (callbacks_.on_event) {
            callbacks_.on_event(std::string("rx_") + to_string(outcome),
                                "net " + std::to_string(cfg_.network_number) + " frame " +
                                    std::to_string(tx.frame.id),
                                t);
        }
    }

    s.phase = Phase::AwaitAck;
    emit_trace(local, NetTraceState::Waiting, t);
    s.ack_timeout_event =
        queue_.schedule(t + cfg_.ack_timeout, sim::EventKind::AckTimeout, network_number_,
                        [this, local](const sim::SimEvent& ev) {
                            on_ack_timeout(local, ev.fire_time);
                        });
}

void WlanNetwork::finish_ack_tx(TxRecord ack, double t) {
    int data_sender = local_index(ack.frame.dst);
    if (data_sender < 0) return;
    Sender& s = senders_[data_sender];
    if (s.phase != Phase::AwaitAck || s.awaiting_frame_id != ack.frame.id) return;

    ReceptionOutcome outcome = outcome_at(ack, data_sender, cfg_.ack_lossy);
    if (outcome != ReceptionOutcome::Ok) return;  // sender will time out and retry

    queue_.cancel(s.ack_timeout_event);
    succeed(data_sender, t);
}

void WlanNetwork::on_ack_timeout(int local, double t) {
    Sender& s = senders_[local];
    if (s.phase != Phase::AwaitAck) return;
    ++s.retries;
    if (s.retries > cfg_.retry_limit) {
        give_up(local, t);
        return;
    }
    begin_attempt(local, t);
}

void WlanNetwork::succeed(int local, double t) {
    Sender& s = senders_[local];
    s.queue.pop_front();
    s.retries = 0;
    s.phase = Phase::Idle;
    begin_attempt(local, t);
}

void WlanNetwork::give_up(int local, double t) {
    Sender& s = senders_[local];
    ++stats_.discarded;
    if (callbacks_.on_event) {
        callbacks_.on_event("discard_retry",
                            "net " + std::to_string(cfg_.network_number) + " frame " +
                                std::to_string(s.queue.front().id) + " exceeded retry limit",
                            t);
    }
    s.queue.pop_front();
    s.retries = 0;
    s.phase = Phase::Idle;
    begin_attempt(local, t);
}

void WlanNetwork::wake_waiters(double t) {
    for (std::size_t i = 0; i < senders_.size(); ++i) {
        if (senders_[i].phase == Phase::WaitIdle && !busy_at(static_cast<int>(i), t)) {
            senders_[i].phase = Phase::Idle;
            begin_attempt(static_cast<int>(i), t);
        }
    }
}

// ------------------------------------------------------------- ultrasound

UltrasoundNetwork::UltrasoundNetwork(UltrasoundConfig cfg, sim::EventQueue& queue,
                                     NetCallbacks callbacks)
    : Network(cfg.network_number, queue, std::move(callbacks)), cfg_(cfg) {}

void UltrasoundNetwork::enqueue(Frame f, double t) {
    count_offered();
    f.id = next_frame_id_++;
    f.tx_start = t;
    int src_local = local_index(f.src);
    const auto& src = attached_[src_local];
    if (!src.position) throw MissingPositionError("ultrasound node without position");
    for (const Attachment& a : attached_) {
        if (a.node_index == f.src) continue;
        if (!a.position) throw MissingPositionError("ultrasound node without position");
        double d = distance(*src.position, *a.position);
        if (d > cfg_.ping_length) continue;
        double arrival = t + d / cfg_.speed_of_sound;
        Frame copy = f;
        copy.tx_end = arrival;
        int dst = a.node_index;
        queue_.schedule(arrival, sim::EventKind::TxEnd, network_number_,
                        [this, copy, dst](const sim::SimEvent& ev) {
                            deliver_to(copy, dst, ev.fire_time);
                        });
    }
}

}  // namespace chronosim::net
