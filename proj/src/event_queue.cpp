#include "chronosim/event_queue.hpp"

#include <cmath>

namespace chronosim::sim {

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::TaskRelease: return "TaskRelease";
        case EventKind::TimerExpiry: return "TimerExpiry";
        case EventKind::ExecDone: return "ExecDone";
        case EventKind::TxEnd: return "TxEnd";
        case EventKind::TxStart: return "TxStart";
        case EventKind::AckTimeout: return "AckTimeout";
        case EventKind::SlotBoundary: return "SlotBoundary";
        case EventKind::PlantSample: return "PlantSample";
        case EventKind::BatteryDepleted: return "BatteryDepleted";
        case EventKind::Custom: return "Custom";
    }
    return "?";
}

EventId EventQueue::schedule(SimEvent e, EventAction action) {
    if (!(e.fire_time >= now_)) {
        throw PastEventError("event scheduled in the past: fire_time=" +
                             std::to_string(e.fire_time) + " now=" + std::to_string(now_) +
                             " kind=" + to_string(e.kind));
    }
    e.seq = next_seq_++;
    Key key{e.fire_time, static_cast<int>(e.kind), e.seq};
    entries_.emplace(key, Entry{e, std::move(action)});
    live_.emplace(e.seq, key);
    ++scheduled_;
    return e.seq;
}

bool EventQueue::cancel(EventId id) {
    auto it = live_.find(id);
    if (it == live_.end()) return false;
    entries_.erase(it->second);
    live_.erase(it);
    ++cancelled_;
    return true;
}

std::optional<EventQueue::Dispatched> EventQueue::advance() {
    if (entries_.empty()) return std::nullopt;
    auto it = entries_.begin();
    Dispatched out{it->second.event, std::move(it->second.action)};
    live_.erase(it->second.event.seq);
    entries_.erase(it);
    now_ = out.event.fire_time;
    ++dispatched_;
    return out;
}

std::optional<EventQueue::Dispatched> EventQueue::advance_until(double t_end) {
    if (entries_.empty()) return std::nullopt;
    if (entries_.begin()->first.fire_time > t_end) return std::nullopt;
    return advance();
}

}  // namespace chronosim::sim
