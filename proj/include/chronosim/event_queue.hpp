#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>

#include "chronosim/errors.hpp"

namespace chronosim::sim {

// Event kinds in dispatch-rank order for equal fire times: a job released
// exactly at another job's completion must be visible to the scheduler at
// that instant, so releases rank ahead of completions, which rank ahead of
// network activity.
enum class EventKind : int {
    TaskRelease = 0,
    TimerExpiry,
    ExecDone,
    TxEnd,
    TxStart,
    AckTimeout,
    SlotBoundary,
    PlantSample,
    BatteryDepleted,
    Custom,
};

const char* to_string(EventKind k);

struct SimEvent {
    double fire_time = 0.0;
    EventKind kind = EventKind::Custom;
    int target = -1;        // entity id (node/network/plant index), -1 if none
    std::uint64_t seq = 0;  // insertion counter, assigned by the queue
};

using EventId = std::uint64_t;
using EventAction = std::function<void(const SimEvent&)>;

// Time-ordered event queue with a strict total order over live events:
// (fire_time, kind rank, insertion seq). Pop order is therefore fully
// deterministic for any insertion history.
class EventQueue {
public:
    struct Dispatched {
        SimEvent event;
        EventAction action;
    };

    double now() const { return now_; }
    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }

    // Inserts an event; the returned id can be used to cancel it while live.
    // Throws PastEventError if e.fire_time < now().
    EventId schedule(SimEvent e, EventAction action);

    EventId schedule(double fire_time, EventKind kind, int target, EventAction action) {
        return schedule(SimEvent{fire_time, kind, target, 0}, std::move(action));
    }

    // True if the event was live and has been removed; false if it already
    // fired, was cancelled before, or never existed.
    bool cancel(EventId id);

    // Pops the minimal event and advances now() to its fire time.
    // Empty optional signals end of simulation (no events left).
    std::optional<Dispatched> advance();

    // Like advance(), but leaves events with fire_time > t_end untouched.
    std::optional<Dispatched> advance_until(double t_end);

    // Bookkeeping for the conservation check: every scheduled event is
    // eventually dispatched, cancelled, or still pending.
    std::uint64_t scheduled_count() const { return scheduled_; }
    std::uint64_t dispatched_count() const { return dispatched_; }
    std::uint64_t cancelled_count() const { return cancelled_; }

private:
    struct Key {
        double fire_time;
        int rank;
        std::uint64_t seq;

        bool operator<(const Key& o) const {
            if (fire_time != o.fire_time) return fire_time < o.fire_time;
            if (rank != o.rank) return rank < o.rank;
            return seq < o.seq;
        }
    };

    struct Entry {
        SimEvent event;
        EventAction action;
    };

    double now_ = 0.0;
    std::uint64_t next_seq_ = 1;
    std::map<Key, Entry> entries_;
    std::unordered_map<EventId, Key> live_;
    std::uint64_t scheduled_ = 0;
    std::uint64_t dispatched_ = 0;
    std::uint64_t cancelled_ = 0;
};

}  // namespace chronosim::sim
