#pragma once

#include <map>
#include <string>
#include <vector>

namespace chronosim::scenario {

// Trace rows mirror the CSV schemas one to one. Times are printed with nine
// decimal digits and '\n' line endings so byte-exact golden comparisons are
// possible.
struct ScheduleRow {
    double time;
    std::string node;
    std::string task;
    std::string state;  // IDLE | READY | RUNNING
};

struct NetworkRow {
    double time;
    int network;
    std::string node;
    std::string state;  // IDLE | WAITING | SENDING
};

struct ResponseRow {
    double time;
    double reference;
    double output;
    double control;
};

struct EnergyRow {
    double time;
    std::string node;
    double remaining;  // joules
};

struct EventRow {
    double time;
    std::string kind;
    std::string detail;
};

struct TraceSet {
    std::vector<ScheduleRow> schedule;
    std::vector<NetworkRow> network;
    std::map<std::string, std::vector<ResponseRow>> response;  // per plant
    std::vector<EnergyRow> energy;
    std::vector<EventRow> events;
};

std::string format_time(double t);   // fixed, 9 decimals
std::string format_value(double v);  // %.9g

std::string to_csv(const std::vector<ScheduleRow>& rows);
std::string to_csv(const std::vector<NetworkRow>& rows);
std::string to_csv(const std::vector<ResponseRow>& rows);
std::string to_csv(const std::vector<EnergyRow>& rows);
std::string to_csv(const std::vector<EventRow>& rows);

// Parsers for the plot subcommand; throw MalformedTraceError on bad input.
std::vector<ScheduleRow> parse_schedule_csv(const std::string& text);
std::vector<NetworkRow> parse_network_csv(const std::string& text);
std::vector<ResponseRow> parse_response_csv(const std::string& text);
std::vector<EnergyRow> parse_energy_csv(const std::string& text);

enum class TraceKind { Schedule, Network, Response, Energy, Event, Unknown };

// Identifies a trace file by its header line.
TraceKind detect_trace_kind(const std::string& text);

}  // namespace chronosim::scenario
