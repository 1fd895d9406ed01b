#include "chronosim/trace.hpp"

#include <cstdio>
#include <sstream>

#include "chronosim/errors.hpp"

namespace chronosim::scenario {

std::string format_time(double t) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9f", t);
    return buf;
}

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string to_csv(const std::vector<ScheduleRow>& rows) {
    std::string out = "time,node,task,state\n";
    for (const auto& r : rows) {
        out += format_time(r.time) + "," + r.node + "," + r.task + "," + r.state + "\n";
    }
    return out;
}

std::string to_csv(const std::vector<NetworkRow>& rows) {
    std::string out = "time,network,node,state\n";
    for (const auto& r : rows) {
        out += format_time(r.time) + "," + std::to_string(r.network) + "," + r.node + "," +
               r.state + "\n";
    }
    return out;
}

std::string to_csv(const std::vector<ResponseRow>& rows) {
    std::string out = "time,reference,output,control\n";
    for (const auto& r : rows) {
        out += format_time(r.time) + "," + format_value(r.reference) + "," +
               format_value(r.output) + "," + format_value(r.control) + "\n";
    }
    return out;
}

std::string to_csv(const std::vector<EnergyRow>& rows) {
    std::string out = "time,node,remaining_joules\n";
    for (const auto& r : rows) {
        out += format_time(r.time) + "," + r.node + "," + format_value(r.remaining) + "\n";
    }
    return out;
}

std::string to_csv(const std::vector<EventRow>& rows) {
    std::string out = "time,kind,detail\n";
    for (const auto& r : rows) {
        out += format_time(r.time) + "," + r.kind + "," + r.detail + "\n";
    }
    return out;
}

namespace {

std::vector<std::vector<std::string>> split_rows(const std::string& text,
                                                 const std::string& header,
                                                 std::size_t columns, bool detail_tail) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != header) {
        throw MalformedTraceError("expected header '" + header + "'");
    }
    std::vector<std::vector<std::string>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (fields.size() + 1 < columns) {
            auto comma = line.find(',', start);
            if (comma == std::string::npos) break;
            fields.push_back(line.substr(start, comma - start));
            start = comma + 1;
        }
        fields.push_back(line.substr(start));
        if (fields.size() != columns || (!detail_tail && fields.back().find(',') != std::string::npos)) {
            throw MalformedTraceError("bad field count at line " + std::to_string(lineno));
        }
        rows.push_back(std::move(fields));
    }
    return rows;
}

double parse_double(const std::string& s) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw MalformedTraceError("bad numeric field '" + s + "'");
    }
}

}  // namespace

std::vector<ScheduleRow> parse_schedule_csv(const std::string& text) {
    std::vector<ScheduleRow> out;
    for (auto& f : split_rows(text, "time,node,task,state", 4, false)) {
        out.push_back({parse_double(f[0]), f[1], f[2], f[3]});
    }
    return out;
}

std::vector<NetworkRow> parse_network_csv(const std::string& text) {
    std::vector<NetworkRow> out;
    for (auto& f : split_rows(text, "time,network,node,state", 4, false)) {
        out.push_back({parse_double(f[0]), static_cast<int>(parse_double(f[1])), f[2], f[3]});
    }
    return out;
}

std::vector<ResponseRow> parse_response_csv(const std::string& text) {
    std::vector<ResponseRow> out;
    for (auto& f : split_rows(text, "time,reference,output,control", 4, false)) {
        out.push_back({parse_double(f[0]), parse_double(f[1]), parse_double(f[2]),
                       parse_double(f[3])});
    }
    return out;
}

std::vector<EnergyRow> parse_energy_csv(const std::string& text) {
    std::vector<EnergyRow> out;
    for (auto& f : split_rows(text, "time,node,remaining_joules", 3, false)) {
        out.push_back({parse_double(f[0]), f[1], parse_double(f[2])});
    }
    return out;
}

TraceKind detect_trace_kind(const std::string& text) {
    auto eol = text.find('\n');
    std::string header = text.substr(0, eol);
    if (header == "time,node,task,state") return TraceKind::Schedule;
    if (header == "time,network,node,state") return TraceKind::Network;
    if (header == "time,reference,output,control") return TraceKind::Response;
    if (header == "time,node,remaining_joules") return TraceKind::Energy;
    if (header == "time,kind,detail") return TraceKind::Event;
    return TraceKind::Unknown;
}

}  // namespace chronosim::scenario
