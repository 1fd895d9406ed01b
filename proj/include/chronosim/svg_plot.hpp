#pragma once

#include <string>
#include <vector>

#include "chronosim/errors.hpp"
#include "chronosim/trace.hpp"

namespace chronosim::scenario {

// Pure renderers: same rows in, byte-identical SVG out. Schedule and network
// traces become stacked step plots using the numeric encoding
// lane_index + {0.0 idle, 0.25 ready/waiting, 0.5 running/sending}; response
// and energy traces become line plots.
std::string render_schedule_svg(const std::vector<ScheduleRow>& rows);
std::string render_network_svg(const std::vector<NetworkRow>& rows);
std::string render_response_svg(const std::vector<ResponseRow>& rows);
std::string render_energy_svg(const std::vector<EnergyRow>& rows);

// Reads each trace file, picks the renderer by header, and writes
// <stem>.svg next to out_dir. Event traces are not plottable and are
// skipped. Returns the written file names. Throws MalformedTraceError for
// unrecognized or broken inputs.
std::vector<std::string> render_plots(const std::vector<std::string>& trace_files,
                                      const std::string& out_dir);

}  // namespace chronosim::scenario
