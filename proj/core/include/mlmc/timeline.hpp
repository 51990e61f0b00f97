#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mlmc/machine_sim.hpp"

namespace mlmc::sim {

enum class TimelineFormat { svg, csv };

// One rectangle (SVG) or row (CSV) per executed sample.
void export_timeline(const SimReport& report, TimelineFormat format, std::ostream& os);
void export_timeline(const SimReport& report, TimelineFormat format, const std::string& path);

// Reads back the CSV written by export_timeline.
std::vector<TimelineInterval> parse_timeline_csv(std::istream& is);

// True when no two intervals of the same block overlap and the processors
// busy at any instant never exceed p_max.
bool timeline_consistent(const std::vector<TimelineInterval>& intervals, std::int64_t p_max);

}  // namespace mlmc::sim
