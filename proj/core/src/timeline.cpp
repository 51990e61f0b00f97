#include "mlmc/timeline.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace mlmc::sim {
namespace {

constexpr std::array<const char*, 6> kLevelFill{"#4e79a7", "#f28e2b", "#59a14f", "#e15759",
                                                "#76b7b2", "#edc948"};

void write_svg(const SimReport& r, std::ostream& os) {
  const double width = 800.0, height = 400.0, margin = 40.0;
  const double tmax = r.makespan > 0.0 ? r.makespan : 1.0;
  const double pmax = r.p_max > 0 ? static_cast<double>(r.p_max) : 1.0;
  const double sx = width / tmax, sy = height / pmax;
  os << std::setprecision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width + 2 * margin
     << "\" height=\"" << height + 2 * margin << "\">\n";
  os << "<g id=\"axes\" stroke=\"black\">\n"
     << "<line x1=\"" << margin << "\" y1=\"" << margin + height << "\" x2=\"" << margin + width
     << "\" y2=\"" << margin + height << "\"/>\n"
     << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\""
     << margin + height << "\"/>\n</g>\n";
  os << "<text x=\"" << margin + width / 2 << "\" y=\"" << height + 1.8 * margin
     << "\" text-anchor=\"middle\">time [s] (makespan " << r.makespan << ")</text>\n";
  os << "<text x=\"12\" y=\"" << margin + height / 2
     << "\" transform=\"rotate(-90 12 " << margin + height / 2
     << ")\" text-anchor=\"middle\">processors (" << r.p_max << ")</text>\n";
  os << "<g id=\"samples\" stroke=\"white\" stroke-width=\"0.2\">\n";
  for (const auto& iv : r.timeline) {
    os << "<rect x=\"" << margin + iv.start * sx << "\" y=\""
       << margin + height - static_cast<double>(iv.processor_offset + iv.processors) * sy
       << "\" width=\"" << (iv.end - iv.start) * sx << "\" height=\""
       << static_cast<double>(iv.processors) * sy << "\" fill=\""
       << kLevelFill[static_cast<std::size_t>(iv.level) % kLevelFill.size()] << "\"/>\n";
  }
  os << "</g>\n</svg>\n";
}

void write_csv(const SimReport& r, std::ostream& os) {
  os << "block,processor_offset,processors,level,theta,sample,start,end\n";
  os << std::setprecision(17);
  for (const auto& iv : r.timeline)
    os << iv.block << ',' << iv.processor_offset << ',' << iv.processors << ',' << iv.level << ','
       << iv.theta << ',' << iv.sample << ',' << iv.start << ',' << iv.end << '\n';
}

}  // namespace

void export_timeline(const SimReport& report, TimelineFormat format, std::ostream& os) {
  if (format == TimelineFormat::svg)
    write_svg(report, os);
  else
    write_csv(report, os);
}

void export_timeline(const SimReport& report, TimelineFormat format, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  export_timeline(report, format, f);
  if (!f) throw std::runtime_error("write to " + path + " failed");
}

std::vector<TimelineInterval> parse_timeline_csv(std::istream& is) {
  std::vector<TimelineInterval> out;
  std::string line;
  if (!std::getline(is, line)) return out;  // header
  long lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    TimelineInterval iv;
    if (!(ss >> iv.block >> iv.processor_offset >> iv.processors >> iv.level >> iv.theta >>
          iv.sample >> iv.start >> iv.end))
      throw std::runtime_error("timeline csv: malformed line " + std::to_string(lineno));
    out.push_back(iv);
  }
  return out;
}

bool timeline_consistent(const std::vector<TimelineInterval>& intervals, std::int64_t p_max) {
  std::map<std::int64_t, std::vector<std::pair<double, double>>> per_block;
  std::vector<std::pair<double, std::int64_t>> events;
  for (const auto& iv : intervals) {
    if (iv.end < iv.start) return false;
    per_block[iv.block].emplace_back(iv.start, iv.end);
    events.emplace_back(iv.start, iv.processors);
    events.emplace_back(iv.end, -iv.processors);
  }
  for (auto& [id, v] : per_block) {
    std::sort(v.begin(), v.end());
    for (std::size_t i = 1; i < v.size(); ++i)
      if (v[i].first < v[i - 1].second - 1e-9 * std::max(1.0, v[i - 1].second)) return false;
  }
  // Releases before acquisitions at equal times.
  std::sort(events.begin(), events.end());
  std::int64_t busy = 0;
  for (const auto& [t, d] : events) {
    busy += d;
    if (busy > p_max) return false;
  }
  return true;
}

}  // namespace mlmc::sim
