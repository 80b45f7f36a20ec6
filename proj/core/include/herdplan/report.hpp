#pragma once

#include <iosfwd>
#include <string>

#include "herdplan/episode.hpp"

namespace herdplan {

/// stepIndex,action,remaining,delivered,pushedThisAction,efficiency,centroidGateDist,groupArea,density,regularity,zeta,components
std::string metricsCsvHeader();
std::string metricsCsvRow(const LogRow& row);
void writeMetricsCsv(std::ostream& out, const RunLog& log);

/// One line per action: index, action, outcome note.
void writeActionsLog(std::ostream& out, const RunLog& log);

/// Frame of one Herd/Push: particles grey, group contour blue, candidate
/// paths pale, executed path yellow with black waypoints, tooltip path red, gate brown.
std::string frameSvg(const Frame& frame, const WorldConfig& world);

/// Plain-text key/value summary. Wall-clock time only when `withTiming`.
void writeSummary(std::ostream& out, const EpisodeResult& result, bool withTiming);

/// Writes metrics.csv, actions.log, summary.txt and frames/frame_NNN.svg into `dir`.
void writeEpisodeOutputs(const std::string& dir, const EpisodeResult& result, const Scenario& scenario,
                         bool withTiming = true);

}  // namespace herdplan
