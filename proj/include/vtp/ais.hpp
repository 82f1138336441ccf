#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vtp/geo.hpp"

namespace vtp::ais {

// Column-name mapping; defaults follow the marinecadastre.gov export.
struct CsvSchema {
  std::string mmsi = "MMSI";
  std::string timestamp = "BaseDateTime";
  std::string lat = "LAT";
  std::string lon = "LON";
  std::string sog = "SOG";
  std::string cog = "COG";
  std::string heading = "Heading";
};

struct AisRecord {
  std::string mmsi;
  std::int64_t t_unix = 0;  // seconds
  double lat = 0.0;
  double lon = 0.0;
  std::optional<double> sog_knots;
  std::optional<double> cog_deg;
  std::optional<double> heading_deg;
};

struct TrajectoryPoint {
  std::string mmsi;
  std::int64_t minute = 0;  // unix minutes, exact boundary
  geo::GeoPoint pos;
  double heading_deg = 0.0;     // derived from displacement, compass
  double speed_knots = 0.0;     // recorded SOG if present, else position-derived
  bool interpolated = false;
  bool heading_defaulted = false;  // no displacement ever seen in the segment
};

struct Frame {
  std::int64_t minute = 0;
  std::vector<TrajectoryPoint> entries;  // sorted by mmsi, unique per mmsi
};

struct PipelineReport {
  std::size_t rows_parsed = 0;
  std::map<std::string, std::size_t> rows_rejected;  // reason -> count
  std::size_t vessels_in = 0;
  std::size_t vessels_out = 0;
  std::size_t points_interpolated = 0;
  std::size_t entries_below_sog = 0;
  std::size_t frames_assembled = 0;
  std::size_t frames_dropped_small = 0;
  std::size_t frames_out = 0;

  std::size_t rejected_total() const;
};

// "YYYY-MM-DDTHH:MM:SS" (T or space separator), UTC.
std::optional<std::int64_t> parse_timestamp(const std::string& text);
std::string format_timestamp(std::int64_t t_unix);

// One record per valid row; bad rows are counted by reason, never fatal.
// Throws SchemaError when a required column (MMSI, BaseDateTime, LAT, LON)
// is missing from the header.
std::vector<AisRecord> parse_csv(std::istream& in, const CsvSchema& schema,
                                 PipelineReport& report);

// Assigns records of one vessel to minute intervals (first record in each
// minute wins), fills 2..5-minute gaps by linear interpolation, and splits
// at longer gaps. Records may arrive unsorted.
std::vector<std::vector<TrajectoryPoint>> resample(std::vector<AisRecord> records,
                                                   PipelineReport* report = nullptr);

std::vector<Frame> assemble_frames(const std::vector<std::vector<TrajectoryPoint>>& segments);

// Drops entries below min_sog, then frames with fewer than min_vessels left.
std::vector<Frame> filter_frames(std::vector<Frame> frames, int min_vessels, double min_sog,
                                 PipelineReport* report = nullptr);

struct PipelineResult {
  std::vector<Frame> frames;
  PipelineReport report;
};

PipelineResult run_pipeline(std::istream& csv, const CsvSchema& schema, int min_vessels = 3,
                            double min_sog = 1.0);

// Newline-delimited frame records; field order is fixed:
// t, iso, vessels[{mmsi, lat, lon, heading, interp}].
void write_frames_jsonl(std::ostream& out, const std::vector<Frame>& frames);
std::vector<Frame> read_frames_jsonl(std::istream& in);

}  // namespace vtp::ais
