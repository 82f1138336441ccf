#include "vtp/ais.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "vtp/errors.hpp"

namespace vtp::ais {

namespace {

// days since 1970-01-01 for a civil date (Howard Hinnant's algorithm)
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y = static_cast<int>(yy + (m <= 2));
}

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

std::optional<double> parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin) return std::nullopt;
  while (*end == ' ' || *end == '\t') ++end;
  if (*end != '\0') return std::nullopt;
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

constexpr std::int64_t kInterpMaxGapMin = 5;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if (a % b != 0 && ((a < 0) != (b < 0))) --q;
  return q;
}

double derived_speed_knots(const geo::GeoPoint& a, const geo::GeoPoint& b, double minutes) {
  return geo::equirect_distance_nmi(a, b) * (60.0 / minutes);
}

}  // namespace

std::size_t PipelineReport::rejected_total() const {
  std::size_t n = 0;
  for (const auto& [reason, count] : rows_rejected) n += count;
  return n;
}

std::optional<std::int64_t> parse_timestamp(const std::string& text) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  char sep = 0;
  if (std::sscanf(text.c_str(), "%d-%d-%d%c%d:%d:%d", &y, &mo, &d, &sep, &h, &mi, &s) != 7) {
    return std::nullopt;
  }
  if (sep != 'T' && sep != ' ') return std::nullopt;
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 ||
      s > 60) {
    return std::nullopt;
  }
  return days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + s;
}

std::string format_timestamp(std::int64_t t_unix) {
  int y = 0, mo = 0, d = 0;
  civil_from_days(floor_div(t_unix, 86400), y, mo, d);
  const std::int64_t sod = t_unix - floor_div(t_unix, 86400) * 86400;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d", y, mo, d,
                static_cast<int>(sod / 3600), static_cast<int>((sod / 60) % 60),
                static_cast<int>(sod % 60));
  return buf;
}

std::vector<AisRecord> parse_csv(std::istream& in, const CsvSchema& schema,
                                 PipelineReport& report) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("csv: empty input, no header row");
  const auto header = split_csv_row(line);

  auto find_col = [&](const std::string& name) -> int {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
  };

  const int c_mmsi = find_col(schema.mmsi);
  const int c_time = find_col(schema.timestamp);
  const int c_lat = find_col(schema.lat);
  const int c_lon = find_col(schema.lon);
  const int c_sog = find_col(schema.sog);
  const int c_cog = find_col(schema.cog);
  const int c_hdg = find_col(schema.heading);

  std::string missing;
  for (const auto& [col, name] : {std::pair{c_mmsi, schema.mmsi}, {c_time, schema.timestamp},
                                  {c_lat, schema.lat}, {c_lon, schema.lon}}) {
    if (col < 0) missing += (missing.empty() ? "" : ", ") + name;
  }
  if (!missing.empty()) throw SchemaError("csv: missing required columns: " + missing);

  auto field = [](const std::vector<std::string>& row, int col) -> std::optional<std::string> {
    if (col < 0 || static_cast<std::size_t>(col) >= row.size()) return std::nullopt;
    return row[static_cast<std::size_t>(col)];
  };

  std::vector<AisRecord> records;
  auto reject = [&](const std::string& reason) { ++report.rows_rejected[reason]; };

  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto row = split_csv_row(line);

    AisRecord rec;
    const auto mmsi = field(row, c_mmsi);
    const auto time_text = field(row, c_time);
    const auto lat_text = field(row, c_lat);
    const auto lon_text = field(row, c_lon);
    if (!mmsi || !time_text || !lat_text || !lon_text) {
      reject("missing field");
      continue;
    }
    if (mmsi->empty()) {
      reject("empty mmsi");
      continue;
    }
    const auto ts = parse_timestamp(*time_text);
    if (!ts) {
      reject("bad timestamp");
      continue;
    }
    const auto lat = parse_number(*lat_text);
    const auto lon = parse_number(*lon_text);
    if (!lat) {
      reject("bad lat");
      continue;
    }
    if (!lon) {
      reject("bad lon");
      continue;
    }
    if (*lat < -90.0 || *lat > 90.0) {
      reject("lat out of range");
      continue;
    }
    if (*lon < -180.0 || *lon > 180.0) {
      reject("lon out of range");
      continue;
    }

    rec.mmsi = *mmsi;
    rec.t_unix = *ts;
    rec.lat = *lat;
    rec.lon = *lon;
    if (const auto f = field(row, c_sog)) rec.sog_knots = parse_number(*f);
    if (const auto f = field(row, c_cog)) rec.cog_deg = parse_number(*f);
    if (const auto f = field(row, c_hdg)) rec.heading_deg = parse_number(*f);

    ++report.rows_parsed;
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<std::vector<TrajectoryPoint>> resample(std::vector<AisRecord> records,
                                                   PipelineReport* report) {
  std::vector<std::vector<TrajectoryPoint>> segments;
  if (records.empty()) return segments;

  std::stable_sort(records.begin(), records.end(),
                   [](const AisRecord& a, const AisRecord& b) { return a.t_unix < b.t_unix; });

  // Each raw timestamp belongs to the minute interval containing it; the
  // record closest to the interval start wins among duplicates (earliest on
  // ties), which after sorting is simply the first record of each minute.
  struct MinutePoint {
    std::int64_t minute;
    geo::GeoPoint pos;
    std::optional<double> sog;
  };
  std::vector<MinutePoint> pts;
  for (const AisRecord& r : records) {
    const std::int64_t minute = floor_div(r.t_unix, 60);
    if (!pts.empty() && pts.back().minute == minute) continue;
    pts.push_back({minute, geo::GeoPoint{r.lat, r.lon}, r.sog_knots});
  }

  // split at gaps above the interpolation limit; fill 2..5-minute gaps
  std::vector<std::vector<MinutePoint>> runs(1);
  std::vector<std::vector<bool>> interp(1);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i > 0) {
      const std::int64_t gap = pts[i].minute - pts[i - 1].minute;
      if (gap > kInterpMaxGapMin) {
        runs.emplace_back();
        interp.emplace_back();
      } else if (gap >= 2) {
        const MinutePoint& lo = pts[i - 1];
        const MinutePoint& hi = pts[i];
        for (std::int64_t k = 1; k < gap; ++k) {
          const double f = static_cast<double>(k) / static_cast<double>(gap);
          MinutePoint mid;
          mid.minute = lo.minute + k;
          mid.pos.lat = lo.pos.lat + (hi.pos.lat - lo.pos.lat) * f;
          mid.pos.lon = lo.pos.lon + (hi.pos.lon - lo.pos.lon) * f;
          runs.back().push_back(mid);
          interp.back().push_back(true);
          if (report) ++report->points_interpolated;
        }
      }
    }
    runs.back().push_back(pts[i]);
    interp.back().push_back(false);
  }

  const std::string mmsi = records.front().mmsi;
  for (std::size_t s = 0; s < runs.size(); ++s) {
    const auto& run = runs[s];
    if (run.empty()) continue;
    std::vector<TrajectoryPoint> seg(run.size());

    // headings derived from consecutive displacements; the first point
    // looks ahead; stationary points carry the last defined heading
    std::vector<std::optional<double>> raw(run.size());
    for (std::size_t i = 1; i < run.size(); ++i) {
      if (const auto h = geo::heading_from_displacement(run[i - 1].pos, run[i].pos)) {
        raw[i] = h->deg();
      }
    }
    if (run.size() >= 2) {
      if (const auto h = geo::heading_from_displacement(run[0].pos, run[1].pos)) {
        raw[0] = h->deg();
      }
    }
    std::optional<double> first_defined;
    for (const auto& h : raw) {
      if (h) {
        first_defined = h;
        break;
      }
    }
    std::optional<double> last = first_defined;  // backfills leading stationary points
    for (std::size_t i = 0; i < run.size(); ++i) {
      TrajectoryPoint& p = seg[i];
      p.mmsi = mmsi;
      p.minute = run[i].minute;
      p.pos = run[i].pos;
      p.interpolated = interp[s][i];
      if (raw[i]) last = raw[i];
      p.heading_deg = last.value_or(0.0);
      p.heading_defaulted = !last.has_value();

      if (run[i].sog) {
        p.speed_knots = *run[i].sog;
      } else if (i > 0) {
        p.speed_knots = derived_speed_knots(run[i - 1].pos, run[i].pos,
                                            static_cast<double>(run[i].minute - run[i - 1].minute));
      } else if (run.size() >= 2) {
        p.speed_knots = derived_speed_knots(run[0].pos, run[1].pos,
                                            static_cast<double>(run[1].minute - run[0].minute));
      } else {
        p.speed_knots = 0.0;
      }
    }
    segments.push_back(std::move(seg));
  }
  return segments;
}

std::vector<Frame> assemble_frames(const std::vector<std::vector<TrajectoryPoint>>& segments) {
  std::map<std::int64_t, std::vector<TrajectoryPoint>> by_minute;
  for (const auto& seg : segments) {
    for (const auto& p : seg) by_minute[p.minute].push_back(p);
  }
  std::vector<Frame> frames;
  frames.reserve(by_minute.size());
  for (auto& [minute, entries] : by_minute) {
    std::sort(entries.begin(), entries.end(),
              [](const TrajectoryPoint& a, const TrajectoryPoint& b) { return a.mmsi < b.mmsi; });
    frames.push_back(Frame{minute, std::move(entries)});
  }
  return frames;
}

std::vector<Frame> filter_frames(std::vector<Frame> frames, int min_vessels, double min_sog,
                                 PipelineReport* report) {
  std::vector<Frame> out;
  for (Frame& f : frames) {
    std::vector<TrajectoryPoint> kept;
    kept.reserve(f.entries.size());
    for (TrajectoryPoint& p : f.entries) {
      if (p.speed_knots < min_sog) {
        if (report) ++report->entries_below_sog;
      } else {
        kept.push_back(std::move(p));
      }
    }
    if (static_cast<int>(kept.size()) < min_vessels) {
      if (report) ++report->frames_dropped_small;
      continue;
    }
    out.push_back(Frame{f.minute, std::move(kept)});
  }
  if (report) report->frames_out = out.size();
  return out;
}

PipelineResult run_pipeline(std::istream& csv, const CsvSchema& schema, int min_vessels,
                            double min_sog) {
  PipelineResult result;
  auto records = parse_csv(csv, schema, result.report);

  std::map<std::string, std::vector<AisRecord>> by_mmsi;
  for (AisRecord& r : records) by_mmsi[r.mmsi].push_back(std::move(r));
  result.report.vessels_in = by_mmsi.size();

  std::vector<std::vector<TrajectoryPoint>> segments;
  for (auto& [mmsi, recs] : by_mmsi) {
    auto segs = resample(std::move(recs), &result.report);
    for (auto& s : segs) segments.push_back(std::move(s));
  }

  auto frames = assemble_frames(segments);
  result.report.frames_assembled = frames.size();
  result.frames = filter_frames(std::move(frames), min_vessels, min_sog, &result.report);

  std::map<std::string, bool> seen;
  for (const Frame& f : result.frames) {
    for (const TrajectoryPoint& p : f.entries) seen[p.mmsi] = true;
  }
  result.report.vessels_out = seen.size();
  return result;
}

void write_frames_jsonl(std::ostream& out, const std::vector<Frame>& frames) {
  for (const Frame& f : frames) {
    nlohmann::ordered_json j;
    j["t"] = f.minute * 60;
    j["iso"] = format_timestamp(f.minute * 60);
    auto& vessels = j["vessels"] = nlohmann::ordered_json::array();
    for (const TrajectoryPoint& p : f.entries) {
      nlohmann::ordered_json v;
      v["mmsi"] = p.mmsi;
      v["lat"] = p.pos.lat;
      v["lon"] = p.pos.lon;
      v["heading"] = p.heading_deg;
      v["interp"] = p.interpolated;
      vessels.push_back(std::move(v));
    }
    out << j.dump() << '\n';
  }
}

std::vector<Frame> read_frames_jsonl(std::istream& in) {
  std::vector<Frame> frames;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError("frames line " + std::to_string(line_no) + ": " + e.what());
    }
    Frame f;
    f.minute = floor_div(j.at("t").get<std::int64_t>(), 60);
    for (const auto& v : j.at("vessels")) {
      TrajectoryPoint p;
      p.mmsi = v.at("mmsi").get<std::string>();
      p.minute = f.minute;
      p.pos.lat = v.at("lat").get<double>();
      p.pos.lon = v.at("lon").get<double>();
      p.heading_deg = v.at("heading").get<double>();
      p.interpolated = v.at("interp").get<bool>();
      f.entries.push_back(std::move(p));
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

}  // namespace vtp::ais
