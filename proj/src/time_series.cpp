#include "foodchain/time_series.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace foodchain {

void TimeSeriesFrame::validate() const {
  for (std::size_t i = 1; i < timestamps.size(); ++i)
    if (timestamps[i] <= timestamps[i - 1])
      throw std::invalid_argument("timestamps must be strictly increasing");
  if (channel_names.size() != channels.size())
    throw std::invalid_argument("channel name/column count mismatch");
  for (const auto& col : channels)
    if (col.size() != timestamps.size())
      throw std::invalid_argument("column length mismatch");
  if (target.size() != timestamps.size())
    throw std::invalid_argument("target length mismatch");
  for (const auto& col : channels)
    for (double x : col)
      if (!std::isfinite(x))
        throw std::invalid_argument("non-finite channel value");
  for (double x : target)
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite target value");
}

std::int64_t parse_iso8601(const std::string& s) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, se = 0;
  char sep = 'T';
  int n = std::sscanf(s.c_str(), "%d-%d-%d%c%d:%d:%d", &y, &mo, &d, &sep, &h,
                      &mi, &se);
  if (n == 3) {
    h = mi = se = 0;
  } else if (n < 7 || (sep != 'T' && sep != ' ')) {
    throw std::invalid_argument("bad ISO-8601 timestamp: " + s);
  }
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 ||
      mi > 59 || se < 0 || se > 60)
    throw std::invalid_argument("bad ISO-8601 timestamp: " + s);
  std::tm tm{};
  tm.tm_year = y - 1900;
  tm.tm_mon = mo - 1;
  tm.tm_mday = d;
  tm.tm_hour = h;
  tm.tm_min = mi;
  tm.tm_sec = se;
  return static_cast<std::int64_t>(timegm(&tm));
}

std::string format_iso8601(std::int64_t t) {
  std::time_t tt = static_cast<std::time_t>(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                tm.tm_min, tm.tm_sec);
  return buf;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

TimeSeriesFrame read_frame_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open CSV: " + path);
  std::string line;
  if (!std::getline(is, line))
    throw std::runtime_error(path + ":1: empty CSV, header expected");
  auto header = split_csv_line(line);
  if (header.size() < 2)
    throw std::runtime_error(path + ":1: need timestamp and target columns");

  TimeSeriesFrame frame;
  frame.target_name = header.back();
  for (std::size_t c = 1; c + 1 < header.size(); ++c) {
    frame.channel_names.push_back(header[c]);
    frame.channels.emplace_back();
  }

  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected " + std::to_string(header.size()) +
                               " fields, got " + std::to_string(fields.size()));
    std::int64_t ts;
    try {
      ts = parse_iso8601(fields[0]);
    } catch (const std::exception&) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": bad timestamp '" + fields[0] + "'");
    }
    std::vector<double> vals(fields.size() - 1);
    for (std::size_t c = 1; c < fields.size(); ++c) {
      try {
        std::size_t pos = 0;
        vals[c - 1] = std::stod(fields[c], &pos);
        if (pos != fields[c].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": bad numeric value '" + fields[c] + "'");
      }
      if (!std::isfinite(vals[c - 1]))
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": non-finite value");
    }
    if (!frame.timestamps.empty() && ts <= frame.timestamps.back())
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": timestamps not strictly increasing");
    frame.timestamps.push_back(ts);
    for (std::size_t c = 0; c < frame.channels.size(); ++c)
      frame.channels[c].push_back(vals[c]);
    frame.target.push_back(vals.back());
  }
  frame.validate();
  return frame;
}

void write_frame_csv(const TimeSeriesFrame& frame, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for write: " + path);
  os << "timestamp";
  for (const auto& n : frame.channel_names) os << "," << n;
  os << "," << frame.target_name << "\n";
  char buf[64];
  for (std::size_t i = 0; i < frame.rows(); ++i) {
    os << format_iso8601(frame.timestamps[i]);
    for (const auto& col : frame.channels) {
      std::snprintf(buf, sizeof(buf), "%.12g", col[i]);
      os << "," << buf;
    }
    std::snprintf(buf, sizeof(buf), "%.12g", frame.target[i]);
    os << "," << buf << "\n";
  }
}

}  // namespace foodchain
