#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace foodchain {

/// Timestamped multivariate series: named environmental channels plus one
/// target column. Timestamps are seconds since the Unix epoch, strictly
/// increasing.
struct TimeSeriesFrame {
  std::vector<std::int64_t> timestamps;
  std::vector<std::string> channel_names;
  std::vector<std::vector<double>> channels;  // one column per channel name
  std::string target_name = "target";
  std::vector<double> target;

  std::size_t rows() const { return timestamps.size(); }
  std::size_t channel_count() const { return channels.size(); }

  void validate() const;
};

std::int64_t parse_iso8601(const std::string& s);
std::string format_iso8601(std::int64_t t);

/// CSV ingestion: header row names columns, first column is an ISO-8601
/// timestamp, last column is the target. Unparseable rows are rejected with
/// a line-numbered error.
TimeSeriesFrame read_frame_csv(const std::string& path);
void write_frame_csv(const TimeSeriesFrame& frame, const std::string& path);

}  // namespace foodchain
