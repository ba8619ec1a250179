#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "format.hpp"
#include "types.hpp"

namespace votespan {

namespace detail {

inline std::vector<std::string> split_csv_line(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return cells;
}

inline double parse_double_cell(const std::string& cell, std::size_t row, std::size_t column,
                                const std::string& column_name) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  while (first != last && (*first == ' ' || *first == '\t')) ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last)
    throw ParseError("non-numeric cell '" + cell + "' at row " + std::to_string(row) +
                         ", column " + std::to_string(column + 1) + " (" + column_name + ")",
                     row, column);
  return value;
}

inline bool is_nonnegative_integer(const std::string& s) {
  if (s.empty() || s.size() > 9) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

}  // namespace detail

struct LoadedStream {
  std::vector<StreamInstance> instances;
  int num_classes = 0;
  std::vector<std::string> feature_names;
  std::vector<std::string> label_names;  // index -> original label text
};

/// Loads a header-led CSV dataset. The label column is selected by header name
/// or by 0-based index; every other column is a numeric feature, kept in file
/// order. Labels map to dense indices: already-dense nonnegative integer
/// labels keep their numeric value (so dumped streams reload identically),
/// anything else is indexed in first-seen order.
inline LoadedStream load_csv_stream(const std::string& path, const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw ParseError("dataset file has no header row: " + path, 1, 0);
  const std::vector<std::string> header = detail::split_csv_line(std::move(line));

  std::size_t label_idx = header.size();
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == label_column) {
      label_idx = j;
      break;
    }
  }
  if (label_idx == header.size()) {
    // fall back to a 0-based column index
    std::size_t value = 0;
    const auto [ptr, ec] =
        std::from_chars(label_column.data(), label_column.data() + label_column.size(), value);
    if (ec == std::errc{} && ptr == label_column.data() + label_column.size() &&
        value < header.size()) {
      label_idx = value;
    } else {
      throw DomainError("label column '" + label_column + "' not found in header of " + path);
    }
  }

  LoadedStream out;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j != label_idx) out.feature_names.push_back(header[j]);
  }

  std::vector<std::string> raw_labels;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
    const std::vector<std::string> cells = detail::split_csv_line(std::move(line));
    if (cells.size() != header.size())
      throw ParseError("row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                           " cells, expected " + std::to_string(header.size()),
                       row, 0);
    StreamInstance inst;
    inst.features.reserve(header.size() - 1);
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (j == label_idx) continue;
      inst.features.push_back(detail::parse_double_cell(cells[j], row, j, header[j]));
    }
    raw_labels.push_back(cells[label_idx]);
    out.instances.push_back(std::move(inst));
  }

  // Dense-integer labels keep their numeric value; otherwise first-seen order.
  std::map<std::string, int> first_seen;
  std::vector<std::string> order;
  for (const auto& l : raw_labels) {
    if (first_seen.emplace(l, static_cast<int>(order.size())).second) order.push_back(l);
  }
  bool dense_integers = !order.empty();
  std::vector<bool> present(order.size(), false);
  for (const auto& l : order) {
    if (!detail::is_nonnegative_integer(l)) {
      dense_integers = false;
      break;
    }
    std::size_t value = 0;
    std::from_chars(l.data(), l.data() + l.size(), value);
    if (value >= order.size() || present[value]) {
      dense_integers = false;
      break;
    }
    present[value] = true;
  }

  std::map<std::string, int> mapping;
  out.label_names.assign(order.size(), "");
  for (std::size_t k = 0; k < order.size(); ++k) {
    int idx;
    if (dense_integers) {
      std::size_t value = 0;
      std::from_chars(order[k].data(), order[k].data() + order[k].size(), value);
      idx = static_cast<int>(value);
    } else {
      idx = static_cast<int>(k);
    }
    mapping[order[k]] = idx;
    out.label_names[static_cast<std::size_t>(idx)] = order[k];
  }
  for (std::size_t i = 0; i < raw_labels.size(); ++i)
    out.instances[i].label = mapping[raw_labels[i]];
  out.num_classes = static_cast<int>(order.size());
  return out;
}

inline void write_stream_csv(std::ostream& os, const std::vector<StreamInstance>& stream) {
  if (stream.empty()) throw DomainError("write_stream_csv: empty stream");
  const std::size_t d = stream.front().features.size();
  for (std::size_t f = 0; f < d; ++f) os << 'f' << f << ',';
  os << "label\n";
  for (const auto& inst : stream) {
    if (inst.features.size() != d) throw ShapeError("write_stream_csv: ragged feature rows");
    for (double x : inst.features) os << fmt_g17(x) << ',';
    os << inst.label << '\n';
  }
}

inline void write_stream_csv(const std::string& path, const std::vector<StreamInstance>& stream) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open output file: " + path);
  write_stream_csv(out, stream);
}

/// Streaming writer for recorded votes: one row per (instance, classifier),
/// rows grouped by instance and ordered by classifier.
class VotesCsvWriter {
 public:
  explicit VotesCsvWriter(std::ostream& os) : os_(os) {}

  void write(const VoteMatrix& votes) {
    if (!header_written_) {
      os_ << "instance_id,classifier_id";
      for (std::size_t j = 0; j < votes.num_classes(); ++j) os_ << ",s" << j;
      os_ << '\n';
      header_written_ = true;
    }
    for (std::size_t i = 0; i < votes.rows.size(); ++i) {
      os_ << votes.instance_id << ',' << i;
      for (double x : votes.rows[i].scores) os_ << ',' << fmt_g17(x);
      os_ << '\n';
    }
  }

 private:
  std::ostream& os_;
  bool header_written_ = false;
};

inline void write_votes_csv(const std::string& path, const std::vector<VoteMatrix>& votes) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open output file: " + path);
  VotesCsvWriter writer(out);
  for (const auto& v : votes) writer.write(v);
}

inline std::vector<VoteMatrix> read_votes_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open votes file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("votes file has no header row: " + path, 1, 0);
  const std::vector<std::string> header = detail::split_csv_line(std::move(line));
  if (header.size() < 4 || header[0] != "instance_id" || header[1] != "classifier_id")
    throw ParseError("votes file header must be instance_id,classifier_id,s0,...", 1, 0);
  const std::size_t m = header.size() - 2;

  std::vector<VoteMatrix> out;
  std::size_t row = 1;
  bool any = false;
  std::int64_t current_id = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
    const std::vector<std::string> cells = detail::split_csv_line(std::move(line));
    if (cells.size() != header.size())
      throw ParseError("row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                           " cells, expected " + std::to_string(header.size()),
                       row, 0);
    const auto id = static_cast<std::int64_t>(
        detail::parse_double_cell(cells[0], row, 0, header[0]));
    VoteVector vote;
    vote.scores.reserve(m);
    for (std::size_t j = 2; j < cells.size(); ++j)
      vote.scores.push_back(detail::parse_double_cell(cells[j], row, j, header[j]));
    if (!any || id != current_id) {
      out.emplace_back();
      out.back().instance_id = id;
      current_id = id;
      any = true;
    }
    out.back().rows.push_back(std::move(vote));
  }
  return out;
}

}  // namespace votespan
