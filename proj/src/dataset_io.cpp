#include "svam/dataset_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace svam {

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& s, std::size_t line_no) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  // Underflow to a subnormal also sets ERANGE; only overflow is an error.
  if (s.empty() || end != s.c_str() + s.size() || (errno == ERANGE && std::isinf(v))) {
    throw IoError("line " + std::to_string(line_no) + ": cannot parse number '" + s + "'");
  }
  return v;
}

}  // namespace

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  const bool labels = data.has_labels();
  for (Index j = 0; j < data.d(); ++j) out << 'x' << j << ',';
  if (labels) out << "y,";
  out << "is_corrupted\n";
  for (Index i = 0; i < data.n(); ++i) {
    for (Index j = 0; j < data.d(); ++j) out << format_double(data.X(i, j)) << ',';
    if (labels) out << format_double(data.y(i)) << ',';
    const bool flagged =
        data.corrupted_mask && (*data.corrupted_mask)[static_cast<std::size_t>(i)] != 0;
    out << (flagged ? 1 : 0) << '\n';
  }
}

void save_dataset(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_dataset_csv(out, data);
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

Dataset read_dataset_csv(std::istream& in, Task task) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("dataset file is empty");
  const auto header = split(line);
  const bool labels = task != Task::me;
  const std::size_t extra = labels ? 2 : 1;
  if (header.size() <= extra || header.back() != "is_corrupted" ||
      (labels && header[header.size() - 2] != "y")) {
    throw IoError("unexpected dataset header '" + line + "'");
  }
  const std::size_t d = header.size() - extra;
  for (std::size_t j = 0; j < d; ++j) {
    if (header[j] != "x" + std::to_string(j)) {
      throw IoError("unexpected dataset header '" + line + "'");
    }
  }

  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<std::uint8_t> mask;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != header.size()) {
      throw IoError("line " + std::to_string(line_no) + ": expected " +
                    std::to_string(header.size()) + " fields");
    }
    for (std::size_t j = 0; j < d; ++j) xs.push_back(parse_double(fields[j], line_no));
    if (labels) ys.push_back(parse_double(fields[d], line_no));
    const std::string& flag = fields.back();
    if (flag != "0" && flag != "1") {
      throw IoError("line " + std::to_string(line_no) + ": is_corrupted must be 0 or 1");
    }
    mask.push_back(flag == "1" ? 1 : 0);
  }

  Dataset data;
  data.task = task;
  const Index n = static_cast<Index>(mask.size());
  data.X.resize(n, static_cast<Index>(d));
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < static_cast<Index>(d); ++j) {
      data.X(i, j) = xs[static_cast<std::size_t>(i) * d + static_cast<std::size_t>(j)];
    }
  }
  if (labels) data.y = Eigen::Map<const Vector>(ys.data(), n);
  data.corrupted_mask = std::move(mask);
  return data;
}

Dataset load_dataset(const std::string& path, Task task) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_dataset_csv(in, task);
}

}  // namespace svam
