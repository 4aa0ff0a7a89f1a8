#include "flexquant/datagen.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace flexq {

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, delim)) out.push_back(trim(cell));
  if (!line.empty() && line.back() == delim) out.emplace_back();
  return out;
}

bool blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open CSV file: " + path.string());

  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (blank(line)) continue;
    header = split(line, schema.delimiter);
    break;
  }
  if (header.empty()) throw CsvError("empty CSV file: " + path.string());

  const auto column_of = [&](const std::string& name) -> std::size_t {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw CsvError("column '" + name + "' not found in " + path.string());
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t response_col = column_of(schema.response);
  std::vector<std::size_t> predictor_cols;
  std::vector<std::string> predictor_names;
  if (schema.predictors.empty()) {
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (j == response_col) continue;
      predictor_cols.push_back(j);
      predictor_names.push_back(header[j]);
    }
  } else {
    for (const auto& name : schema.predictors) {
      predictor_cols.push_back(column_of(name));
      predictor_names.push_back(name);
    }
  }

  std::vector<std::vector<double>> rows;
  std::vector<double> ys;
  std::size_t row_no = 0;
  while (std::getline(in, line)) {
    if (blank(line)) continue;
    ++row_no;
    const auto cells = split(line, schema.delimiter);
    if (cells.size() != header.size()) {
      throw CsvError(path.string() + ": row " + std::to_string(row_no) + " has " +
                     std::to_string(cells.size()) + " cells, header has " +
                     std::to_string(header.size()));
    }
    const auto parse = [&](std::size_t col) {
      const std::string& cell = cells[col];
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw CsvError(path.string() + ": non-numeric value '" + cell + "' at row " +
                       std::to_string(row_no) + ", column '" + header[col] + "'");
      }
      return v;
    };
    std::vector<double> row;
    row.reserve(predictor_cols.size());
    for (std::size_t col : predictor_cols) row.push_back(parse(col));
    rows.push_back(std::move(row));
    ys.push_back(parse(response_col));
  }
  if (rows.empty()) throw CsvError("CSV file has no data rows: " + path.string());

  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto k = static_cast<Eigen::Index>(predictor_cols.size());
  Eigen::MatrixXd x(n, k);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) x(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    y(i) = ys[static_cast<std::size_t>(i)];
  }
  try {
    return Dataset(x, std::move(y), std::move(predictor_names), schema.response);
  } catch (const std::invalid_argument& e) {
    throw CsvError(path.string() + ": " + e.what());
  }
}

void write_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw CsvError("cannot write CSV file: " + path.string());
  const auto k = static_cast<Eigen::Index>(data.cols()) - 1;
  const auto& names = data.column_names();
  for (Eigen::Index j = 0; j < k; ++j) out << names[static_cast<std::size_t>(j)] << ',';
  out << data.response_name() << '\n';
  char buf[32];
  const auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
  };
  for (Eigen::Index i = 0; i < data.design().rows(); ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      put(data.design()(i, j));
      out << ',';
    }
    put(data.response()(i));
    out << '\n';
  }
}

}  // namespace flexq
