#include "flexquant/report.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace flexq {

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void require_same_grid(const std::vector<GridResult>& results) {
  for (const auto& r : results) {
    if (r.grid.values() != results.front().grid.values()) {
      throw std::invalid_argument("grid results use different tau grids");
    }
  }
}

std::string events_cell(const GridResult& r) {
  return r.events ? r.events->summary() : "-";
}

}  // namespace

void write_counts_tsv(const std::filesystem::path& path, const std::vector<GridResult>& results) {
  if (results.empty()) throw std::invalid_argument("write_counts_tsv: no results");
  require_same_grid(results);
  auto out = open_out(path);
  out << "tau";
  for (const auto& r : results) out << '\t' << r.method;
  out << '\n';
  const auto& grid = results.front().grid;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    out << format_double(grid[k]);
    for (const auto& r : results) out << '\t' << r.curve.counts[k];
    out << '\n';
  }
}

void write_events_tsv(const std::filesystem::path& path, const std::vector<GridResult>& results) {
  if (results.empty()) throw std::invalid_argument("write_events_tsv: no results");
  auto out = open_out(path);
  out << "quantiles";
  for (const auto& r : results) out << '\t' << r.method;
  out << '\n' << results.front().grid.size();
  for (const auto& r : results) out << '\t' << events_cell(r);
  out << "\nwide";
  for (const auto& r : results) out << '\t' << (r.events ? std::to_string(r.events->wide_count()) : "-");
  out << '\n';
}

void write_coefficients_tsv(const std::filesystem::path& path, const Dataset& data,
                            const std::vector<GridResult>& results) {
  auto out = open_out(path);
  out << "method\ttau";
  for (const auto& name : data.column_names()) out << '\t' << name;
  out << "\tstatus\n";
  for (const auto& r : results) {
    for (Eigen::Index k = 0; k < r.coefficients.rows(); ++k) {
      const auto idx = static_cast<std::size_t>(k);
      out << r.method << '\t' << format_double(r.grid[idx]);
      for (Eigen::Index j = 0; j < r.coefficients.cols(); ++j) {
        out << '\t' << format_double(r.coefficients(k, j));
      }
      out << '\t' << (idx < r.statuses.size() ? to_string(r.statuses[idx]) : "n/a") << '\n';
    }
  }
}

namespace {

constexpr const char* kPalette[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

struct Frame {
  double width = 640, height = 420, margin = 50;
  double x0, x1, y0, y1;
  double sx(double x) const { return margin + (x - x0) / (x1 - x0) * (width - 2 * margin); }
  double sy(double y) const { return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin); }
};

void svg_header(std::ostream& out, const Frame& f, const std::string& title) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << f.width
      << "\" height=\"" << f.height << "\" viewBox=\"0 0 " << f.width << ' ' << f.height << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << f.width << "\" height=\"" << f.height
      << "\" fill=\"white\"/>\n"
      << "<text x=\"" << f.width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << title << "</text>\n"
      << "<rect x=\"" << f.margin << "\" y=\"" << f.margin << "\" width=\"" << f.width - 2 * f.margin
      << "\" height=\"" << f.height - 2 * f.margin << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<text x=\"" << f.margin << "\" y=\"" << f.height - f.margin + 16
      << "\" font-size=\"11\">" << format_double(f.x0) << "</text>\n"
      << "<text x=\"" << f.width - f.margin << "\" y=\"" << f.height - f.margin + 16
      << "\" font-size=\"11\" text-anchor=\"end\">" << format_double(f.x1) << "</text>\n"
      << "<text x=\"" << f.margin - 4 << "\" y=\"" << f.height - f.margin
      << "\" font-size=\"11\" text-anchor=\"end\">" << format_double(f.y0) << "</text>\n"
      << "<text x=\"" << f.margin - 4 << "\" y=\"" << f.margin + 10
      << "\" font-size=\"11\" text-anchor=\"end\">" << format_double(f.y1) << "</text>\n";
}

}  // namespace

void write_curves_svg(const std::filesystem::path& path, const std::vector<GridResult>& results) {
  if (results.empty()) throw std::invalid_argument("write_curves_svg: no results");
  require_same_grid(results);
  const auto& curve0 = results.front().curve;
  Frame f;
  f.x0 = curve0.taus.front();
  f.x1 = curve0.taus.size() > 1 ? curve0.taus.back() : f.x0 + 1.0;
  f.y0 = 0.0;
  f.y1 = std::max(1, curve0.n);

  auto out = open_out(path);
  svg_header(out, f, "points below fitted plane vs tau");
  const auto ideal = ideal_counts(curve0);
  out << "<polyline fill=\"none\" stroke=\"#7f7f7f\" stroke-dasharray=\"4 3\" points=\"";
  for (std::size_t k = 0; k < ideal.size(); ++k) {
    out << f.sx(curve0.taus[k]) << ',' << f.sy(ideal[k]) << ' ';
  }
  out << "\"/>\n";
  for (std::size_t m = 0; m < results.size(); ++m) {
    const auto& c = results[m].curve;
    const char* colour = kPalette[m % std::size(kPalette)];
    out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.2\" points=\"";
    for (std::size_t k = 0; k < c.counts.size(); ++k) {
      out << f.sx(c.taus[k]) << ',' << f.sy(c.counts[k]) << ' ';
    }
    out << "\"/>\n";
    out << "<text x=\"" << f.margin + 8 << "\" y=\"" << f.margin + 16 + 14 * static_cast<double>(m)
        << "\" font-size=\"12\" fill=\"" << colour << "\">" << results[m].method << "</text>\n";
  }
  out << "</svg>\n";
}

void write_lines_svg(const std::filesystem::path& path, const Dataset& data,
                     const GridResult& result) {
  if (data.cols() != 2) throw std::invalid_argument("write_lines_svg: requires p = 2");
  const Eigen::VectorXd x = data.design().col(0);
  const Eigen::VectorXd& y = data.response();
  Frame f;
  f.x0 = x.minCoeff();
  f.x1 = x.maxCoeff();
  if (f.x1 == f.x0) f.x1 = f.x0 + 1.0;
  f.y0 = y.minCoeff();
  f.y1 = y.maxCoeff();
  const double pad = 0.1 * std::max(f.y1 - f.y0, 1e-9);
  f.y0 -= pad;
  f.y1 += pad;

  auto out = open_out(path);
  svg_header(out, f, result.method + " fitted lines");
  out << "<g stroke=\"#1f77b4\" stroke-width=\"0.6\" stroke-opacity=\"0.6\">\n";
  for (Eigen::Index k = 0; k < result.coefficients.rows(); ++k) {
    const double a = result.coefficients(k, 0), b = result.coefficients(k, 1);
    const double ya = std::clamp(a * f.x0 + b, f.y0, f.y1);
    const double yb = std::clamp(a * f.x1 + b, f.y0, f.y1);
    out << "<line x1=\"" << f.sx(f.x0) << "\" y1=\"" << f.sy(ya) << "\" x2=\"" << f.sx(f.x1)
        << "\" y2=\"" << f.sy(yb) << "\"/>\n";
  }
  out << "</g>\n";
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    out << "<circle cx=\"" << f.sx(x(i)) << "\" cy=\"" << f.sy(y(i)) << "\" r=\"3\"/>\n";
  }
  out << "</svg>\n";
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j;
  j["toolkit"] = "flexquant";
  j["version"] = kToolkitVersion;
  j["command_line"] = command_line;
  j["config"] = config;
  j["seeds"] = seeds;
  j["datasets"] = datasets;
  j["started_utc"] = started_utc;
  j["wall_seconds"] = wall_seconds;
  return j;
}

nlohmann::json dataset_fingerprint(const Dataset& data, const std::string& label) {
  return {{"label", label},
          {"rows", data.rows()},
          {"cols", data.cols()},
          {"columns", data.column_names()},
          {"response", data.response_name()},
          {"fingerprint", data.fingerprint()}};
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
  auto out = open_out(path);
  out << manifest.to_json().dump(2) << '\n';
}

}  // namespace flexq
