#include "gaitprior/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gaitprior {

std::string format_double(double value) {
  char buf[64];
  auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

const char* kTrainingLogHeader =
    "update,env_steps,mean_task_return,mean_style_return,ep_len_mean,"
    "mean_abs_decoded,mean_abs_residual,policy_loss,value_loss,entropy,"
    "approx_kl,clip_fraction,wall_seconds";

std::string training_log_csv(const std::vector<UpdateLog>& logs) {
  std::ostringstream out;
  out << kTrainingLogHeader << "\n";
  for (const UpdateLog& row : logs) {
    out << row.update << ',' << row.env_steps << ','
        << format_double(row.mean_task_return) << ','
        << format_double(row.mean_style_return) << ','
        << format_double(row.ep_len_mean) << ','
        << format_double(row.mean_abs_decoded) << ','
        << format_double(row.mean_abs_residual) << ','
        << format_double(row.policy_loss) << ','
        << format_double(row.value_loss) << ','
        << format_double(row.entropy) << ','
        << format_double(row.approx_kl) << ','
        << format_double(row.clip_fraction) << ','
        << format_double(row.wall_seconds) << "\n";
  }
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::filesystem::create_directories(p.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("write_text_file: cannot open " + path);
  }
  out << content;
  if (!out) {
    throw std::runtime_error("write_text_file: write failed for " + path);
  }
}

namespace {

const char* kSeriesColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                               "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

struct Range {
  double lo = 0.0;
  double hi = 1.0;
};

Range finite_range(const std::vector<Series>& series, bool use_x) {
  Range r{std::numeric_limits<double>::infinity(),
          -std::numeric_limits<double>::infinity()};
  for (const Series& s : series) {
    const std::vector<double>& v = use_x ? s.x : s.y;
    for (double value : v) {
      if (!std::isfinite(value)) continue;
      r.lo = std::min(r.lo, value);
      r.hi = std::max(r.hi, value);
    }
  }
  if (!(r.lo <= r.hi)) return Range{0.0, 1.0};
  if (r.hi == r.lo) {
    r.lo -= 0.5;
    r.hi += 0.5;
  }
  return r;
}

std::string svg_escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string axis_label(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", value);
  return std::string(buf);
}

}  // namespace

void write_line_chart(const std::string& path, const std::string& title,
                      const std::vector<Series>& series) {
  const double width = 640.0;
  const double height = 400.0;
  const double left = 60.0;
  const double right = width - 20.0;
  const double top = 40.0;
  const double bottom = height - 40.0;

  Range xr = finite_range(series, true);
  Range yr = finite_range(series, false);
  auto map_x = [&](double x) {
    return left + (x - xr.lo) / (xr.hi - xr.lo) * (right - left);
  };
  auto map_y = [&](double y) {
    return bottom - (y - yr.lo) / (yr.hi - yr.lo) * (bottom - top);
  };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"15\">" << svg_escape(title)
      << "</text>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << right
      << "\" y2=\"" << bottom << "\" stroke=\"#444\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left
      << "\" y2=\"" << bottom << "\" stroke=\"#444\"/>\n";
  out << "<text x=\"" << left << "\" y=\"" << bottom + 16
      << "\" font-family=\"sans-serif\" font-size=\"11\">" << axis_label(xr.lo)
      << "</text>\n";
  out << "<text x=\"" << right << "\" y=\"" << bottom + 16
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << axis_label(xr.hi) << "</text>\n";
  out << "<text x=\"" << left - 6 << "\" y=\"" << bottom
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << axis_label(yr.lo) << "</text>\n";
  out << "<text x=\"" << left - 6 << "\" y=\"" << top + 4
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << axis_label(yr.hi) << "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const Series& s = series[i];
    const char* color = kSeriesColors[i % (sizeof(kSeriesColors) / sizeof(kSeriesColors[0]))];
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    std::size_t n = std::min(s.x.size(), s.y.size());
    for (std::size_t k = 0; k < n; ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      out << map_x(s.x[k]) << ',' << map_y(s.y[k]) << ' ';
    }
    out << "\"/>\n";
    out << "<text x=\"" << right - 4 << "\" y=\"" << top + 14 + 14.0 * i
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" "
        << "fill=\"" << color << "\">" << svg_escape(s.name) << "</text>\n";
  }
  out << "</svg>\n";
  write_text_file(path, out.str());
}

void write_bar_chart(const std::string& path, const std::string& title,
                     const std::vector<std::string>& labels,
                     const std::vector<double>& values) {
  const double width = 640.0;
  const double height = 400.0;
  const double left = 60.0;
  const double right = width - 20.0;
  const double top = 40.0;
  const double bottom = height - 50.0;

  double lo = 0.0;
  double hi = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi == lo) hi = lo + 1.0;
  auto map_y = [&](double y) {
    return bottom - (y - lo) / (hi - lo) * (bottom - top);
  };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"15\">" << svg_escape(title)
      << "</text>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << map_y(0.0) << "\" x2=\""
      << right << "\" y2=\"" << map_y(0.0) << "\" stroke=\"#444\"/>\n";
  out << "<text x=\"" << left - 6 << "\" y=\"" << bottom
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << axis_label(lo) << "</text>\n";
  out << "<text x=\"" << left - 6 << "\" y=\"" << top + 4
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << axis_label(hi) << "</text>\n";

  std::size_t n = std::min(labels.size(), values.size());
  if (n > 0) {
    double slot = (right - left) / static_cast<double>(n);
    double bar = slot * 0.6;
    for (std::size_t i = 0; i < n; ++i) {
      double cx = left + slot * (static_cast<double>(i) + 0.5);
      double y0 = map_y(std::max(0.0, values[i]));
      double h = std::abs(map_y(values[i]) - map_y(0.0));
      out << "<rect x=\"" << cx - bar / 2 << "\" y=\"" << y0 << "\" width=\""
          << bar << "\" height=\"" << h << "\" fill=\"#1f77b4\"/>\n";
      out << "<text x=\"" << cx << "\" y=\"" << bottom + 16
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          << "font-size=\"11\">" << svg_escape(labels[i]) << "</text>\n";
    }
  }
  out << "</svg>\n";
  write_text_file(path, out.str());
}

}  // namespace gaitprior
