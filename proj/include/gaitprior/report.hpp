#pragma once

#include <string>
#include <vector>

#include "gaitprior/ppo.hpp"

namespace gaitprior {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// Pinned training-log header; every run writes exactly these columns.
extern const char* kTrainingLogHeader;

std::string training_log_csv(const std::vector<UpdateLog>& logs);
void write_text_file(const std::string& path, const std::string& content);

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Hand-emitted SVG line chart; CSV stays the normative output.
void write_line_chart(const std::string& path, const std::string& title,
                      const std::vector<Series>& series);

void write_bar_chart(const std::string& path, const std::string& title,
                     const std::vector<std::string>& labels,
                     const std::vector<double>& values);

}  // namespace gaitprior
