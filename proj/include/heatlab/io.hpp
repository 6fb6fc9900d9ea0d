#pragma once

#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include <json.hpp>

namespace heatlab {

/// 17 significant digits in scientific notation.
std::string format_double(double v);

/// Minimal CSV writer; numbers go through format_double.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, std::initializer_list<std::string> header);
  CsvWriter(const std::string& path, const std::vector<std::string>& header);

  void row(std::initializer_list<double> values);
  void row(const std::vector<double>& values);

 private:
  std::ofstream out_;
};

void ensure_directory(const std::string& dir);
std::string join_path(const std::string& dir, const std::string& file);
void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

}  // namespace heatlab
