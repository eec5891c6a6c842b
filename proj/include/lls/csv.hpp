#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace lls {

struct CsvColumn {
  std::string name;
  std::vector<double> values;
};

// Header row, then one row per index; values in "%.17g", LF endings.
// Throws ParameterError for columns of unequal length.
std::string render_csv(const std::vector<CsvColumn>& columns);

// Throws IoError if the file cannot be written.
void write_csv(const std::vector<CsvColumn>& columns, const std::filesystem::path& path);

void write_text(const std::string& text, const std::filesystem::path& path);

} // namespace lls
