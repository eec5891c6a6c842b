#include "lls/csv.hpp"

#include <fstream>

#include "lls/config.hpp"
#include "lls/errors.hpp"

namespace lls {

std::string render_csv(const std::vector<CsvColumn>& columns) {
  std::string out;
  const std::size_t rows = columns.empty() ? 0 : columns.front().values.size();
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].values.size() != rows) {
      throw ParameterError("csv column '" + columns[c].name + "' has " +
                           std::to_string(columns[c].values.size()) + " rows, expected " +
                           std::to_string(rows));
    }
    out += (c ? "," : "") + columns[c].name;
  }
  out += '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) out += ',';
      out += format_double(columns[c].values[r]);
    }
    out += '\n';
  }
  return out;
}

void write_text(const std::string& text, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

void write_csv(const std::vector<CsvColumn>& columns, const std::filesystem::path& path) {
  write_text(render_csv(columns), path);
}

} // namespace lls
