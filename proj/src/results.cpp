#include <daahm/results.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <daahm/errors.hpp>

namespace daahm {

namespace {

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

}  // namespace

void emit_results(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write results file: " + path.string());
  out << kResultsHeader << "\n";
  for (const ResultRow& row : rows) {
    out << row.strategy << ',' << row.episode << ',' << row.slot << ',' << row.activity << ','
        << format_double(row.reward) << ',' << format_double(row.relevance) << ','
        << format_double(row.cost) << ',' << row.alpha_mask << "\n";
  }
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<ResultRow> read_results(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open results file: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kResultsHeader) {
    throw InvalidInput("results file has an unexpected header: " + path.string());
  }
  std::vector<ResultRow> rows;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    std::stringstream fields(line);
    std::string field;
    std::vector<std::string> parts;
    while (std::getline(fields, field, ',')) parts.push_back(field);
    if (parts.size() != 8) {
      std::ostringstream msg;
      msg << "results file line " << line_number << " has " << parts.size()
          << " fields, expected 8";
      throw InvalidInput(msg.str());
    }
    ResultRow row;
    row.strategy = parts[0];
    try {
      row.episode = std::stoll(parts[1]);
      row.slot = std::stoll(parts[2]);
      row.activity = std::stoll(parts[3]);
      row.reward = std::stod(parts[4]);
      row.relevance = std::stod(parts[5]);
      row.cost = std::stod(parts[6]);
      row.alpha_mask = static_cast<std::uint32_t>(std::stoul(parts[7]));
    } catch (const std::exception&) {
      std::ostringstream msg;
      msg << "results file line " << line_number << " is malformed";
      throw InvalidInput(msg.str());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace daahm
