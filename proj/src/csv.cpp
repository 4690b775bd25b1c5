#include "coqr/csv.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace coqr {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_cell(const std::string& raw, std::size_t row, std::size_t col) {
  const std::string cell = trim(raw);
  if (cell.empty()) throw ParseError("empty cell", row, col);
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw ParseError("cannot parse '" + cell + "' as a number", row, col);
  if (!std::isfinite(value)) throw ParseError("non-finite value '" + cell + "'", row, col);
  return value;
}

}  // namespace

int CsvTable::column_index(const std::string& name) const {
  for (std::size_t j = 0; j < columns.size(); ++j)
    if (columns[j] == name) return static_cast<int>(j);
  return -1;
}

void CsvTable::split_response(const std::string& response_column, Eigen::VectorXd& response,
                              Eigen::MatrixXd& covariates,
                              std::vector<std::string>& covariate_names) const {
  const int ridx = column_index(response_column);
  if (ridx < 0) {
    std::string known;
    for (const auto& c : columns) known += (known.empty() ? "" : ", ") + c;
    throw InputError("response column '" + response_column + "' not found; columns are: " + known);
  }
  if (columns.size() < 2) throw InputError("need at least one covariate column");
  response = values.col(ridx);
  covariates.resize(values.rows(), values.cols() - 1);
  covariate_names.clear();
  int out = 0;
  for (int j = 0; j < static_cast<int>(columns.size()); ++j) {
    if (j == ridx) continue;
    covariates.col(out++) = values.col(j);
    covariate_names.push_back(columns[j]);
  }
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");

  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing header row", 1, 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  for (const auto& name : split_line(line)) {
    const std::string trimmed = trim(name);
    if (trimmed.empty())
      throw ParseError("empty column name", 1, table.columns.size() + 1);
    table.columns.push_back(trimmed);
  }

  std::vector<std::vector<double>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != table.columns.size())
      throw ParseError("expected " + std::to_string(table.columns.size()) + " cells, found " +
                           std::to_string(cells.size()),
                       lineno, cells.size());
    std::vector<double> row(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j)
      row[j] = parse_cell(cells[j], lineno, j + 1);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("no data rows", lineno, 1);

  table.values.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(table.columns.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return table;
}

}  // namespace coqr
