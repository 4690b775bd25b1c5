#ifndef COQR_CSV_HPP
#define COQR_CSV_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "coqr/errors.hpp"

namespace coqr {

// Numeric table from a comma-separated file: header row required, decimal
// point, UTF-8. Every data cell must parse as a finite number.
struct CsvTable {
  std::vector<std::string> columns;
  Eigen::MatrixXd values;  // rows x columns

  int column_index(const std::string& name) const;  // -1 when absent

  // Response vector plus the remaining columns as a covariate matrix.
  void split_response(const std::string& response_column, Eigen::VectorXd& response,
                      Eigen::MatrixXd& covariates,
                      std::vector<std::string>& covariate_names) const;
};

CsvTable read_csv(const std::string& path);

}  // namespace coqr

#endif  // COQR_CSV_HPP
