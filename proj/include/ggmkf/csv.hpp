#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

namespace ggmkf {

struct CsvMatrix {
    Eigen::MatrixXd values;
    std::vector<std::string> header;  // empty if no header row
};

// Comma-separated numeric matrix; an optional single header row is detected
// by its first line being non-numeric. Blank lines are ignored. Throws
// CsvParseError naming the offending 1-based row and column.
CsvMatrix read_matrix_csv(std::istream& in);
CsvMatrix read_matrix_csv_file(const std::string& path);

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& values,
                      const std::vector<std::string>& header = {});

// General string table with a mandatory header row; used for result files
// whose columns are not all numeric.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvTable read_table_csv(std::istream& in);
void write_table_csv(std::ostream& out, const CsvTable& table);

} // namespace ggmkf
