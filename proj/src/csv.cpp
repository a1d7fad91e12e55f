#include "ggmkf/csv.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "ggmkf/errors.hpp"

namespace ggmkf {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

bool parse_number(const std::string& field, double& value) {
    if (field.empty()) return false;
    char* end = nullptr;
    value = std::strtod(field.c_str(), &end);
    return end == field.c_str() + field.size();
}

} // namespace

CsvMatrix read_matrix_csv(std::istream& in) {
    CsvMatrix out;
    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    int cols = -1;
    bool first_content_row = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const std::vector<std::string> fields = split_fields(line);
        std::vector<double> parsed(fields.size());
        int bad_col = -1;
        for (std::size_t c = 0; c < fields.size(); ++c)
            if (!parse_number(fields[c], parsed[c])) {
                bad_col = static_cast<int>(c) + 1;
                break;
            }
        if (bad_col >= 0) {
            if (first_content_row) {  // header row
                out.header = fields;
                first_content_row = false;
                cols = static_cast<int>(fields.size());
                continue;
            }
            throw CsvParseError(lineno, bad_col, "non-numeric value '" +
                                                     fields[bad_col - 1] + "'");
        }
        if (cols < 0) cols = static_cast<int>(fields.size());
        if (static_cast<int>(fields.size()) != cols)
            throw CsvParseError(lineno, static_cast<int>(fields.size()),
                                "expected " + std::to_string(cols) + " fields, found " +
                                    std::to_string(fields.size()));
        first_content_row = false;
        rows.push_back(std::move(parsed));
    }
    if (rows.empty()) throw CsvParseError(lineno, 1, "no numeric rows found");
    out.values.resize(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (int c = 0; c < cols; ++c) out.values(r, c) = rows[r][c];
    return out;
}

CsvMatrix read_matrix_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    return read_matrix_csv(in);
}

CsvTable read_table_csv(std::istream& in) {
    CsvTable out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        std::vector<std::string> fields = split_fields(line);
        if (out.header.empty()) {
            out.header = std::move(fields);
            continue;
        }
        if (fields.size() != out.header.size())
            throw CsvParseError(lineno, static_cast<int>(fields.size()),
                                "expected " + std::to_string(out.header.size()) +
                                    " fields, found " + std::to_string(fields.size()));
        out.rows.push_back(std::move(fields));
    }
    if (out.header.empty()) throw CsvParseError(lineno, 1, "no header row found");
    return out;
}

void write_table_csv(std::ostream& out, const CsvTable& table) {
    for (std::size_t c = 0; c < table.header.size(); ++c)
        out << (c ? "," : "") << table.header[c];
    out << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
        out << "\n";
    }
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& values,
                      const std::vector<std::string>& header) {
    out << std::setprecision(17);
    if (!header.empty()) {
        for (std::size_t c = 0; c < header.size(); ++c)
            out << (c ? "," : "") << header[c];
        out << "\n";
    }
    for (int r = 0; r < values.rows(); ++r) {
        for (int c = 0; c < values.cols(); ++c) out << (c ? "," : "") << values(r, c);
        out << "\n";
    }
}

} // namespace ggmkf
