#include "riskfloor/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "riskfloor/errors.hpp"

namespace riskfloor {
namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return false;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

}  // namespace

void Dataset::validate() const {
    if (Y.size() == 0) throw DomainError("dataset is empty");
    if (X.rows() != Y.size()) throw DomainError("row count of X differs from length of Y");
    if (X.cols() == 0) throw DomainError("dataset has no feature columns");
    if (!X.allFinite() || !Y.allFinite()) throw DomainError("dataset contains non-finite entries");
}

Dataset Dataset::head(Eigen::Index count) const {
    return Dataset{X.topRows(count), Y.head(count)};
}

Dataset read_csv(std::istream& in) {
    std::string line;
    long lineno = 0;
    std::size_t columns = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!trim(line).empty()) break;
    }
    if (trim(line).empty()) throw CsvError("missing header line", lineno == 0 ? 1 : lineno);
    {
        const auto header = split_commas(line);
        columns = header.size();
        if (columns < 2) throw CsvError("header needs at least one feature column and y", lineno);
        for (std::size_t j = 0; j + 1 < columns; ++j) {
            if (trim(header[j]) != "x" + std::to_string(j + 1)) {
                throw CsvError("header column " + std::to_string(j + 1) + " must be x" + std::to_string(j + 1),
                               lineno);
            }
        }
        if (trim(header.back()) != "y") throw CsvError("last header column must be y", lineno);
    }

    std::vector<double> values;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto cells = split_commas(line);
        if (cells.size() != columns) {
            throw CsvError("row has " + std::to_string(cells.size()) + " fields, expected " +
                               std::to_string(columns),
                           lineno);
        }
        for (auto cell : cells) {
            double v = 0.0;
            if (!parse_double(cell, v) || !std::isfinite(v)) {
                throw CsvError("malformed or non-finite number '" + std::string(trim(cell)) + "'", lineno);
            }
            values.push_back(v);
        }
        ++rows;
    }
    if (rows == 0) throw CsvError("no data rows", lineno);

    const auto d = static_cast<Eigen::Index>(columns - 1);
    Dataset data{Eigen::MatrixXd(static_cast<Eigen::Index>(rows), d),
                 Eigen::VectorXd(static_cast<Eigen::Index>(rows))};
    for (std::size_t i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            data.X(static_cast<Eigen::Index>(i), j) = values[i * columns + static_cast<std::size_t>(j)];
        }
        data.Y(static_cast<Eigen::Index>(i)) = values[i * columns + columns - 1];
    }
    return data;
}

Dataset read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CsvError("cannot open " + path, 0);
    return read_csv(in);
}

void write_csv(std::ostream& out, const Dataset& data) {
    std::ostringstream os;
    os.precision(17);
    for (Eigen::Index j = 0; j < data.d(); ++j) os << 'x' << (j + 1) << ',';
    os << "y\n";
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        for (Eigen::Index j = 0; j < data.d(); ++j) os << data.X(i, j) << ',';
        os << data.Y(i) << '\n';
    }
    out << os.str();
}

}  // namespace riskfloor
