#pragma once

#include <Eigen/Dense>
#include <istream>
#include <string>

namespace riskfloor {

/// A sample D_n: feature matrix X (n x d) and responses Y (n).
struct Dataset {
    Eigen::MatrixXd X;
    Eigen::VectorXd Y;

    Eigen::Index n() const { return Y.size(); }
    Eigen::Index d() const { return X.cols(); }

    /// Throws DomainError on shape mismatch, n == 0, d == 0 or non-finite entries.
    void validate() const;

    /// First `count` rows.
    Dataset head(Eigen::Index count) const;
};

// Raised by read_csv; row is the 1-based line number of the first bad line.
class CsvError : public std::runtime_error {
public:
    CsvError(const std::string& what, long row) : std::runtime_error(what), row_(row) {}
    long row() const noexcept { return row_; }

private:
    long row_;
};

/// Header `x1,...,xd,y`, '.' decimal point, no quoting.
Dataset read_csv(std::istream& in);
Dataset read_csv_file(const std::string& path);
void write_csv(std::ostream& out, const Dataset& data);

}  // namespace riskfloor
