#pragma once

#include "matchstat/linalg.hpp"

#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace matchstat {

struct Observation {
    int y = 0;  // 1 = case, 0 = control
    Vector x;
};

struct Stratum {
    std::string id;
    std::vector<Observation> members;

    std::size_t size() const noexcept { return members.size(); }
    std::size_t case_count() const noexcept;
};

// Strata of labeled observations sharing predictor dimension p. Strata keep
// first-appearance order; members keep row order.
class MatchedDataset {
public:
    MatchedDataset(std::vector<Stratum> strata, std::vector<std::string> predictor_names);

    std::size_t dim() const noexcept { return names_.size(); }
    const std::vector<Stratum>& strata() const noexcept { return strata_; }
    const std::vector<std::string>& predictor_names() const noexcept { return names_; }

private:
    std::vector<Stratum> strata_;
    std::vector<std::string> names_;
};

// Case-minus-control differences, one row per discordant pair.
class PairedDifferences {
public:
    explicit PairedDifferences(Matrix z);
    static PairedDifferences from_rows(const std::vector<Vector>& rows);

    std::size_t size() const noexcept { return z_.rows(); }
    std::size_t dim() const noexcept { return z_.cols(); }
    const Matrix& rows() const noexcept { return z_; }
    std::span<const double> row(std::size_t i) const noexcept { return z_.row(i); }

private:
    Matrix z_;
};

struct PairSummary {
    std::size_t n = 0;
    Vector mean;
    Matrix cov_unbiased;   // empty when n < 2
    Matrix second_moment;  // (1/n) sum Z_i Z_i^T
};

// CSV with header `stratum,y,x1,...,xp`. Lines starting with '#' and blank
// lines are skipped. Errors carry the 1-based line number.
MatchedDataset parse_dataset(std::istream& in);
MatchedDataset parse_dataset_file(const std::string& path);

// Writes the CSV form read by parse_dataset; values round-trip exactly.
void write_dataset(std::ostream& out, const MatchedDataset& dataset);

PairedDifferences pair_differences(const MatchedDataset& dataset);

// Mean, unbiased covariance and second moment. Requires n >= 1; the covariance
// is only produced for n >= 2 (see require_covariance).
PairSummary summarize(const PairedDifferences& z);
const Matrix& require_covariance(const PairSummary& s);

}  // namespace matchstat
