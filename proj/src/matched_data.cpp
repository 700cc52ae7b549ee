#include "matchstat/matched_data.hpp"

#include "matchstat/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

namespace matchstat {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return out;
}

[[noreturn]] void fail_at(std::size_t line, const std::string& what) {
    throw Error(what + " (line " + std::to_string(line) + ")");
}

double parse_real(std::string_view cell, std::size_t line) {
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size())
        fail_at(line, "predictor value '" + std::string(cell) + "' is not a number");
    if (!std::isfinite(v)) fail_at(line, "predictor value '" + std::string(cell) + "' is not finite");
    return v;
}

}  // namespace

std::size_t Stratum::case_count() const noexcept {
    std::size_t k = 0;
    for (const auto& o : members) k += o.y == 1 ? 1 : 0;
    return k;
}

MatchedDataset::MatchedDataset(std::vector<Stratum> strata, std::vector<std::string> predictor_names)
    : strata_(std::move(strata)), names_(std::move(predictor_names)) {
    if (names_.empty()) throw Error("dataset needs at least one predictor");
    std::unordered_set<std::string> seen;
    for (const auto& s : strata_) {
        if (!seen.insert(s.id).second) throw Error("duplicate stratum id '" + s.id + "'");
        if (s.members.empty()) throw Error("stratum '" + s.id + "' is empty");
        for (const auto& o : s.members) {
            if (o.y != 0 && o.y != 1) throw Error("label must be 0 or 1 in stratum '" + s.id + "'");
            if (o.x.size() != names_.size())
                throw Error("stratum '" + s.id + "' has an observation of wrong dimension");
            for (double v : o.x)
                if (!std::isfinite(v)) throw Error("stratum '" + s.id + "' has a non-finite predictor");
        }
    }
}

PairedDifferences::PairedDifferences(Matrix z) : z_(std::move(z)) {
    if (z_.rows() == 0) throw Error("paired differences need at least one pair");
    if (z_.cols() == 0) throw Error("paired differences need at least one predictor");
    for (double v : z_.data())
        if (!std::isfinite(v)) throw Error("paired differences must be finite");
}

PairedDifferences PairedDifferences::from_rows(const std::vector<Vector>& rows) {
    return PairedDifferences(Matrix::from_rows(rows));
}

MatchedDataset parse_dataset(std::istream& in) {
    std::string raw;
    std::size_t line_no = 0;
    std::vector<std::string> names;
    bool have_header = false;
    std::vector<Stratum> strata;
    std::unordered_map<std::string, std::size_t> index;

    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = trim(raw);
        if (line_no == 1 && line.substr(0, 3) == "\xEF\xBB\xBF") line.remove_prefix(3);
        if (line.empty() || line.front() == '#') continue;
        const auto cells = split_csv(line);

        if (!have_header) {
            if (cells.size() < 3 || cells[0] != "stratum" || cells[1] != "y")
                fail_at(line_no, "header must be 'stratum,y,x1,...,xp'");
            for (std::size_t j = 2; j < cells.size(); ++j) {
                if (cells[j].empty()) fail_at(line_no, "empty predictor name in header");
                names.emplace_back(cells[j]);
            }
            have_header = true;
            continue;
        }

        if (cells.size() != names.size() + 2)
            fail_at(line_no, "expected " + std::to_string(names.size() + 2) + " columns, found " +
                                 std::to_string(cells.size()));
        if (cells[0].empty()) fail_at(line_no, "empty stratum id");
        Observation obs;
        if (cells[1] == "0") {
            obs.y = 0;
        } else if (cells[1] == "1") {
            obs.y = 1;
        } else {
            fail_at(line_no, "label must be 0 or 1");
        }
        obs.x.reserve(names.size());
        for (std::size_t j = 2; j < cells.size(); ++j) obs.x.push_back(parse_real(cells[j], line_no));

        std::string id(cells[0]);
        auto [it, inserted] = index.try_emplace(id, strata.size());
        if (inserted) strata.push_back(Stratum{id, {}});
        strata[it->second].members.push_back(std::move(obs));
    }
    if (in.bad()) throw Error("read error");
    if (strata.empty()) throw Error("no data rows");
    return MatchedDataset(std::move(strata), std::move(names));
}

MatchedDataset parse_dataset_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open data file '" + path + "'");
    return parse_dataset(in);
}

void write_dataset(std::ostream& out, const MatchedDataset& dataset) {
    out << "stratum,y";
    for (const auto& n : dataset.predictor_names()) out << ',' << n;
    out << '\n';
    const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
    for (const auto& s : dataset.strata()) {
        for (const auto& o : s.members) {
            out << s.id << ',' << o.y;
            for (double v : o.x) out << ',' << v;
            out << '\n';
        }
    }
    out.precision(old_precision);
}

PairedDifferences pair_differences(const MatchedDataset& dataset) {
    const std::size_t p = dataset.dim();
    Matrix z(dataset.strata().size(), p);
    std::size_t i = 0;
    for (const auto& s : dataset.strata()) {
        if (s.size() != 2 || s.case_count() != 1)
            throw Error("stratum " + s.id + " is not a 1:1 discordant pair");
        const auto& a = s.members[0];
        const auto& b = s.members[1];
        const Observation& case_obs = a.y == 1 ? a : b;
        const Observation& ctrl_obs = a.y == 1 ? b : a;
        for (std::size_t j = 0; j < p; ++j) z(i, j) = case_obs.x[j] - ctrl_obs.x[j];
        ++i;
    }
    return PairedDifferences(std::move(z));
}

PairSummary summarize(const PairedDifferences& z) {
    const std::size_t n = z.size();
    const std::size_t p = z.dim();
    PairSummary s;
    s.n = n;
    s.mean.assign(p, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) s.mean[j] += z.row(i)[j];
    for (double& m : s.mean) m /= static_cast<double>(n);

    s.second_moment = Matrix(p, p);
    Matrix centered(p, p);
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = z.row(i);
        for (std::size_t j = 0; j < p; ++j) {
            const double dj = r[j] - s.mean[j];
            for (std::size_t k = 0; k <= j; ++k) {
                s.second_moment(j, k) += r[j] * r[k];
                centered(j, k) += dj * (r[k] - s.mean[k]);
            }
        }
    }
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t k = 0; k <= j; ++k) {
            s.second_moment(j, k) /= static_cast<double>(n);
            s.second_moment(k, j) = s.second_moment(j, k);
            centered(k, j) = centered(j, k);
        }
    if (n >= 2) {
        for (std::size_t j = 0; j < p; ++j)
            for (std::size_t k = 0; k < p; ++k) centered(j, k) /= static_cast<double>(n - 1);
        s.cov_unbiased = std::move(centered);
    }
    return s;
}

const Matrix& require_covariance(const PairSummary& s) {
    if (s.n < 2) throw Error("at least 2 pairs are required for the sample covariance");
    return s.cov_unbiased;
}

}  // namespace matchstat
