#include "matchstat/report_json.hpp"

#include <iomanip>
#include <limits>

namespace matchstat {

using nlohmann::json;

json to_json(const TestResult& r) {
    json j{{"method", method_name(r.method)},
           {"statistic", r.statistic},
           {"df", r.df},
           {"p_value", r.p_value},
           {"n", r.n}};
    if (!r.warning.empty()) j["warning"] = r.warning;
    return j;
}

json to_json(const FitResult& f) {
    json se = json::array();
    const Vector errors = f.standard_errors();
    if (errors.empty()) {
        for (std::size_t i = 0; i < f.beta_hat.size(); ++i) se.push_back(nullptr);
    } else {
        se = errors;
    }
    json j{{"beta", f.beta_hat},
           {"se", se},
           {"loglik", f.loglik},
           {"iterations", f.iterations},
           {"converged", f.converged},
           {"max_grad_norm", f.max_grad_norm},
           {"n", f.n}};
    if (!f.diagnostic.empty()) j["diagnostic"] = f.diagnostic;
    return j;
}

json to_json(const ExperimentReport& r) {
    json sigma = json::array();
    for (std::size_t i = 0; i < r.spec.sigma.rows(); ++i) {
        const auto row = r.spec.sigma.row(i);
        sigma.push_back(std::vector<double>(row.begin(), row.end()));
    }
    json quantiles = json::array();
    for (const auto& q : r.quantiles)
        quantiles.push_back({{"level", q.level}, {"empirical", q.empirical}, {"limit", q.limit}});
    return json{{"delta", r.spec.delta},
                {"sigma", sigma},
                {"noise_family", noise_family_name(r.spec.noise)},
                {"n", r.spec.n},
                {"reps", r.spec.reps},
                {"seed", r.spec.seed},
                {"ks_distance", r.ks_distance},
                {"degenerate_count", r.degenerate_count},
                {"quantiles", quantiles},
                {"empirical", r.empirical},
                {"k_samples", r.k_samples}};
}

void write_histogram_csv(std::ostream& out, const HistogramData& h) {
    const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
    out << "bin_left,bin_right,count,density\n";
    for (std::size_t i = 0; i < h.counts.size(); ++i)
        out << h.edges[i] << ',' << h.edges[i + 1] << ',' << h.counts[i] << ',' << h.densities[i] << '\n';
    out.precision(old_precision);
}

}  // namespace matchstat
