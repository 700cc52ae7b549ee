#pragma once

#include "matchstat/classic_tests.hpp"
#include "matchstat/clr.hpp"
#include "matchstat/equivalence.hpp"

#include <nlohmann/json.hpp>

#include <ostream>

namespace matchstat {

// {method, statistic, df, p_value, n[, warning]}
nlohmann::json to_json(const TestResult& r);
// {beta, se, loglik, iterations, converged, max_grad_norm, n[, diagnostic]}
nlohmann::json to_json(const FitResult& f);
// Spec parameters, summary, quantile table and both sample vectors.
nlohmann::json to_json(const ExperimentReport& r);

// Columns bin_left,bin_right,count,density; LF line endings.
void write_histogram_csv(std::ostream& out, const HistogramData& h);

}  // namespace matchstat
