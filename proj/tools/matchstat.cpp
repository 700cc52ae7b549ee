// matchstat: matched-pair tests, conditional logistic regression fits and
// Monte Carlo equivalence experiments from the command line.
//
// Exit codes: 0 success, 1 internal error, 2 input/contract error,
// 3 non-convergence of the maximum-likelihood fit.

#include "matchstat/classic_tests.hpp"
#include "matchstat/clr.hpp"
#include "matchstat/equivalence.hpp"
#include "matchstat/error.hpp"
#include "matchstat/matched_data.hpp"
#include "matchstat/report_json.hpp"
#include "matchstat/strata.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace matchstat;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;
constexpr int kExitNoConvergence = 3;

struct NonConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double parse_number(std::string s, const std::string& what) {
    s.erase(0, s.find_first_not_of(" \t"));
    s.erase(s.find_last_not_of(" \t\r") + 1);
    if (!s.empty() && s.front() == '+') s.erase(0, 1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
        throw Error("invalid number '" + s + "' in " + what);
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

// `identity`, `diag:a,b,...`, or a CSV file with p rows of p numbers.
Matrix parse_sigma(const std::string& spec, std::size_t p) {
    if (spec == "identity") return Matrix::identity(p);
    Matrix m(p, p);
    if (spec.rfind("diag:", 0) == 0) {
        const auto parts = split(spec.substr(5), ',');
        if (parts.size() != p)
            throw Error("sigma diag needs " + std::to_string(p) + " values, got " + std::to_string(parts.size()));
        for (std::size_t i = 0; i < p; ++i) m(i, i) = parse_number(parts[i], "--sigma");
    } else {
        std::ifstream in(spec);
        if (!in) throw Error("sigma must be 'identity', 'diag:...' or a readable CSV file: '" + spec + "'");
        std::string line;
        std::size_t row = 0;
        while (std::getline(in, line)) {
            if (line.empty() || line == "\r" || line.front() == '#') continue;
            const auto parts = split(line, ',');
            if (row >= p || parts.size() != p) throw Error("sigma file must hold a " + std::to_string(p) + "x" +
                                                           std::to_string(p) + " matrix");
            for (std::size_t j = 0; j < p; ++j) m(row, j) = parse_number(parts[j], "sigma file");
            ++row;
        }
        if (row != p) throw Error("sigma file must hold " + std::to_string(p) + " rows");
    }
    try {
        spd_factor(m);
    } catch (const Error&) {
        throw Error("sigma is not symmetric positive definite");
    }
    return m;
}

Vector parse_delta_vector(const std::string& s, std::size_t p) {
    const auto parts = split(s, ',');
    if (parts.size() == 1) return Vector(p, parse_number(parts[0], "--delta"));
    if (parts.size() != p)
        throw Error("--delta needs 1 or " + std::to_string(p) + " values");
    Vector d;
    for (const auto& part : parts) d.push_back(parse_number(part, "--delta"));
    return d;
}

void print_table(const TestResult& r) {
    std::printf("method     %s\n", std::string(method_name(r.method)).c_str());
    std::printf("statistic  %.6f\n", r.statistic);
    std::printf("df         %d\n", r.df);
    std::printf("p_value    %.6g\n", r.p_value);
    std::printf("n          %zu\n", r.n);
    if (!r.warning.empty()) std::printf("warning    %s\n", r.warning.c_str());
}

struct TestArgs {
    std::string kind;
    std::string data;
    std::string pvalue = "chisq";
    bool json = false;
};

int cmd_test(const TestArgs& args) {
    const MatchedDataset ds = parse_dataset_file(args.data);
    TestResult r;
    if (args.kind == "mcnemar") {
        r = mcnemar(discordant_counts(ds));
    } else if (args.kind == "hotelling") {
        const auto mode = args.pvalue == "exact-f" ? PValueMode::exact_f : PValueMode::chisq;
        r = hotelling_paired(pair_differences(ds), mode);
    } else if (args.kind == "clr-score") {
        r = score_test(pair_differences(ds));
    } else {
        const PairedDifferences z = pair_differences(ds);
        const FitResult fit = fit_mle(z);
        if (!fit.converged) throw NonConvergence("MLE unavailable: " + fit.diagnostic);
        r = args.kind == "clr-wald" ? wald_test(fit) : lr_test(fit, z);
    }
    if (args.json) std::cout << to_json(r).dump() << '\n';
    else print_table(r);
    return kExitOk;
}

struct FitArgs {
    std::string data;
    std::string strata = "pairs";
};

int cmd_fit(const FitArgs& args) {
    const MatchedDataset ds = parse_dataset_file(args.data);
    const FitResult fit = args.strata == "general" ? fit_strata_mle(ds) : fit_mle(pair_differences(ds));
    std::cout << to_json(fit).dump(2) << '\n';
    if (!fit.converged) {
        std::cerr << "matchstat: fit did not converge: " << fit.diagnostic << '\n';
        return kExitNoConvergence;
    }
    return kExitOk;
}

struct LabArgs {
    std::size_t p = 1;
    std::string delta = "0";
    std::string sigma = "identity";
    std::size_t n = 2000;
    std::size_t reps = 10000;
    std::uint64_t seed = 42;
    std::string family = "gaussian";
    std::size_t bins = 100;
    std::string out;
};

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write '" + path.string() + "'");
    f << text;
    if (!f) throw Error("failed writing '" + path.string() + "'");
}

int cmd_equivalence(const LabArgs& args) {
    const Matrix sigma = parse_sigma(args.sigma, args.p);
    const NoiseFamily family = parse_noise_family(args.family);
    const fs::path dir(args.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw Error("cannot create output directory '" + args.out + "'");

    std::vector<std::string> labels = split(args.delta, ',');
    std::vector<LocalAlternativeSpec> specs;
    for (auto& label : labels) {
        label.erase(0, label.find_first_not_of(" \t"));
        label.erase(label.find_last_not_of(" \t") + 1);
        LocalAlternativeSpec spec;
        spec.delta = Vector(args.p, parse_number(label, "--delta"));
        spec.sigma = sigma;
        spec.noise = family;
        spec.n = args.n;
        spec.reps = args.reps;
        spec.seed = args.seed;
        validate(spec);
        specs.push_back(std::move(spec));
    }

    std::printf("%-10s %8s %8s %12s %12s\n", "delta", "n", "reps", "ks_distance", "degenerate");
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const ExperimentReport report = run_equivalence_experiment(specs[i]);
        const std::string& d = labels[i];
        write_text_file(dir / ("report_delta" + d + ".json"), to_json(report).dump(2) + "\n");

        std::vector<double> both = report.empirical;
        both.insert(both.end(), report.k_samples.begin(), report.k_samples.end());
        const auto [mn, mx] = std::minmax_element(both.begin(), both.end());
        for (const auto& [name, samples] :
             {std::pair{"k_hist_delta", &report.k_samples}, std::pair{"emp_hist_delta", &report.empirical}}) {
            std::ostringstream csv;
            write_histogram_csv(csv, histogram(*samples, args.bins, *mn, *mx));
            write_text_file(dir / (std::string(name) + d + ".csv"), csv.str());
        }
        std::printf("%-10s %8zu %8zu %12.6f %12zu\n", d.c_str(), specs[i].n, specs[i].reps, report.ks_distance,
                    report.degenerate_count);
    }
    return kExitOk;
}

struct SampleKArgs {
    std::size_t p = 1;
    std::string delta = "0";
    std::string sigma = "identity";
    std::size_t reps = 10000;
    std::uint64_t seed = 7;
    std::string out;
};

int cmd_sample_k(const SampleKArgs& args) {
    const Matrix sigma = parse_sigma(args.sigma, args.p);
    const Vector delta = parse_delta_vector(args.delta, args.p);
    const std::vector<double> k = sample_k(delta, sigma, args.reps, args.seed);
    std::ostringstream text;
    text.precision(17);
    for (double v : k) text << v << '\n';
    if (args.out.empty()) std::cout << text.str();
    else write_text_file(args.out, text.str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Matched-pair hypothesis tests and conditional logistic regression"};
    app.require_subcommand(1);

    TestArgs test_args;
    auto* test = app.add_subcommand("test", "Run a hypothesis test on a matched CSV file");
    test->add_option("kind", test_args.kind, "Test to run")
        ->required()
        ->check(CLI::IsMember({"mcnemar", "hotelling", "clr-score", "clr-wald", "clr-lr"}));
    test->add_option("--data", test_args.data, "CSV file with header stratum,y,x1..xp")->required();
    test->add_option("--pvalue", test_args.pvalue, "Hotelling reference distribution")
        ->check(CLI::IsMember({"chisq", "exact-f"}));
    test->add_flag("--json", test_args.json, "Emit JSON");

    FitArgs fit_args;
    auto* fit = app.add_subcommand("fit", "Fit conditional logistic regression");
    fit->add_option("--data", fit_args.data, "CSV file")->required();
    fit->add_option("--strata", fit_args.strata, "pairs: 1:1 difference form; general: any strata")
        ->check(CLI::IsMember({"pairs", "general"}));

    LabArgs lab_args;
    auto* lab = app.add_subcommand("equivalence", "Simulate n(xi_sc - xi_hot) against the limit K");
    lab->add_option("--p", lab_args.p, "Predictor dimension")->check(CLI::PositiveNumber);
    lab->add_option("--delta", lab_args.delta, "Comma-separated deviations, one panel each");
    lab->add_option("--sigma", lab_args.sigma, "identity | diag:a,b,... | CSV file");
    lab->add_option("--n", lab_args.n, "Pairs per replicate")->check(CLI::Range(std::size_t{2}, std::size_t{100000000}));
    lab->add_option("--reps", lab_args.reps, "Replicates")->check(CLI::PositiveNumber);
    lab->add_option("--seed", lab_args.seed, "Random seed");
    lab->add_option("--family", lab_args.family, "Noise family")
        ->check(CLI::IsMember({"gaussian", "uniform_scaled", "rademacher_mix"}));
    lab->add_option("--bins", lab_args.bins, "Histogram bins")->check(CLI::PositiveNumber);
    lab->add_option("--out", lab_args.out, "Output directory")->required();

    SampleKArgs k_args;
    auto* samplek = app.add_subcommand("sample-k", "Draw samples of the limit variable K");
    samplek->add_option("--p", k_args.p, "Predictor dimension")->check(CLI::PositiveNumber);
    samplek->add_option("--delta", k_args.delta, "Deviation (one value, or p values)");
    samplek->add_option("--sigma", k_args.sigma, "identity | diag:a,b,... | CSV file");
    samplek->add_option("--reps", k_args.reps, "Number of samples")->check(CLI::PositiveNumber);
    samplek->add_option("--seed", k_args.seed, "Random seed");
    samplek->add_option("--out", k_args.out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (*test) return cmd_test(test_args);
        if (*fit) return cmd_fit(fit_args);
        if (*lab) return cmd_equivalence(lab_args);
        if (*samplek) return cmd_sample_k(k_args);
    } catch (const NonConvergence& e) {
        std::cerr << "matchstat: " << e.what() << '\n';
        return kExitNoConvergence;
    } catch (const Error& e) {
        std::cerr << "matchstat: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "matchstat: internal error: " << e.what() << '\n';
        return kExitInternal;
    }
    return kExitInternal;
}
