#pragma once

#include "interlace/dcmm.hpp"
#include "interlace/graph.hpp"
#include "interlace/stats.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace interlace {

/// One Monte Carlo study: a benchmark case, its size parameters, either a
/// fixed mixing parameter b or an SNR target that calibration resolves to
/// one, and the replication/test settings.
struct ExperimentSpec {
    int case_id = 1;
    int n = 0;
    int k = 0;
    double beta = 0.0;
    std::optional<double> b;          ///< exactly one of b / target_snr
    std::optional<double> target_snr; ///< exactly one of b / target_snr
    int replicates = 0;
    double alpha = 0.05;
    int order = 2;
    std::uint64_t seed = 0;
};

/// Fixed-width histogram of the z-scored statistic under both hypotheses:
/// 41 bins spanning [-5, max(5, snr_theoretical + 4)], values outside the
/// span counted in the edge bins.
struct Histogram {
    double lo = -5.0;
    double hi = 5.0;
    std::vector<std::int64_t> null_counts;
    std::vector<std::int64_t> alt_counts;
};

/// Aggregated Monte Carlo results. Moments are over the z-scored
/// statistic; degenerate replicates (both interlacing counts zero) are
/// excluded from every estimate and reported in the degenerate counters.
/// With fewer than two usable replicates the sd fields are NaN.
struct McSummary {
    double null_mean = 0.0;
    double null_sd = 0.0;
    double alt_mean = 0.0;
    double alt_sd = 0.0;
    double type1 = 0.0;          ///< null rejection rate at alpha
    double power = 0.0;          ///< alternative rejection rate at alpha
    double var_ratio = 0.0;      ///< Var(Q) / (c * mean(C)), c = 128 undirected / 64 directed
    Histogram histogram;
    double snr_theoretical = 0.0;
    int replicates = 0;
    double b_used = 0.0;
    int degenerate_null = 0;
    int degenerate_alt = 0;
};

/// Pairwise comparison of an ordered list of networks: upper-triangular
/// statistic and p-value matrices stored row-major over pairs i <= j.
/// Diagonal cells are 0 / 0.5 by convention; cells whose pair has a
/// degenerate denominator are missing.
struct ScanResult {
    int t = 0;
    std::vector<std::optional<double>> stats;
    std::vector<std::optional<double>> pvalues;

    /// Index of pair (i, j), i <= j, in the row-major triangle.
    std::size_t index(int i, int j) const {
        auto ti = static_cast<std::size_t>(t);
        auto si = static_cast<std::size_t>(i);
        return si * ti - si * (si - 1) / 2 + static_cast<std::size_t>(j - i);
    }
};

/// Runs the full Monte Carlo protocol for a spec: builds the case's
/// (Omega, Omega~) pair once, then per replicate draws two networks from
/// Omega (the null pair) and one from Omega~ (paired with the first for
/// the alternative), and aggregates the reports. Replicates fan out over
/// `workers` threads (0 = one per hardware thread); the result is
/// byte-identical for every worker count.
McSummary run_monte_carlo(const ExperimentSpec& spec, int workers = 0);

/// Compares every pair of the list (order-2 or order-3 statistic); all
/// graphs must share n and directedness, and order 3 needs undirected
/// inputs.
ScanResult scan_pairwise(const std::vector<Network>& graphs, int order);

nlohmann::ordered_json to_json(const McSummary& summary);
nlohmann::ordered_json to_json(const ScanResult& result);

/// Key,value rows, one metric per line.
std::string to_csv(const McSummary& summary);

/// Header "i,j,statistic,p_value" plus one row per pair i <= j; missing
/// cells serialize as empty fields.
std::string to_csv(const ScanResult& result);

} // namespace interlace
