#include "interlace/experiment.hpp"

#include "interlace/error.hpp"
#include "interlace/rng.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <iomanip>
#include <limits>
#include <sstream>
#include <thread>
#include <vector>

namespace interlace {

namespace {

// Stream ids for replicate sampling, disjoint from the ids make_case uses
// under the same root seed (1..8).
namespace stream_id {
constexpr std::uint64_t null_a = 101;
constexpr std::uint64_t null_b = 102;
constexpr std::uint64_t alt = 103;
} // namespace stream_id

constexpr int kHistogramBins = 41;
constexpr double kCalibrationTol = 1e-3;

double quiet_nan() { return std::numeric_limits<double>::quiet_NaN(); }

// Compensated (Kahan) accumulator; summation order is fixed by the caller,
// making reductions bitwise reproducible.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        double y = x - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

std::int64_t interlacing_count(const Network& g, int order) {
    return order == 2 ? q2(g) : q3(g);
}

std::int64_t interlacing_count(const SignedNetwork& x, int order) {
    return order == 2 ? q2(x) : q3(x);
}

// Per-replicate record; slots are filled by whichever worker owns the
// replicate and reduced serially afterwards.
struct Replicate {
    bool null_degenerate = false;
    bool alt_degenerate = false;
    double null_z = 0.0;
    double null_p = 0.0;
    double alt_z = 0.0;
    double alt_p = 0.0;
    std::int64_t q_star_null = 0; ///< Q of the null pair's difference
    std::int64_t q_a = 0;         ///< interlacing count of the first null network
    std::int64_t q_b = 0;         ///< interlacing count of the second null network
};

void validate_spec(const ExperimentSpec& spec) {
    if (spec.b.has_value() == spec.target_snr.has_value()) {
        throw_invalid("exactly one of b and target_snr must be set");
    }
    if (spec.replicates < 1) {
        throw_invalid("replicates must be at least 1");
    }
    if (!(spec.alpha > 0.0) || !(spec.alpha < 1.0)) {
        throw_invalid("alpha must lie strictly inside (0, 1)");
    }
    if (spec.order != 2 && spec.order != 3) {
        throw_invalid("order must be 2 or 3");
    }
    if (spec.order == 3 && spec.case_id >= 4) {
        throw_invalid("order 3 is defined for undirected networks; cases 4-6 are directed");
    }
}

struct MomentEstimate {
    double mean = 0.0;
    double sd = 0.0;
    int count = 0;
};

// Two-pass mean/sd (sample sd, n-1 denominator) in replicate order.
template <typename Pick>
MomentEstimate moments(const std::vector<Replicate>& reps, bool alt, Pick pick) {
    MomentEstimate est;
    CompensatedSum total;
    for (const Replicate& r : reps) {
        if (alt ? r.alt_degenerate : r.null_degenerate) continue;
        total.add(pick(r));
        ++est.count;
    }
    if (est.count == 0) {
        est.mean = quiet_nan();
        est.sd = quiet_nan();
        return est;
    }
    est.mean = total.sum / est.count;
    if (est.count < 2) {
        est.sd = quiet_nan();
        return est;
    }
    CompensatedSum sq;
    for (const Replicate& r : reps) {
        if (alt ? r.alt_degenerate : r.null_degenerate) continue;
        double d = pick(r) - est.mean;
        sq.add(d * d);
    }
    est.sd = std::sqrt(sq.sum / (est.count - 1));
    return est;
}

std::vector<std::int64_t> bin_values(const std::vector<Replicate>& reps, bool alt,
                                     const Histogram& h) {
    std::vector<std::int64_t> counts(kHistogramBins, 0);
    double width = (h.hi - h.lo) / kHistogramBins;
    for (const Replicate& r : reps) {
        if (alt ? r.alt_degenerate : r.null_degenerate) continue;
        double z = alt ? r.alt_z : r.null_z;
        int bin = static_cast<int>(std::floor((z - h.lo) / width));
        bin = std::clamp(bin, 0, kHistogramBins - 1);
        ++counts[static_cast<std::size_t>(bin)];
    }
    return counts;
}

std::string format_double(double v) {
    std::ostringstream out;
    out << std::setprecision(17) << v;
    return out.str();
}

nlohmann::ordered_json optional_cell(const std::optional<double>& v) {
    if (!v.has_value()) {
        return nullptr;
    }
    return *v;
}

} // namespace

McSummary run_monte_carlo(const ExperimentSpec& spec, int workers) {
    validate_spec(spec);
    if (workers < 0) {
        throw_invalid("worker count cannot be negative");
    }

    double b = spec.b.has_value()
                   ? *spec.b
                   : calibrate_b(spec.case_id, spec.n, spec.k, spec.beta, *spec.target_snr,
                                 spec.seed, kCalibrationTol);
    auto [params_null, params_alt] = make_case(spec.case_id, spec.n, spec.k, spec.beta, b,
                                               spec.seed);
    const bool directed = params_null.directed;
    BernoulliMatrix omega = build_omega(params_null);
    BernoulliMatrix omega_alt = build_omega(params_alt);
    SnrReport signal = snr(omega, omega_alt, directed);

    const int reps = spec.replicates;
    std::vector<Replicate> results(static_cast<std::size_t>(reps));
    SplitStream root(spec.seed);
    const SplitStream stream_a = root.child(stream_id::null_a);
    const SplitStream stream_b = root.child(stream_id::null_b);
    const SplitStream stream_alt = root.child(stream_id::alt);

    auto run_replicate = [&](int t) {
        auto id = static_cast<std::uint64_t>(t);
        Network a = sample_network(omega, directed, stream_a.child(id).key());
        Network a2 = sample_network(omega, directed, stream_b.child(id).key());
        Network tilde = sample_network(omega_alt, directed, stream_alt.child(id).key());

        Replicate& r = results[static_cast<std::size_t>(t)];
        r.q_a = interlacing_count(a, spec.order);
        r.q_b = interlacing_count(a2, spec.order);
        std::int64_t q_alt = interlacing_count(tilde, spec.order);

        if (r.q_a == 0 && r.q_b == 0) {
            r.null_degenerate = true;
        } else {
            r.q_star_null = interlacing_count(diff(a, a2), spec.order);
            TestReport rep = make_report(spec.n, directed, spec.order, r.q_star_null, r.q_a, r.q_b);
            r.null_z = rep.z_score;
            r.null_p = rep.p_value;
        }
        if (r.q_a == 0 && q_alt == 0) {
            r.alt_degenerate = true;
        } else {
            std::int64_t q_star = interlacing_count(diff(a, tilde), spec.order);
            TestReport rep = make_report(spec.n, directed, spec.order, q_star, r.q_a, q_alt);
            r.alt_z = rep.z_score;
            r.alt_p = rep.p_value;
        }
    };

    int thread_count = workers == 0
                           ? static_cast<int>(std::max(1u, std::thread::hardware_concurrency()))
                           : workers;
    thread_count = std::min(thread_count, reps);
    if (thread_count <= 1) {
        for (int t = 0; t < reps; ++t) {
            run_replicate(t);
        }
    } else {
        std::vector<std::exception_ptr> failures(static_cast<std::size_t>(thread_count));
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(thread_count));
        for (int w = 0; w < thread_count; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (int t = w; t < reps; t += thread_count) {
                        run_replicate(t);
                    }
                } catch (...) {
                    failures[static_cast<std::size_t>(w)] = std::current_exception();
                }
            });
        }
        for (std::thread& th : pool) {
            th.join();
        }
        for (const std::exception_ptr& failure : failures) {
            if (failure) {
                std::rethrow_exception(failure);
            }
        }
    }

    McSummary out;
    out.replicates = reps;
    out.b_used = b;
    out.snr_theoretical = signal.snr;

    MomentEstimate null_est = moments(results, false, [](const Replicate& r) { return r.null_z; });
    MomentEstimate alt_est = moments(results, true, [](const Replicate& r) { return r.alt_z; });
    out.null_mean = null_est.mean;
    out.null_sd = null_est.sd;
    out.alt_mean = alt_est.mean;
    out.alt_sd = alt_est.sd;
    out.degenerate_null = reps - null_est.count;
    out.degenerate_alt = reps - alt_est.count;

    std::int64_t null_rejections = 0;
    std::int64_t alt_rejections = 0;
    for (const Replicate& r : results) {
        if (!r.null_degenerate && r.null_p <= spec.alpha) ++null_rejections;
        if (!r.alt_degenerate && r.alt_p <= spec.alpha) ++alt_rejections;
    }
    out.type1 = null_est.count > 0 ? static_cast<double>(null_rejections) / null_est.count
                                   : quiet_nan();
    out.power = alt_est.count > 0 ? static_cast<double>(alt_rejections) / alt_est.count
                                  : quiet_nan();

    // Var(Q) against c * E[C]: every non-degenerate null replicate
    // contributes its difference statistic Q and both of its interlacing
    // counts as samples of C.
    MomentEstimate q_est = moments(results, false, [](const Replicate& r) {
        return static_cast<double>(r.q_star_null);
    });
    __int128 c_total = 0;
    std::int64_t c_count = 0;
    for (const Replicate& r : results) {
        if (r.null_degenerate) continue;
        c_total += r.q_a;
        c_total += r.q_b;
        c_count += 2;
    }
    double c_mean = c_count > 0 ? static_cast<double>(c_total) / static_cast<double>(c_count)
                                : 0.0;
    double c_scale = directed ? 64.0 : 128.0;
    if (q_est.count >= 2 && c_mean > 0.0) {
        out.var_ratio = q_est.sd * q_est.sd / (c_scale * c_mean);
    } else {
        out.var_ratio = quiet_nan();
    }

    out.histogram.lo = -5.0;
    out.histogram.hi = std::max(5.0, signal.snr + 4.0);
    out.histogram.null_counts = bin_values(results, false, out.histogram);
    out.histogram.alt_counts = bin_values(results, true, out.histogram);
    return out;
}

ScanResult scan_pairwise(const std::vector<Network>& graphs, int order) {
    if (order != 2 && order != 3) {
        throw_invalid("order must be 2 or 3");
    }
    if (graphs.size() < 2) {
        throw_invalid("pairwise scanning needs at least 2 networks, got " +
                      std::to_string(graphs.size()));
    }
    const int n = graphs.front().n();
    const bool directed = graphs.front().directed();
    for (std::size_t i = 1; i < graphs.size(); ++i) {
        if (graphs[i].n() != n || graphs[i].directed() != directed) {
            throw_invalid("network " + std::to_string(i) +
                          " differs in size or directedness from the first");
        }
    }
    if (order == 3 && directed) {
        throw_invalid("order 3 is defined for undirected networks");
    }

    const int t = static_cast<int>(graphs.size());
    ScanResult out;
    out.t = t;
    std::size_t cells = static_cast<std::size_t>(t) * (t + 1) / 2;
    out.stats.assign(cells, std::nullopt);
    out.pvalues.assign(cells, std::nullopt);

    std::vector<std::int64_t> counts(graphs.size());
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        counts[i] = interlacing_count(graphs[i], order);
    }

    for (int i = 0; i < t; ++i) {
        for (int j = i; j < t; ++j) {
            std::size_t cell = out.index(i, j);
            if (i == j) {
                out.stats[cell] = 0.0;
                out.pvalues[cell] = 0.5;
                continue;
            }
            auto si = static_cast<std::size_t>(i);
            auto sj = static_cast<std::size_t>(j);
            if (counts[si] == 0 && counts[sj] == 0) {
                continue; // degenerate denominator: leave the cell missing
            }
            std::int64_t q_star = interlacing_count(diff(graphs[si], graphs[sj]), order);
            TestReport rep = make_report(n, directed, order, q_star, counts[si], counts[sj]);
            out.stats[cell] = rep.statistic;
            out.pvalues[cell] = rep.p_value;
        }
    }
    return out;
}

nlohmann::ordered_json to_json(const McSummary& summary) {
    nlohmann::ordered_json j;
    j["null_mean"] = summary.null_mean;
    j["null_sd"] = summary.null_sd;
    j["alt_mean"] = summary.alt_mean;
    j["alt_sd"] = summary.alt_sd;
    j["type1"] = summary.type1;
    j["power"] = summary.power;
    j["var_ratio"] = summary.var_ratio;
    j["histogram"] = {{"lo", summary.histogram.lo},
                      {"hi", summary.histogram.hi},
                      {"null_counts", summary.histogram.null_counts},
                      {"alt_counts", summary.histogram.alt_counts}};
    j["snr_theoretical"] = summary.snr_theoretical;
    j["replicates"] = summary.replicates;
    j["b_used"] = summary.b_used;
    j["degenerate_null"] = summary.degenerate_null;
    j["degenerate_alt"] = summary.degenerate_alt;
    return j;
}

nlohmann::ordered_json to_json(const ScanResult& result) {
    nlohmann::ordered_json stats = nlohmann::ordered_json::array();
    nlohmann::ordered_json pvalues = nlohmann::ordered_json::array();
    for (int i = 0; i < result.t; ++i) {
        nlohmann::ordered_json stat_row = nlohmann::ordered_json::array();
        nlohmann::ordered_json p_row = nlohmann::ordered_json::array();
        for (int j = 0; j < result.t; ++j) {
            if (j < i) { // below the diagonal: not part of the triangle
                stat_row.push_back(nullptr);
                p_row.push_back(nullptr);
            } else {
                std::size_t cell = result.index(i, j);
                stat_row.push_back(optional_cell(result.stats[cell]));
                p_row.push_back(optional_cell(result.pvalues[cell]));
            }
        }
        stats.push_back(std::move(stat_row));
        pvalues.push_back(std::move(p_row));
    }
    nlohmann::ordered_json j;
    j["t"] = result.t;
    j["stats"] = std::move(stats);
    j["pvalues"] = std::move(pvalues);
    return j;
}

std::string to_csv(const McSummary& summary) {
    std::ostringstream out;
    out << "metric,value\n";
    out << "null_mean," << format_double(summary.null_mean) << "\n";
    out << "null_sd," << format_double(summary.null_sd) << "\n";
    out << "alt_mean," << format_double(summary.alt_mean) << "\n";
    out << "alt_sd," << format_double(summary.alt_sd) << "\n";
    out << "type1," << format_double(summary.type1) << "\n";
    out << "power," << format_double(summary.power) << "\n";
    out << "var_ratio," << format_double(summary.var_ratio) << "\n";
    out << "snr_theoretical," << format_double(summary.snr_theoretical) << "\n";
    out << "replicates," << summary.replicates << "\n";
    out << "b_used," << format_double(summary.b_used) << "\n";
    out << "degenerate_null," << summary.degenerate_null << "\n";
    out << "degenerate_alt," << summary.degenerate_alt << "\n";
    return out.str();
}

std::string to_csv(const ScanResult& result) {
    std::ostringstream out;
    out << "i,j,statistic,p_value\n";
    for (int i = 0; i < result.t; ++i) {
        for (int j = i; j < result.t; ++j) {
            std::size_t cell = result.index(i, j);
            out << i << "," << j << ",";
            if (result.stats[cell].has_value()) {
                out << format_double(*result.stats[cell]);
            }
            out << ",";
            if (result.pvalues[cell].has_value()) {
                out << format_double(*result.pvalues[cell]);
            }
            out << "\n";
        }
    }
    return out.str();
}

} // namespace interlace
