// Command-line surface for the interlacing balance toolkit: two-sample
// comparison, pairwise scanning, Monte Carlo simulation, SNR calibration,
// and a brute-force self-check of the counting kernels.

#include "interlace/error.hpp"
#include "interlace/experiment.hpp"
#include "interlace/oracle.hpp"
#include "interlace/rng.hpp"
#include "interlace/stats.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace interlace;

struct CompareArgs {
    std::string a;
    std::string b;
    bool directed = false;
    int order = 2;
    std::string format = "json";
};

struct ScanArgs {
    std::string manifest;
    bool directed = false;
    int order = 2;
    std::string format = "csv";
};

struct SimulateArgs {
    int case_id = 1;
    int n = 0;
    int k = 0;
    double beta = 0.0;
    double b = 0.0;
    double target_snr = 0.0;
    bool has_b = false;
    bool has_target = false;
    int reps = 0;
    double alpha = 0.05;
    int order = 2;
    std::uint64_t seed = 0;
    int workers = 0;
};

struct CalibrateArgs {
    int case_id = 1;
    int n = 0;
    int k = 0;
    double beta = 0.0;
    double target_snr = 0.0;
    double tol = 1e-3;
    std::uint64_t seed = 0;
};

struct OracleArgs {
    int n_max = 0;
    std::int64_t trials = 0;
    std::uint64_t seed = 0;
};

void require_undirected_for_order3(int order, bool directed) {
    if (order == 3 && directed) {
        throw_invalid("--order 3 is defined for undirected networks; drop --directed");
    }
}

// Both files describe the same node universe, so the shared node count is
// the largest id seen in either file (isolated top nodes stay countable).
void align_sizes(std::vector<Network>& graphs, const std::vector<std::string>& paths,
                 bool directed) {
    int n = 0;
    for (const Network& g : graphs) {
        n = std::max(n, g.n());
    }
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        if (graphs[i].n() != n) {
            graphs[i] = load_edge_list_file(paths[i], n, directed);
        }
    }
}

int run_compare(const CompareArgs& args) {
    require_undirected_for_order3(args.order, args.directed);
    std::vector<Network> pair;
    pair.push_back(load_edge_list_file(args.a, std::nullopt, args.directed));
    pair.push_back(load_edge_list_file(args.b, std::nullopt, args.directed));
    align_sizes(pair, {args.a, args.b}, args.directed);

    TestReport report = args.order == 2 ? psi_test(pair[0], pair[1]) : phi_test(pair[0], pair[1]);
    nlohmann::ordered_json j = to_json(report);
    if (args.format == "json") {
        std::cout << j.dump(2) << "\n";
    } else {
        for (auto it = j.begin(); it != j.end(); ++it) {
            std::cout << it.key() << ": " << it.value().dump() << "\n";
        }
    }
    return 0;
}

std::vector<std::string> read_manifest(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) {
        throw_invalid("cannot open manifest file: " + manifest_path);
    }
    std::filesystem::path base = std::filesystem::path(manifest_path).parent_path();
    std::vector<std::string> paths;
    std::string line;
    while (std::getline(in, line)) {
        std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) {
            continue;
        }
        std::size_t last = line.find_last_not_of(" \t\r");
        std::string trimmed = line.substr(first, last - first + 1);
        if (trimmed[0] == '#') {
            continue;
        }
        std::filesystem::path p(trimmed);
        paths.push_back(p.is_absolute() ? p.string() : (base / p).string());
    }
    return paths;
}

int run_scan(const ScanArgs& args) {
    require_undirected_for_order3(args.order, args.directed);
    std::vector<std::string> paths = read_manifest(args.manifest);
    std::vector<Network> graphs;
    graphs.reserve(paths.size());
    for (const std::string& path : paths) {
        graphs.push_back(load_edge_list_file(path, std::nullopt, args.directed));
    }
    align_sizes(graphs, paths, args.directed);

    ScanResult result = scan_pairwise(graphs, args.order);
    if (args.format == "csv") {
        std::cout << to_csv(result);
    } else {
        std::cout << to_json(result).dump(2) << "\n";
    }
    return 0;
}

int run_simulate(const SimulateArgs& args) {
    ExperimentSpec spec;
    spec.case_id = args.case_id;
    spec.n = args.n;
    spec.k = args.k;
    spec.beta = args.beta;
    if (args.has_b) {
        spec.b = args.b;
    }
    if (args.has_target) {
        spec.target_snr = args.target_snr;
    }
    spec.replicates = args.reps;
    spec.alpha = args.alpha;
    spec.order = args.order;
    spec.seed = args.seed;
    McSummary summary = run_monte_carlo(spec, args.workers);
    std::cout << to_json(summary).dump(2) << "\n";
    return 0;
}

int run_calibrate(const CalibrateArgs& args) {
    double b = calibrate_b(args.case_id, args.n, args.k, args.beta, args.target_snr, args.seed,
                           args.tol);
    auto [params_null, params_alt] = make_case(args.case_id, args.n, args.k, args.beta, b,
                                               args.seed);
    SnrReport achieved = snr(build_omega(params_null), build_omega(params_alt),
                             params_null.directed);
    nlohmann::ordered_json j;
    j["b"] = b;
    j["snr"] = achieved.snr;
    j["target_snr"] = args.target_snr;
    j["tol"] = args.tol;
    std::cout << j.dump(2) << "\n";
    return 0;
}

SignedNetwork random_signed(SplitStream& s, int n, bool symmetric, double density) {
    std::vector<int> grid(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0);
    auto at = [&](int i, int j) -> int& {
        return grid[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
                    static_cast<std::size_t>(j)];
    };
    for (int i = 0; i < n; ++i) {
        for (int j = symmetric ? i + 1 : 0; j < n; ++j) {
            if (j == i) {
                continue;
            }
            if (s.next_unit() < density) {
                int sign = s.next_unit() < 0.5 ? -1 : 1;
                at(i, j) = sign;
                if (symmetric) {
                    at(j, i) = sign;
                }
            }
        }
    }
    SignedNetwork x(n, !symmetric);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (at(i, j) != 0) {
                x.push_entry(i, j, at(i, j));
            }
        }
    }
    return x;
}

int run_oracle_check(const OracleArgs& args) {
    if (args.trials < 1) {
        throw_invalid("--trials must be positive");
    }
    SplitStream root(args.seed);
    std::int64_t matched = 0;
    for (std::int64_t t = 0; t < args.trials; ++t) {
        SplitStream s = root.child(static_cast<std::uint64_t>(t));
        int n = 2 + static_cast<int>(s.next_unit() * (args.n_max - 1));
        n = std::min(n, args.n_max);
        double density = s.next_range(0.2, 0.7);
        bool order3 = t % 2 == 1; // alternate the two interlacing orders
        bool symmetric = order3 || s.next_unit() < 0.5;
        SignedNetwork x = random_signed(s, n, symmetric, density);
        std::int64_t expected = brute_u(x, order3 ? 3 : 2);
        std::int64_t dense = order3 ? q3(x, Kernel::dense) : q2(x, Kernel::dense);
        std::int64_t sparse = order3 ? q3(x, Kernel::sparse) : q2(x, Kernel::sparse);
        if (dense == expected && sparse == expected) {
            ++matched;
        }
    }
    std::cout << matched << "/" << args.trials << " exact matches\n";
    if (matched != args.trials) {
        throw_numeric("counting kernels disagree with the brute-force oracle in " +
                      std::to_string(args.trials - matched) + " of " +
                      std::to_string(args.trials) + " trials");
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-sample network comparison via interlacing balance counts"};
    app.require_subcommand(1);

    CompareArgs compare_args;
    CLI::App* compare = app.add_subcommand("compare", "Test whether two networks share a model");
    compare->add_option("--a", compare_args.a, "edge list of the first network")->required();
    compare->add_option("--b", compare_args.b, "edge list of the second network")->required();
    compare->add_flag("--directed", compare_args.directed, "treat the edge lists as directed");
    compare->add_option("--order", compare_args.order, "interlacing order (3 is undirected-only)")
        ->check(CLI::IsMember({2, 3}));
    compare->add_option("--format", compare_args.format, "output format")
        ->check(CLI::IsMember({"json", "text"}));

    ScanArgs scan_args;
    CLI::App* scan = app.add_subcommand("scan", "Compare every pair in an ordered list of networks");
    scan->add_option("--manifest", scan_args.manifest,
                     "text file with one edge-list path per line")
        ->required();
    scan->add_flag("--directed", scan_args.directed, "treat the edge lists as directed");
    scan->add_option("--order", scan_args.order, "interlacing order (3 is undirected-only)")
        ->check(CLI::IsMember({2, 3}));
    scan->add_option("--format", scan_args.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));

    SimulateArgs sim_args;
    CLI::App* simulate = app.add_subcommand("simulate",
                                            "Monte Carlo study of a benchmark model pair");
    simulate->add_option("--case", sim_args.case_id, "benchmark case (1-3 undirected, 4-6 directed)")
        ->required()
        ->check(CLI::Range(1, 6));
    simulate->add_option("--n", sim_args.n, "node count")->required();
    simulate->add_option("--k", sim_args.k, "community count")->required();
    simulate->add_option("--beta", sim_args.beta, "degree scale")->required();
    CLI::Option* opt_b = simulate->add_option("--b", sim_args.b, "mixing parameter in (0,1)");
    CLI::Option* opt_target =
        simulate->add_option("--target-snr", sim_args.target_snr,
                             "calibrate the mixing parameter to this signal-to-noise ratio");
    opt_b->excludes(opt_target);
    opt_target->excludes(opt_b);
    simulate->add_option("--reps", sim_args.reps, "Monte Carlo replicates")->required();
    simulate->add_option("--alpha", sim_args.alpha, "test level")->capture_default_str();
    simulate->add_option("--order", sim_args.order, "interlacing order (3 is undirected-only)")
        ->check(CLI::IsMember({2, 3}));
    simulate->add_option("--seed", sim_args.seed, "random seed")->capture_default_str();
    simulate->add_option("--workers", sim_args.workers,
                         "worker threads (0 = one per hardware thread); never changes output");

    CalibrateArgs cal_args;
    CLI::App* calibrate = app.add_subcommand("calibrate",
                                             "Solve for the mixing parameter hitting an SNR target");
    calibrate->add_option("--case", cal_args.case_id, "benchmark case (1-3 undirected, 4-6 directed)")
        ->required()
        ->check(CLI::Range(1, 6));
    calibrate->add_option("--n", cal_args.n, "node count")->required();
    calibrate->add_option("--k", cal_args.k, "community count")->required();
    calibrate->add_option("--beta", cal_args.beta, "degree scale")->required();
    calibrate->add_option("--target-snr", cal_args.target_snr, "signal-to-noise ratio to hit")
        ->required();
    calibrate->add_option("--tol", cal_args.tol, "relative tolerance")->capture_default_str();
    calibrate->add_option("--seed", cal_args.seed, "random seed")->capture_default_str();

    OracleArgs oracle_args;
    CLI::App* oracle = app.add_subcommand("oracle-check",
                                          "Check the counting kernels against brute force");
    oracle->add_option("--n-max", oracle_args.n_max, "largest instance size (at most 12)")
        ->required()
        ->check(CLI::Range(2, 12));
    oracle->add_option("--trials", oracle_args.trials, "number of random instances")->required();
    oracle->add_option("--seed", oracle_args.seed, "random seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "ERROR 2: " << e.what() << "\n";
        return 2;
    }

    try {
        if (compare->parsed()) {
            return run_compare(compare_args);
        }
        if (scan->parsed()) {
            return run_scan(scan_args);
        }
        if (simulate->parsed()) {
            sim_args.has_b = opt_b->count() > 0;
            sim_args.has_target = opt_target->count() > 0;
            return run_simulate(sim_args);
        }
        if (calibrate->parsed()) {
            return run_calibrate(cal_args);
        }
        if (oracle->parsed()) {
            return run_oracle_check(oracle_args);
        }
    } catch (const error& e) {
        std::cerr << "ERROR " << e.exit_code() << ": " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "ERROR 4: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
