#pragma once

#include "interlace/graph.hpp"

#include <json.hpp>

#include <cstdint>

namespace interlace {

/// Result of one two-sample network comparison.
struct TestReport {
    int n = 0;
    bool directed = false;
    int order = 2;              ///< interlacing order (2 or 3)
    std::int64_t q_star = 0;    ///< interlacing sum of the signed difference
    std::int64_t q_a = 0;       ///< interlacing count of the first network
    std::int64_t q_b = 0;       ///< interlacing count of the second network
    double statistic = 0.0;     ///< psi (order 2) or phi (order 3)
    double z_score = 0.0;       ///< statistic; scaled by sqrt(2) for directed order 2
    double p_value = 0.0;       ///< upper-tail normal probability of z_score
};

/// Kernel selection for the interlacing sums. `automatic` picks the dense
/// kernel for n <= 2048 (matrix products win at small n) and the sparse
/// adjacency-list kernel above that.
enum class Kernel { automatic, dense, sparse };

/// Order-2 interlacing sum via the closed-form trace identity: one Gram
/// product plus O(n^2) reductions. Exact integer result; 128-bit internal
/// accumulation with an overflow error if the value leaves 64 bits.
std::int64_t q2_dense(const SignedNetwork& x);
std::int64_t q2_dense(const Network& g);

/// Same value as q2_dense, computed from adjacency lists by tallying
/// common out-neighbors of each ordered node pair; O(n * avg_deg * max_deg).
std::int64_t q2_sparse(const SignedNetwork& x);
std::int64_t q2_sparse(const Network& g);

std::int64_t q2(const SignedNetwork& x, Kernel kernel = Kernel::automatic);
std::int64_t q2(const Network& g, Kernel kernel = Kernel::automatic);

/// Order-3 interlacing sum for symmetric inputs, via the seven-term
/// trace/Hadamard identity (two matrix products plus degree reductions).
std::int64_t q3(const SignedNetwork& x, Kernel kernel = Kernel::automatic);
std::int64_t q3(const Network& g, Kernel kernel = Kernel::automatic);

/// Upper-tail standard normal probability P(N(0,1) >= z), absolute error
/// below 1e-12. Errors on non-finite input.
double normal_sf(double z);

/// Assembles a TestReport from precomputed interlacing sums. Shared by the
/// two-sample tests and the pairwise scanner so both produce bit-identical
/// statistics from the same inputs. Throws a degenerate-statistic error
/// when q_a + q_b == 0.
TestReport make_report(int n, bool directed, int order, std::int64_t q_star, std::int64_t q_a,
                       std::int64_t q_b);

/// Order-2 two-sample test: statistic q2(a-b) / (8 * sqrt(q2(a)+q2(b))),
/// z-score scaled by sqrt(2) when directed.
TestReport psi_test(const Network& a, const Network& b, Kernel kernel = Kernel::automatic);

/// Order-3 two-sample test (undirected only): statistic
/// q3(a-b) / sqrt(384 * (q3(a)+q3(b))).
TestReport phi_test(const Network& a, const Network& b, Kernel kernel = Kernel::automatic);

/// JSON form of a report, keys in declaration order.
nlohmann::ordered_json to_json(const TestReport& report);

} // namespace interlace
