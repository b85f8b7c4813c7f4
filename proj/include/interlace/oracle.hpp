#pragma once

#include "interlace/graph.hpp"

#include <cstdint>

namespace interlace {

/// Ordered-tuple cycle tallies for a signed graph. Every undirected cycle
/// appears 2m times (m rotations x 2 directions), so these follow the same
/// convention as the displayed interlacing sums.
struct OracleCounts {
    std::int64_t total = 0;     ///< signed sum of edge-weight products
    std::int64_t abs_total = 0; ///< number of ordered closed tuples
    std::int64_t balanced = 0;  ///< tuples with product +1
    std::int64_t unbalanced = 0;///< tuples with product -1
};

/// Brute-force interlacing sum of order m (2 or 3): iterates all index
/// tuples whose odd-position entries are pairwise distinct and whose
/// even-position entries are pairwise distinct, accumulating the
/// alternating product of matrix entries. Ground truth for the fast
/// kernels; guarded to n <= 12 because the order-3 pass is O(n^6).
std::int64_t brute_u(const SignedNetwork& x, int m);
std::int64_t brute_u(const Network& g, int m);

/// Same enumeration on the unsigned adjacency (every entry weight 1);
/// always nonnegative.
std::int64_t brute_c(const Network& g, int m);

/// Enumerates ordered m-tuples of fully distinct nodes forming closed
/// walks in a symmetric signed graph and classifies each by the sign of
/// its edge-weight product. Requires m >= 3 and n <= 12.
OracleCounts cycle_balance_counts(const SignedNetwork& x, int m);

} // namespace interlace
