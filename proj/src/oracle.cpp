#include "interlace/oracle.hpp"

#include "interlace/error.hpp"

#include <array>
#include <string>
#include <vector>

namespace interlace {

namespace {

constexpr int kMaxOracleN = 12;

void check_enumeration_size(int n) {
    if (n > kMaxOracleN) {
        throw_invalid("brute-force enumeration supports n <= " + std::to_string(kMaxOracleN) +
                      ", got n = " + std::to_string(n));
    }
}

// Dense sign matrix: tiny n makes a flat array the fastest lookup.
struct DenseSigns {
    int n;
    std::vector<int> m;

    explicit DenseSigns(const SignedNetwork& x) : n(x.n()), m(static_cast<std::size_t>(n) * n, 0) {
        for (int i = 0; i < n; ++i) {
            for (const auto& e : x.row(i)) {
                m[static_cast<std::size_t>(i) * n + e.to] = e.sign;
            }
        }
    }

    int at(int i, int j) const { return m[static_cast<std::size_t>(i) * n + j]; }
};

// Order-2 sum: tuples (i1,i2,i3,i4) with i1 != i3 and i2 != i4, product
// X(i1,i2) X(i3,i2) X(i3,i4) X(i1,i4).
std::int64_t brute_order2(const DenseSigns& x) {
    std::int64_t sum = 0;
    for (int i1 = 0; i1 < x.n; ++i1) {
        for (int i3 = 0; i3 < x.n; ++i3) {
            if (i3 == i1) continue;
            for (int i2 = 0; i2 < x.n; ++i2) {
                int p12 = x.at(i1, i2) * x.at(i3, i2);
                if (p12 == 0) continue;
                for (int i4 = 0; i4 < x.n; ++i4) {
                    if (i4 == i2) continue;
                    sum += p12 * x.at(i3, i4) * x.at(i1, i4);
                }
            }
        }
    }
    return sum;
}

// Order-3 sum: odd positions (i1,i3,i5) pairwise distinct, even positions
// (i2,i4,i6) pairwise distinct, product
// X(i1,i2) X(i3,i2) X(i3,i4) X(i5,i4) X(i5,i6) X(i1,i6).
std::int64_t brute_order3(const DenseSigns& x) {
    std::int64_t sum = 0;
    for (int i1 = 0; i1 < x.n; ++i1) {
        for (int i3 = 0; i3 < x.n; ++i3) {
            if (i3 == i1) continue;
            for (int i5 = 0; i5 < x.n; ++i5) {
                if (i5 == i1 || i5 == i3) continue;
                for (int i2 = 0; i2 < x.n; ++i2) {
                    int p12 = x.at(i1, i2) * x.at(i3, i2);
                    if (p12 == 0) continue;
                    for (int i4 = 0; i4 < x.n; ++i4) {
                        if (i4 == i2) continue;
                        int p34 = x.at(i3, i4) * x.at(i5, i4);
                        if (p34 == 0) continue;
                        for (int i6 = 0; i6 < x.n; ++i6) {
                            if (i6 == i2 || i6 == i4) continue;
                            sum += p12 * p34 * x.at(i5, i6) * x.at(i1, i6);
                        }
                    }
                }
            }
        }
    }
    return sum;
}

void check_order(int m) {
    if (m != 2 && m != 3) {
        throw_invalid("brute-force order must be 2 or 3, got " + std::to_string(m));
    }
}

} // namespace

std::int64_t brute_u(const SignedNetwork& x, int m) {
    check_order(m);
    check_enumeration_size(x.n());
    DenseSigns dense(x);
    return m == 2 ? brute_order2(dense) : brute_order3(dense);
}

std::int64_t brute_u(const Network& g, int m) {
    return brute_u(as_signed(g), m);
}

std::int64_t brute_c(const Network& g, int m) {
    return brute_u(as_signed(g), m);
}

OracleCounts cycle_balance_counts(const SignedNetwork& x, int m) {
    if (m < 3) {
        throw_invalid("cycle length must be at least 3, got " + std::to_string(m));
    }
    check_enumeration_size(x.n());
    const int n = x.n();
    DenseSigns dense(x);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (dense.at(i, j) != dense.at(j, i)) {
                throw_invalid("cycle_balance_counts requires a symmetric signed graph");
            }
        }
    }

    OracleCounts counts;
    std::vector<int> tuple(static_cast<std::size_t>(m), 0);
    std::array<bool, kMaxOracleN> used{};

    // Depth-first walk over ordered tuples of distinct nodes; the edge to
    // the previous node must exist, and the final step closes the cycle.
    auto descend = [&](auto&& self, int depth, int product) -> void {
        if (depth == m) {
            int closing = dense.at(tuple[static_cast<std::size_t>(m - 1)], tuple[0]);
            if (closing == 0) return;
            int p = product * closing;
            ++counts.abs_total;
            counts.total += p;
            if (p > 0) {
                ++counts.balanced;
            } else {
                ++counts.unbalanced;
            }
            return;
        }
        for (int v = 0; v < n; ++v) {
            if (used[static_cast<std::size_t>(v)]) continue;
            int step = depth == 0 ? 1 : dense.at(tuple[static_cast<std::size_t>(depth - 1)], v);
            if (step == 0) continue;
            used[static_cast<std::size_t>(v)] = true;
            tuple[static_cast<std::size_t>(depth)] = v;
            self(self, depth + 1, product * step);
            used[static_cast<std::size_t>(v)] = false;
        }
    };
    descend(descend, 0, 1);
    return counts;
}

} // namespace interlace
