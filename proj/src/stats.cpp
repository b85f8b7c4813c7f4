#include "interlace/stats.hpp"

#include "interlace/error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace interlace {

namespace {

using int128 = __int128;

constexpr int kDenseLimit = 2048;

std::int64_t to_int64_checked(int128 v, const char* what) {
    if (v > static_cast<int128>(std::numeric_limits<std::int64_t>::max()) ||
        v < static_cast<int128>(std::numeric_limits<std::int64_t>::min())) {
        throw_numeric(std::string(what) + " overflows 64-bit integer range");
    }
    return static_cast<std::int64_t>(v);
}

Eigen::MatrixXd to_dense(const SignedNetwork& x) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(x.n(), x.n());
    for (int i = 0; i < x.n(); ++i) {
        for (const auto& e : x.row(i)) {
            m(i, e.to) = static_cast<double>(e.sign);
        }
    }
    return m;
}

// Entries of integer-valued matrix products stay exactly representable in
// doubles as long as every partial sum is below 2^53; the dense kernels are
// restricted to n <= kDenseLimit, which keeps them far below that.
std::int64_t exact_entry(double v) {
    return std::llround(v);
}

void require_symmetric(const SignedNetwork& x) {
    if (x.directed()) {
        throw_invalid("order-3 statistic is defined for undirected inputs only");
    }
    for (int i = 0; i < x.n(); ++i) {
        for (const auto& e : x.row(i)) {
            if (x.sign_at(e.to, i) != e.sign) {
                throw_invalid("order-3 statistic requires a symmetric matrix");
            }
        }
    }
}

std::int64_t q3_dense_impl(const SignedNetwork& x) {
    const int n = x.n();
    Eigen::MatrixXd m = to_dense(x);
    Eigen::MatrixXd m2 = m * m;
    Eigen::MatrixXd m3 = m2 * m;

    int128 frob3 = 0;       // tr(X^6) = squared Frobenius norm of X^3
    int128 deg_x4 = 0;      // sum_i d_i * (X^4)_ii
    int128 frob2 = 0;       // tr(X^4) = squared Frobenius norm of X^2
    int128 deg3 = 0;        // sum_i d_i^3
    int128 deg2 = 0;        // sum_i d_i^2
    int128 dbd = 0;         // d' B d with B = |X|, d = B 1
    for (int i = 0; i < n; ++i) {
        const std::int64_t d = static_cast<std::int64_t>(x.row(i).size());
        int128 x4_ii = 0;
        for (int j = 0; j < n; ++j) {
            std::int64_t v2 = exact_entry(m2(i, j));
            std::int64_t v3 = exact_entry(m3(i, j));
            x4_ii += static_cast<int128>(v2) * v2;
            frob3 += static_cast<int128>(v3) * v3;
        }
        frob2 += x4_ii;
        deg_x4 += static_cast<int128>(d) * x4_ii;
        deg3 += static_cast<int128>(d) * d * d;
        deg2 += static_cast<int128>(d) * d;
        std::int64_t bd_i = 0;
        for (const auto& e : x.row(i)) {
            bd_i += static_cast<std::int64_t>(x.row(e.to).size());
        }
        dbd += static_cast<int128>(d) * bd_i;
    }

    int128 q = frob3 - 6 * deg_x4 + 3 * dbd + 6 * frob2 + 4 * deg3 - 12 * deg2 +
               4 * static_cast<int128>(x.entry_count());
    return to_int64_checked(q, "order-3 interlacing sum");
}

std::int64_t q3_sparse_impl(const SignedNetwork& x) {
    const int n = x.n();
    // Row-wise X^2 with exact integer values (diagonal included: it carries
    // the degrees and feeds tr(X^4) and the X^3 pass).
    std::vector<std::vector<std::pair<std::int32_t, std::int64_t>>> sq(
        static_cast<std::size_t>(n));
    {
        std::vector<std::int64_t> scratch(static_cast<std::size_t>(n), 0);
        std::vector<std::int32_t> touched;
        for (int i = 0; i < n; ++i) {
            touched.clear();
            for (const auto& ik : x.row(i)) {
                for (const auto& kj : x.row(ik.to)) {
                    auto j = static_cast<std::size_t>(kj.to);
                    if (scratch[j] == 0) touched.push_back(kj.to);
                    scratch[j] += static_cast<std::int64_t>(ik.sign) * kj.sign;
                }
            }
            auto& row = sq[static_cast<std::size_t>(i)];
            row.reserve(touched.size());
            for (std::int32_t j : touched) {
                if (scratch[static_cast<std::size_t>(j)] != 0) {
                    row.emplace_back(j, scratch[static_cast<std::size_t>(j)]);
                }
                scratch[static_cast<std::size_t>(j)] = 0;
            }
        }
    }

    int128 frob3 = 0;
    int128 deg_x4 = 0;
    int128 frob2 = 0;
    int128 deg3 = 0;
    int128 deg2 = 0;
    int128 dbd = 0;
    {
        std::vector<std::int64_t> scratch(static_cast<std::size_t>(n), 0);
        std::vector<std::int32_t> touched;
        for (int i = 0; i < n; ++i) {
            const std::int64_t d = static_cast<std::int64_t>(x.row(i).size());
            int128 x4_ii = 0;
            // Row i of X^3 = (row i of X^2) * X, scattered then reduced.
            touched.clear();
            for (const auto& [j, v2] : sq[static_cast<std::size_t>(i)]) {
                x4_ii += static_cast<int128>(v2) * v2;
                for (const auto& jk : x.row(j)) {
                    auto k = static_cast<std::size_t>(jk.to);
                    if (scratch[k] == 0) touched.push_back(jk.to);
                    scratch[k] += v2 * jk.sign;
                }
            }
            for (std::int32_t k : touched) {
                std::int64_t v3 = scratch[static_cast<std::size_t>(k)];
                frob3 += static_cast<int128>(v3) * v3;
                scratch[static_cast<std::size_t>(k)] = 0;
            }
            frob2 += x4_ii;
            deg_x4 += static_cast<int128>(d) * x4_ii;
            deg3 += static_cast<int128>(d) * d * d;
            deg2 += static_cast<int128>(d) * d;
            std::int64_t bd_i = 0;
            for (const auto& e : x.row(i)) {
                bd_i += static_cast<std::int64_t>(x.row(e.to).size());
            }
            dbd += static_cast<int128>(d) * bd_i;
        }
    }

    int128 q = frob3 - 6 * deg_x4 + 3 * dbd + 6 * frob2 + 4 * deg3 - 12 * deg2 +
               4 * static_cast<int128>(x.entry_count());
    return to_int64_checked(q, "order-3 interlacing sum");
}

} // namespace

std::int64_t q2_dense(const SignedNetwork& x) {
    const int n = x.n();
    Eigen::MatrixXd m = to_dense(x);
    Eigen::MatrixXd gram = m * m.transpose();

    int128 frob = 0;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            std::int64_t v = exact_entry(gram(i, j));
            frob += static_cast<int128>(v) * v;
        }
    }
    int128 row_sq = 0;
    int128 col_sq = 0;
    std::vector<std::int64_t> col_count(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
        auto r = static_cast<std::int64_t>(x.row(i).size());
        row_sq += static_cast<int128>(r) * r;
        for (const auto& e : x.row(i)) {
            ++col_count[static_cast<std::size_t>(e.to)];
        }
    }
    for (std::int64_t c : col_count) {
        col_sq += static_cast<int128>(c) * c;
    }

    int128 q = frob - row_sq - col_sq + static_cast<int128>(x.entry_count());
    return to_int64_checked(q, "order-2 interlacing sum");
}

std::int64_t q2_dense(const Network& g) {
    return q2_dense(as_signed(g));
}

std::int64_t q2_sparse(const SignedNetwork& x) {
    const int n = x.n();
    // Transposed adjacency: for each column k, the rows that hit it. Two
    // rows sharing column k contribute one co-occurrence, so walking
    // row(i) -> col(k) enumerates exactly the pairs with common targets.
    std::vector<std::vector<SignedNetwork::Entry>> cols(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        for (const auto& e : x.row(i)) {
            cols[static_cast<std::size_t>(e.to)].push_back(
                SignedNetwork::Entry{static_cast<std::int32_t>(i), e.sign});
        }
    }

    std::vector<std::int32_t> plus(static_cast<std::size_t>(n), 0);
    std::vector<std::int32_t> minus(static_cast<std::size_t>(n), 0);
    std::vector<std::int32_t> touched;
    int128 acc = 0;
    for (int i = 0; i < n; ++i) {
        touched.clear();
        for (const auto& ik : x.row(i)) {
            for (const auto& jk : cols[static_cast<std::size_t>(ik.to)]) {
                if (jk.to == i) continue; // the tuple definition forbids equal row indices
                auto j = static_cast<std::size_t>(jk.to);
                if (plus[j] == 0 && minus[j] == 0) touched.push_back(jk.to);
                if (ik.sign == jk.sign) {
                    ++plus[j];
                } else {
                    ++minus[j];
                }
            }
        }
        for (std::int32_t jt : touched) {
            auto j = static_cast<std::size_t>(jt);
            std::int64_t p = plus[j];
            std::int64_t q = minus[j];
            acc += static_cast<int128>(p * (p - 1) + q * (q - 1) - 2 * p * q);
            plus[j] = 0;
            minus[j] = 0;
        }
    }
    return to_int64_checked(acc, "order-2 interlacing sum");
}

std::int64_t q2_sparse(const Network& g) {
    return q2_sparse(as_signed(g));
}

std::int64_t q2(const SignedNetwork& x, Kernel kernel) {
    if (kernel == Kernel::dense || (kernel == Kernel::automatic && x.n() <= kDenseLimit)) {
        return q2_dense(x);
    }
    return q2_sparse(x);
}

std::int64_t q2(const Network& g, Kernel kernel) {
    return q2(as_signed(g), kernel);
}

std::int64_t q3(const SignedNetwork& x, Kernel kernel) {
    require_symmetric(x);
    if (kernel == Kernel::dense || (kernel == Kernel::automatic && x.n() <= kDenseLimit)) {
        return q3_dense_impl(x);
    }
    return q3_sparse_impl(x);
}

std::int64_t q3(const Network& g, Kernel kernel) {
    return q3(as_signed(g), kernel);
}

double normal_sf(double z) {
    if (!std::isfinite(z)) {
        throw_invalid("normal tail probability needs a finite argument");
    }
    return 0.5 * std::erfc(z / std::sqrt(2.0));
}

TestReport make_report(int n, bool directed, int order, std::int64_t q_star, std::int64_t q_a,
                       std::int64_t q_b) {
    if (order != 2 && order != 3) {
        throw_invalid("test order must be 2 or 3, got " + std::to_string(order));
    }
    if (q_a == 0 && q_b == 0) {
        throw_degenerate("degenerate denominator: both networks have zero order-" +
                         std::to_string(order) + " interlacing count");
    }
    TestReport r;
    r.n = n;
    r.directed = directed;
    r.order = order;
    r.q_star = q_star;
    r.q_a = q_a;
    r.q_b = q_b;
    const double denom_sum = static_cast<double>(q_a) + static_cast<double>(q_b);
    if (order == 2) {
        r.statistic = static_cast<double>(q_star) / (8.0 * std::sqrt(denom_sum));
        r.z_score = directed ? std::sqrt(2.0) * r.statistic : r.statistic;
    } else {
        r.statistic = static_cast<double>(q_star) / std::sqrt(384.0 * denom_sum);
        r.z_score = r.statistic;
    }
    r.p_value = normal_sf(r.z_score);
    return r;
}

TestReport psi_test(const Network& a, const Network& b, Kernel kernel) {
    SignedNetwork d = diff(a, b); // validates matching size and directedness
    std::int64_t q_star = q2(d, kernel);
    std::int64_t q_a = q2(a, kernel);
    std::int64_t q_b = q2(b, kernel);
    return make_report(a.n(), a.directed(), 2, q_star, q_a, q_b);
}

TestReport phi_test(const Network& a, const Network& b, Kernel kernel) {
    if (a.directed() || b.directed()) {
        throw_invalid("order-3 test is defined for undirected networks only");
    }
    SignedNetwork d = diff(a, b);
    std::int64_t q_star = q3(d, kernel);
    std::int64_t q_a = q3(a, kernel);
    std::int64_t q_b = q3(b, kernel);
    return make_report(a.n(), false, 3, q_star, q_a, q_b);
}

nlohmann::ordered_json to_json(const TestReport& report) {
    nlohmann::ordered_json j;
    j["n"] = report.n;
    j["directed"] = report.directed;
    j["order"] = report.order;
    j["q_star"] = report.q_star;
    j["q_a"] = report.q_a;
    j["q_b"] = report.q_b;
    j["statistic"] = report.statistic;
    j["z_score"] = report.z_score;
    j["p_value"] = report.p_value;
    return j;
}

} // namespace interlace
