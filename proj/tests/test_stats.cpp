#include "interlace/stats.hpp"

#include "interlace/error.hpp"
#include "interlace/graph.hpp"
#include "interlace/oracle.hpp"
#include "interlace/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

namespace {

using namespace interlace;

Network cycle_graph(int n, bool directed = false) {
    Network g(n, directed);
    for (int i = 0; i < n; ++i) {
        g.add_edge(i, (i + 1) % n);
    }
    return g;
}

Network complete_graph(int n) {
    Network g(n, false);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            g.add_edge(i, j);
        }
    }
    return g;
}

Network path_graph(int n) {
    Network g(n, false);
    for (int i = 0; i + 1 < n; ++i) {
        g.add_edge(i, i + 1);
    }
    return g;
}

SignedNetwork random_signed(SplitStream& rng, int n, bool symmetric, double p) {
    SignedNetwork x(n, !symmetric);
    std::vector<std::vector<int>> m(static_cast<std::size_t>(n),
                                    std::vector<int>(static_cast<std::size_t>(n), 0));
    for (int i = 0; i < n; ++i) {
        for (int j = symmetric ? i + 1 : 0; j < n; ++j) {
            if (j == i) continue;
            if (rng.next_unit() < p) {
                int s = rng.next_unit() < 0.5 ? -1 : 1;
                m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = s;
                if (symmetric) {
                    m[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = s;
                }
            }
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            int s = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (s != 0) x.push_entry(i, j, s);
        }
    }
    return x;
}

SignedNetwork negate(const SignedNetwork& x) {
    SignedNetwork y(x.n(), x.directed());
    for (int i = 0; i < x.n(); ++i) {
        for (const auto& e : x.row(i)) {
            y.push_entry(i, e.to, -e.sign);
        }
    }
    return y;
}

Network random_er(SplitStream& rng, int n, double p) {
    Network g(n, false);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (rng.next_unit() < p) g.add_edge(i, j);
        }
    }
    return g;
}

} // namespace

TEST_CASE("order-2 kernels reproduce the frozen oracle values") {
    Network shared(5, true);
    shared.add_edge(1, 3);
    shared.add_edge(1, 4);
    shared.add_edge(2, 3);
    shared.add_edge(2, 4);

    SignedNetwork reweighted(5, true);
    for (int i = 0; i < 5; ++i) {
        SignedNetwork s = as_signed(shared);
        for (const auto& e : s.row(i)) {
            reweighted.push_entry(i, e.to, (i == 1 && e.to == 4) ? -1 : e.sign);
        }
    }

    Network single_edge(2, false);
    single_edge.add_edge(0, 1);

    struct Case {
        SignedNetwork x;
        std::int64_t expect;
    };
    std::vector<Case> cases;
    cases.push_back({as_signed(cycle_graph(4)), 8});
    cases.push_back({as_signed(complete_graph(4)), 24});
    cases.push_back({as_signed(single_edge), 0});
    cases.push_back({as_signed(cycle_graph(4, true)), 0});
    cases.push_back({as_signed(shared), 4});
    cases.push_back({reweighted, -4});
    cases.push_back({SignedNetwork(6, false), 0});

    for (const auto& c : cases) {
        CHECK(q2_dense(c.x) == c.expect);
        CHECK(q2_sparse(c.x) == c.expect);
        CHECK(q2(c.x) == c.expect);
        CHECK(q2(c.x, Kernel::sparse) == c.expect);
    }
}

TEST_CASE("order-3 kernel reproduces the frozen oracle values") {
    CHECK(q3(as_signed(cycle_graph(6))) == 12);
    CHECK(q3(cycle_graph(6), Kernel::sparse) == 12);

    Network single_edge(2, false);
    single_edge.add_edge(0, 1);
    CHECK(q3(single_edge) == 0);

    CHECK(q3(complete_graph(3)) == 6);
    CHECK(q3(path_graph(5)) == 0);
}

TEST_CASE("dense, sparse, and brute-force order-2 sums agree exactly") {
    SplitStream rng(424242);
    for (int trial = 0; trial < 150; ++trial) {
        int n = 4 + static_cast<int>(rng.next_u64() % 5);
        bool symmetric = trial % 2 == 0;
        SignedNetwork x = random_signed(rng, n, symmetric, 0.45);
        std::int64_t expected = brute_u(x, 2);
        CHECK(q2_dense(x) == expected);
        CHECK(q2_sparse(x) == expected);
    }
}

TEST_CASE("order-3 kernel agrees with brute force on symmetric inputs") {
    SplitStream rng(5150);
    for (int trial = 0; trial < 60; ++trial) {
        int n = 4 + static_cast<int>(rng.next_u64() % 4);
        SignedNetwork x = random_signed(rng, n, true, 0.5);
        std::int64_t expected = brute_u(x, 3);
        CHECK(q3(x) == expected);
        CHECK(q3(x, Kernel::sparse) == expected);
    }
}

TEST_CASE("dense and sparse kernels agree on mid-size random graphs") {
    SplitStream rng(777);
    Network g = random_er(rng, 50, 0.1);
    CHECK(q2_dense(g) == q2_sparse(g));
    CHECK(q3(g, Kernel::dense) == q3(g, Kernel::sparse));
}

TEST_CASE("interlacing sums are even in the sign of the matrix") {
    SplitStream rng(1234);
    for (int trial = 0; trial < 15; ++trial) {
        SignedNetwork x = random_signed(rng, 7, trial % 2 == 0, 0.5);
        CHECK(q2(x) == q2(negate(x)));
        if (!x.directed()) {
            CHECK(q3(x) == q3(negate(x)));
        }
    }
}

TEST_CASE("order-2 sum equals balanced minus unbalanced ordered 4-cycles") {
    SplitStream rng(31337);
    for (int trial = 0; trial < 15; ++trial) {
        SignedNetwork x = random_signed(rng, 7, true, 0.5);
        auto counts = cycle_balance_counts(x, 4);
        CHECK(q2(x) == counts.balanced - counts.unbalanced);
    }
}

TEST_CASE("upper normal tail") {
    CHECK(normal_sf(0.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(normal_sf(1.6448536269514722) == doctest::Approx(0.05).epsilon(1e-10));
    CHECK(normal_sf(-40.0) > 1.0 - 1e-12);
    CHECK(normal_sf(-40.0) <= 1.0);
    CHECK(normal_sf(40.0) >= 0.0);
    CHECK(normal_sf(40.0) < 1e-12);
    CHECK_THROWS_AS((void)normal_sf(std::nan("")), error);
    CHECK_THROWS_AS((void)normal_sf(1.0 / 0.0), error);
}

TEST_CASE("order-2 test on identical networks is centered") {
    Network g = complete_graph(4);
    TestReport r = psi_test(g, g);
    CHECK(r.n == 4);
    CHECK(r.order == 2);
    CHECK_FALSE(r.directed);
    CHECK(r.q_star == 0);
    CHECK(r.q_a == 24);
    CHECK(r.q_b == 24);
    CHECK(r.statistic == 0.0);
    CHECK(r.z_score == 0.0);
    CHECK(r.p_value == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("order-2 test matches the hand-assembled formula") {
    Network a = complete_graph(4);
    Network b(4, false);
    // K4 minus the (0,1) edge
    b.add_edge(0, 2);
    b.add_edge(0, 3);
    b.add_edge(1, 2);
    b.add_edge(1, 3);
    b.add_edge(2, 3);

    std::int64_t qa = brute_u(a, 2);
    std::int64_t qb = brute_u(b, 2);
    std::int64_t qs = brute_u(diff(a, b), 2);
    CHECK(qa == 24);

    TestReport r = psi_test(a, b);
    CHECK(r.q_a == qa);
    CHECK(r.q_b == qb);
    CHECK(r.q_star == qs);
    double expected = static_cast<double>(qs) /
                      (8.0 * std::sqrt(static_cast<double>(qa) + static_cast<double>(qb)));
    CHECK(r.statistic == doctest::Approx(expected).epsilon(1e-15));
    CHECK(r.z_score == r.statistic);
    CHECK(r.p_value == doctest::Approx(normal_sf(expected)).epsilon(1e-15));

    TestReport composed = make_report(4, false, 2, qs, qa, qb);
    CHECK(composed.statistic == r.statistic);
    CHECK(composed.p_value == r.p_value);
}

TEST_CASE("directed order-2 z-score carries the sqrt(2) factor") {
    Network a(5, true);
    a.add_edge(1, 3);
    a.add_edge(1, 4);
    a.add_edge(2, 3);
    a.add_edge(2, 4);
    Network b(5, true);
    b.add_edge(1, 3);
    b.add_edge(1, 4);
    b.add_edge(2, 3);

    TestReport r = psi_test(a, b);
    CHECK(r.directed);
    CHECK(r.z_score == doctest::Approx(std::sqrt(2.0) * r.statistic).epsilon(1e-15));
    CHECK(r.p_value == doctest::Approx(normal_sf(r.z_score)).epsilon(1e-15));
}

TEST_CASE("degenerate denominators are reported as such") {
    Network p = path_graph(5);
    CHECK_THROWS_AS((void)psi_test(p, p), error);
    try {
        (void)psi_test(p, p);
        FAIL("expected degenerate-statistic error");
    } catch (const error& e) {
        CHECK(e.code() == errc::degenerate_statistic);
    }

    // Order 3: paths and stars carry no interlacing hexagon configuration.
    CHECK_THROWS_AS((void)phi_test(p, path_graph(5)), error);

    // Triangles do: each admits six degenerate closed 6-walks, so a pair of
    // triangles is *not* degenerate at order 3.
    Network t = complete_graph(3);
    TestReport r = phi_test(t, t);
    CHECK(r.q_a == 6);
    CHECK(r.q_b == 6);
    CHECK(r.statistic == 0.0);
    CHECK(r.p_value == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("order-3 test against a hand-assembled value") {
    Network hexagon = cycle_graph(6);
    Network empty(6, false);
    TestReport r = phi_test(hexagon, empty);
    CHECK(r.order == 3);
    CHECK(r.q_star == 12);
    CHECK(r.q_a == 12);
    CHECK(r.q_b == 0);
    CHECK(r.statistic == doctest::Approx(12.0 / std::sqrt(384.0 * 12.0)).epsilon(1e-15));

    CHECK_THROWS_AS((void)phi_test(cycle_graph(4, true), cycle_graph(4, true)), error);
}

TEST_CASE("test statistic is symmetric in its arguments") {
    SplitStream rng(8888);
    Network a = random_er(rng, 12, 0.4);
    Network b = random_er(rng, 12, 0.4);
    TestReport ab = psi_test(a, b);
    TestReport ba = psi_test(b, a);
    CHECK(ab.statistic == ba.statistic);
    CHECK(ab.q_star == ba.q_star);

    TestReport ab3 = phi_test(a, b);
    TestReport ba3 = phi_test(b, a);
    CHECK(ab3.statistic == ba3.statistic);
}

TEST_CASE("relabeling both networks leaves the report unchanged") {
    SplitStream rng(4321);
    Network a = random_er(rng, 10, 0.4);
    Network b = random_er(rng, 10, 0.4);

    std::vector<int> perm = {7, 2, 9, 0, 4, 6, 1, 8, 3, 5};
    auto relabel = [&](const Network& g) {
        Network h(g.n(), g.directed());
        for (int i = 0; i < g.n(); ++i) {
            for (std::int32_t j : g.neighbors(i)) {
                if (!g.directed() && j < i) continue;
                h.add_edge(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
            }
        }
        return h;
    };

    TestReport r1 = psi_test(a, b);
    TestReport r2 = psi_test(relabel(a), relabel(b));
    CHECK(r1.q_star == r2.q_star);
    CHECK(r1.q_a == r2.q_a);
    CHECK(r1.q_b == r2.q_b);
    CHECK(r1.statistic == r2.statistic);
    CHECK(r1.p_value == r2.p_value);
}

TEST_CASE("order-3 value overflowing 64 bits is reported, not corrupted") {
    // The complete graph on 1500 nodes has on the order of n^6 admissible
    // tuples, past the 64-bit limit; the kernel must notice.
    Network big = complete_graph(1500);
    CHECK_THROWS_AS((void)q3(big), error);
    try {
        (void)q3(big);
    } catch (const error& e) {
        CHECK(e.code() == errc::numeric_failure);
    }
}
