#include "interlace/graph.hpp"

#include "interlace/error.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <fstream>
#include <sstream>

namespace interlace {

Network::Network(int n, bool directed) : n_(n), directed_(directed) {
    if (n < 0) {
        throw_invalid("node count must be nonnegative, got " + std::to_string(n));
    }
    adj_.resize(static_cast<std::size_t>(n));
}

bool Network::has_edge(int i, int j) const {
    if (i < 0 || i >= n_ || j < 0 || j >= n_) {
        return false;
    }
    const auto& row = adj_[static_cast<std::size_t>(i)];
    return std::binary_search(row.begin(), row.end(), static_cast<std::int32_t>(j));
}

void Network::add_edge(int i, int j) {
    if (i < 0 || i >= n_ || j < 0 || j >= n_) {
        throw_invalid("edge (" + std::to_string(i) + ", " + std::to_string(j) +
                      ") is out of range for n = " + std::to_string(n_));
    }
    if (i == j) {
        throw_invalid("self-loop at node " + std::to_string(i));
    }
    if (has_edge(i, j)) {
        throw_invalid("duplicate edge (" + std::to_string(i) + ", " + std::to_string(j) + ")");
    }
    auto insert_sorted = [this](int from, int to) {
        auto& row = adj_[static_cast<std::size_t>(from)];
        row.insert(std::upper_bound(row.begin(), row.end(), static_cast<std::int32_t>(to)),
                   static_cast<std::int32_t>(to));
        ++entries_;
    };
    insert_sorted(i, j);
    if (!directed_) {
        insert_sorted(j, i);
    }
}

SignedNetwork::SignedNetwork(int n, bool directed) : n_(n), directed_(directed) {
    if (n < 0) {
        throw_invalid("node count must be nonnegative, got " + std::to_string(n));
    }
    rows_.resize(static_cast<std::size_t>(n));
}

int SignedNetwork::sign_at(int i, int j) const {
    if (i < 0 || i >= n_ || j < 0 || j >= n_) {
        return 0;
    }
    const auto& row = rows_[static_cast<std::size_t>(i)];
    auto it = std::lower_bound(row.begin(), row.end(), j,
                               [](const Entry& e, int col) { return e.to < col; });
    if (it == row.end() || it->to != j) {
        return 0;
    }
    return it->sign;
}

void SignedNetwork::push_entry(int i, int j, int sign) {
    assert(i >= 0 && i < n_ && j >= 0 && j < n_ && i != j);
    assert(sign == 1 || sign == -1);
    auto& row = rows_[static_cast<std::size_t>(i)];
    assert(row.empty() || row.back().to < j);
    row.push_back(Entry{static_cast<std::int32_t>(j), static_cast<std::int8_t>(sign)});
    ++entries_;
}

namespace {

// Parses one decimal integer token; returns false on any trailing garbage.
bool parse_int(const std::string& tok, long long& out) {
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

} // namespace

Network load_edge_list(std::istream& text, std::optional<int> n, bool directed, bool one_based) {
    struct RawEdge {
        int i;
        int j;
    };
    std::vector<RawEdge> edges;
    long long max_id = -1;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(text, line)) {
        ++line_no;
        // Trim whitespace so "  # note" and "\r" line endings behave.
        std::size_t begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos) {
            continue;
        }
        if (line[begin] == '#') {
            continue;
        }
        std::istringstream fields(line.substr(begin));
        std::string tok_i, tok_j, extra;
        fields >> tok_i >> tok_j;
        long long raw_i = 0;
        long long raw_j = 0;
        if (tok_j.empty() || (fields >> extra) || !parse_int(tok_i, raw_i) || !parse_int(tok_j, raw_j)) {
            throw_invalid("malformed edge on line " + std::to_string(line_no) + ": \"" + line + "\"");
        }
        if (one_based) {
            --raw_i;
            --raw_j;
        }
        if (raw_i < 0 || raw_j < 0 || raw_i > INT32_MAX || raw_j > INT32_MAX) {
            throw_invalid("node id out of range on line " + std::to_string(line_no) + ": \"" + line + "\"");
        }
        edges.push_back(RawEdge{static_cast<int>(raw_i), static_cast<int>(raw_j)});
        max_id = std::max({max_id, raw_i, raw_j});
    }

    int node_count = n ? *n : static_cast<int>(max_id + 1);
    Network g(node_count, directed);
    for (const RawEdge& e : edges) {
        g.add_edge(e.i, e.j); // add_edge reports self-loops, ranges, duplicates
    }
    return g;
}

Network load_edge_list_file(const std::string& path, std::optional<int> n, bool directed,
                            bool one_based) {
    std::ifstream in(path);
    if (!in) {
        throw_invalid("cannot open edge list file: " + path);
    }
    return load_edge_list(in, n, directed, one_based);
}

std::string to_edge_list(const Network& g) {
    std::ostringstream out;
    for (int i = 0; i < g.n(); ++i) {
        for (std::int32_t j : g.neighbors(i)) {
            if (!g.directed() && j < i) {
                continue; // undirected edges emitted once, low id first
            }
            out << i << ' ' << j << '\n';
        }
    }
    return out.str();
}

SignedNetwork diff(const Network& a, const Network& b) {
    if (a.n() != b.n()) {
        throw_invalid("cannot diff networks of different sizes (" + std::to_string(a.n()) +
                      " vs " + std::to_string(b.n()) + ")");
    }
    if (a.directed() != b.directed()) {
        throw_invalid("cannot diff a directed network against an undirected one");
    }
    SignedNetwork d(a.n(), a.directed());
    for (int i = 0; i < a.n(); ++i) {
        const auto& ra = a.neighbors(i);
        const auto& rb = b.neighbors(i);
        std::size_t pa = 0;
        std::size_t pb = 0;
        while (pa < ra.size() || pb < rb.size()) {
            if (pb == rb.size() || (pa < ra.size() && ra[pa] < rb[pb])) {
                d.push_entry(i, ra[pa], +1);
                ++pa;
            } else if (pa == ra.size() || rb[pb] < ra[pa]) {
                d.push_entry(i, rb[pb], -1);
                ++pb;
            } else {
                ++pa; // edge present in both: entries cancel
                ++pb;
            }
        }
    }
    return d;
}

SignedNetwork as_signed(const Network& g) {
    SignedNetwork s(g.n(), g.directed());
    for (int i = 0; i < g.n(); ++i) {
        for (std::int32_t j : g.neighbors(i)) {
            s.push_entry(i, j, +1);
        }
    }
    return s;
}

DegreeStats degree_stats(const Network& g) {
    DegreeStats stats;
    if (g.n() == 0) {
        return stats;
    }
    std::int64_t total = 0;
    for (int i = 0; i < g.n(); ++i) {
        int d = static_cast<int>(g.neighbors(i).size());
        total += d;
        stats.max_degree = std::max(stats.max_degree, d);
    }
    stats.avg_degree = static_cast<double>(total) / static_cast<double>(g.n());
    return stats;
}

} // namespace interlace
