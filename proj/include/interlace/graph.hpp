#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace interlace {

/// Unweighted simple graph with dense node ids 0..n-1 and zero diagonal.
///
/// Undirected graphs store both orientations of every edge so that the
/// counting kernels can treat the adjacency structure as a full matrix
/// without branching on directedness.
class Network {
  public:
    Network(int n, bool directed);

    int n() const noexcept { return n_; }
    bool directed() const noexcept { return directed_; }

    /// Ordered edge count: for undirected graphs each edge contributes both
    /// orientations (i.e. the number of nonzero adjacency entries).
    std::int64_t entry_count() const noexcept { return entries_; }

    /// Out-neighbors of `i`, sorted ascending.
    const std::vector<std::int32_t>& neighbors(int i) const { return adj_[i]; }

    bool has_edge(int i, int j) const;

    /// Inserts the ordered pair (i, j); mirrors it for undirected graphs.
    /// Rejects self-loops, out-of-range ids, and duplicates.
    void add_edge(int i, int j);

  private:
    int n_;
    bool directed_;
    std::int64_t entries_ = 0;
    std::vector<std::vector<std::int32_t>> adj_;
};

/// Sparse {-1,0,+1} matrix holding the difference of two networks.
class SignedNetwork {
  public:
    struct Entry {
        std::int32_t to;
        std::int8_t sign; // -1 or +1
    };

    SignedNetwork(int n, bool directed);

    int n() const noexcept { return n_; }
    bool directed() const noexcept { return directed_; }
    std::int64_t entry_count() const noexcept { return entries_; }

    /// Nonzero entries of row `i`, sorted by column.
    const std::vector<Entry>& row(int i) const { return rows_[i]; }

    int sign_at(int i, int j) const;

    /// Appends a nonzero entry; columns within a row must arrive in
    /// ascending order (construction-time contract, asserted).
    void push_entry(int i, int j, int sign);

  private:
    int n_;
    bool directed_;
    std::int64_t entries_ = 0;
    std::vector<std::vector<Entry>> rows_;
};

struct DegreeStats {
    double avg_degree = 0.0;
    int max_degree = 0;
};

/// Parses the edge-list format: lines "i j", '#' starts a comment line,
/// blank lines ignored. Errors on self-loops, duplicates (for undirected
/// inputs either orientation counts as the same edge), malformed lines,
/// and ids outside [0, n) when n is given. Without n, the node count is
/// inferred as 1 + max id. `one_based` shifts external 1-based ids down
/// at this boundary only.
Network load_edge_list(std::istream& text, std::optional<int> n, bool directed, bool one_based = false);

/// Convenience overload reading from a file path.
Network load_edge_list_file(const std::string& path, std::optional<int> n, bool directed,
                            bool one_based = false);

/// Serializes to the same edge-list format (undirected edges emitted once,
/// with i < j). Reloading yields an identical edge set.
std::string to_edge_list(const Network& g);

/// Entrywise difference a - b as a signed network.
SignedNetwork diff(const Network& a, const Network& b);

/// Views an unsigned network as a signed one (all entries +1).
SignedNetwork as_signed(const Network& g);

/// Average and maximum degree (out-degree for directed graphs).
DegreeStats degree_stats(const Network& g);

} // namespace interlace
