#ifndef ALGCON_GRAPH_HPP
#define ALGCON_GRAPH_HPP

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "algcon/common.hpp"

namespace algcon {

/// Mixed graph G = (V, D, B): directed edges carry structural coefficients,
/// bidirected edges mark correlated noise terms. Nodes are named by strings;
/// internally they map to dense indices in sorted-name order, which fixes
/// row/column orderings everywhere downstream. Values are immutable once
/// built and safe to share across threads.
class MixedGraph {
public:
    MixedGraph() = default;

    explicit MixedGraph(std::vector<std::string> nodes) {
        std::sort(nodes.begin(), nodes.end());
        nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
        names_ = std::move(nodes);
    }

    int size() const { return static_cast<int>(names_.size()); }
    const std::vector<std::string>& nodes() const { return names_; }
    const std::string& name(int i) const { return names_.at(static_cast<std::size_t>(i)); }

    bool has_node(const std::string& n) const {
        return std::binary_search(names_.begin(), names_.end(), n);
    }

    int index_of(const std::string& n) const {
        auto it = std::lower_bound(names_.begin(), names_.end(), n);
        if (it == names_.end() || *it != n) throw UnknownNodeError(n);
        return static_cast<int>(it - names_.begin());
    }

    void add_directed(int tail, int head) {
        check_index(tail);
        check_index(head);
        if (tail == head) throw Error("self-loop " + name(tail) + " -> " + name(head));
        directed_.insert({tail, head});
    }

    void add_bidirected(int a, int b) {
        check_index(a);
        check_index(b);
        if (a == b) throw Error("self-loop " + name(a) + " <-> " + name(b));
        bidirected_.insert({std::min(a, b), std::max(a, b)});
    }

    void add_directed(const std::string& tail, const std::string& head) {
        add_directed(index_of(tail), index_of(head));
    }
    void add_bidirected(const std::string& a, const std::string& b) {
        add_bidirected(index_of(a), index_of(b));
    }

    const std::set<std::pair<int, int>>& directed() const { return directed_; }
    const std::set<std::pair<int, int>>& bidirected() const { return bidirected_; }

    bool has_directed(int tail, int head) const { return directed_.count({tail, head}) > 0; }
    bool has_bidirected(int a, int b) const {
        return bidirected_.count({std::min(a, b), std::max(a, b)}) > 0;
    }

    int edge_count() const { return static_cast<int>(directed_.size() + bidirected_.size()); }

    std::vector<int> parents(int v) const {
        check_index(v);
        std::vector<int> out;
        for (const auto& [t, h] : directed_)
            if (h == v) out.push_back(t);
        return out;
    }

    std::vector<int> children(int v) const {
        check_index(v);
        std::vector<int> out;
        for (const auto& [t, h] : directed_)
            if (t == v) out.push_back(h);
        return out;
    }

    /// Bidirected neighbours of v.
    std::vector<int> siblings(int v) const {
        check_index(v);
        std::vector<int> out;
        for (const auto& [a, b] : bidirected_) {
            if (a == v) out.push_back(b);
            if (b == v) out.push_back(a);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    std::vector<std::string> parents(const std::string& v) const {
        return names_of(parents(index_of(v)));
    }
    std::vector<std::string> siblings(const std::string& v) const {
        return names_of(siblings(index_of(v)));
    }

    /// htr(v): nodes reachable by a half-trek, i.e. a directed path whose
    /// first edge may instead be bidirected. BFS on a doubled state graph
    /// (node, already-moved flag). v itself is in htr(v) only when a
    /// nonempty half-trek returns to it, which can happen in cyclic graphs.
    std::vector<bool> half_trek_mask(int v) const {
        check_index(v);
        const int n = size();
        std::vector<bool> reach(static_cast<std::size_t>(n), false);
        // state 0: at v, no step taken yet (bidirected move still allowed)
        std::vector<bool> seen(static_cast<std::size_t>(n), false);
        std::deque<int> queue;
        for (int s : siblings(v)) {
            if (!reach[static_cast<std::size_t>(s)]) {
                reach[static_cast<std::size_t>(s)] = true;
                if (!seen[static_cast<std::size_t>(s)]) {
                    seen[static_cast<std::size_t>(s)] = true;
                    queue.push_back(s);
                }
            }
        }
        for (int c : children(v)) {
            reach[static_cast<std::size_t>(c)] = true;
            if (!seen[static_cast<std::size_t>(c)]) {
                seen[static_cast<std::size_t>(c)] = true;
                queue.push_back(c);
            }
        }
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            for (int c : children(u)) {
                reach[static_cast<std::size_t>(c)] = true;
                if (!seen[static_cast<std::size_t>(c)]) {
                    seen[static_cast<std::size_t>(c)] = true;
                    queue.push_back(c);
                }
            }
        }
        return reach;
    }

    std::vector<int> half_trek_reachable(int v) const {
        std::vector<int> out;
        auto mask = half_trek_mask(v);
        for (int i = 0; i < size(); ++i)
            if (mask[static_cast<std::size_t>(i)]) out.push_back(i);
        return out;
    }

    std::vector<std::string> half_trek_reachable(const std::string& v) const {
        return names_of(half_trek_reachable(index_of(v)));
    }

    bool is_acyclic() const {
        const int n = size();
        std::vector<int> indeg(static_cast<std::size_t>(n), 0);
        for (const auto& [t, h] : directed_) {
            (void)t;
            ++indeg[static_cast<std::size_t>(h)];
        }
        std::deque<int> queue;
        for (int i = 0; i < n; ++i)
            if (indeg[static_cast<std::size_t>(i)] == 0) queue.push_back(i);
        int removed = 0;
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            ++removed;
            for (int c : children(u))
                if (--indeg[static_cast<std::size_t>(c)] == 0) queue.push_back(c);
        }
        return removed == n;
    }

    bool is_bow_free() const {
        for (const auto& [a, b] : bidirected_)
            if (has_directed(a, b) || has_directed(b, a)) return false;
        return true;
    }

    /// Ancestral: acyclic, pa(v) and htr(v) disjoint for every v, and no
    /// bidirected edge between a node and its directed ancestor.
    bool is_ancestral() const {
        if (!is_acyclic()) return false;
        for (int v = 0; v < size(); ++v) {
            auto mask = half_trek_mask(v);
            for (int p : parents(v))
                if (mask[static_cast<std::size_t>(p)]) return false;
        }
        for (const auto& [a, b] : bidirected_)
            if (is_ancestor(a, b) || is_ancestor(b, a)) return false;
        return true;
    }

    /// True when there is a directed path from u to w (u != w).
    bool is_ancestor(int u, int w) const {
        std::vector<bool> seen(static_cast<std::size_t>(size()), false);
        std::deque<int> queue{u};
        while (!queue.empty()) {
            int x = queue.front();
            queue.pop_front();
            for (int c : children(x)) {
                if (c == w) return true;
                if (!seen[static_cast<std::size_t>(c)]) {
                    seen[static_cast<std::size_t>(c)] = true;
                    queue.push_back(c);
                }
            }
        }
        return false;
    }

    /// Parses the line-oriented graph format: a required first `nodes` line,
    /// then `dir <tail> <head>` and `bi <a> <b>` lines; `#` starts a comment.
    static MixedGraph parse(std::string_view text) {
        std::istringstream in{std::string(text)};
        std::string line;
        int lineno = 0;
        std::optional<MixedGraph> g;
        while (std::getline(in, line)) {
            ++lineno;
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            std::istringstream ls(line);
            std::string kw;
            if (!(ls >> kw)) continue;
            if (kw == "nodes") {
                if (g) throw ParseError(lineno, "duplicate nodes line");
                std::vector<std::string> ns;
                std::string n;
                while (ls >> n) ns.push_back(n);
                if (ns.empty()) throw ParseError(lineno, "empty nodes line");
                std::vector<std::string> sorted = ns;
                std::sort(sorted.begin(), sorted.end());
                if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
                    throw ParseError(lineno, "duplicate node name");
                g = MixedGraph(std::move(ns));
            } else if (kw == "dir" || kw == "bi") {
                if (!g) throw ParseError(lineno, "edge before nodes line");
                std::string a, b, extra;
                if (!(ls >> a >> b)) throw ParseError(lineno, "expected two node names");
                if (ls >> extra) throw ParseError(lineno, "trailing tokens");
                try {
                    if (kw == "dir")
                        g->add_directed(a, b);
                    else
                        g->add_bidirected(a, b);
                } catch (const Error& e) {
                    throw ParseError(lineno, e.what());
                }
            } else {
                throw ParseError(lineno, "unknown keyword '" + kw + "'");
            }
        }
        if (!g) throw ParseError(lineno, "missing nodes line");
        return *g;
    }

    /// Inverse of parse: nodes sorted, then dir edges sorted, then bi edges
    /// sorted. parse(serialize(g)) == g.
    std::string serialize() const {
        std::ostringstream out;
        out << "nodes";
        for (const auto& n : names_) out << ' ' << n;
        out << '\n';
        for (const auto& [t, h] : directed_) out << "dir " << name(t) << ' ' << name(h) << '\n';
        for (const auto& [a, b] : bidirected_) out << "bi " << name(a) << ' ' << name(b) << '\n';
        return out.str();
    }

    bool operator==(const MixedGraph& o) const {
        return names_ == o.names_ && directed_ == o.directed_ && bidirected_ == o.bidirected_;
    }

    /// The graph with node i renamed to new_names[i].
    MixedGraph renamed(const std::vector<std::string>& new_names) const {
        if (static_cast<int>(new_names.size()) != size()) throw Error("rename size mismatch");
        MixedGraph out{std::vector<std::string>(new_names)};
        for (const auto& [t, h] : directed_)
            out.add_directed(new_names[static_cast<std::size_t>(t)],
                             new_names[static_cast<std::size_t>(h)]);
        for (const auto& [a, b] : bidirected_)
            out.add_bidirected(new_names[static_cast<std::size_t>(a)],
                               new_names[static_cast<std::size_t>(b)]);
        return out;
    }

private:
    void check_index(int i) const {
        if (i < 0 || i >= size()) throw Error("node index out of range");
    }

    std::vector<std::string> names_of(const std::vector<int>& idx) const {
        std::vector<std::string> out;
        out.reserve(idx.size());
        for (int i : idx) out.push_back(name(i));
        return out;
    }

    std::vector<std::string> names_;
    std::set<std::pair<int, int>> directed_;
    std::set<std::pair<int, int>> bidirected_;
};

/// Canonical label: the edge sets rewritten over placeholder indices and
/// minimized over all node permutations. Two graphs map to the same string
/// exactly when a node relabeling carries one onto the other. Brute force
/// over n! permutations; refuses n > 7.
inline std::string canonical_form(const MixedGraph& g) {
    const int n = g.size();
    if (n > 7) throw Error("canonical_form: node count above permutation budget (7)");
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    std::optional<std::string> best;
    do {
        // node i gets placeholder perm[i]
        std::ostringstream out;
        std::set<std::pair<int, int>> dir, bi;
        for (const auto& [t, h] : g.directed())
            dir.insert({perm[static_cast<std::size_t>(t)], perm[static_cast<std::size_t>(h)]});
        for (const auto& [a, b] : g.bidirected()) {
            int x = perm[static_cast<std::size_t>(a)], y = perm[static_cast<std::size_t>(b)];
            bi.insert({std::min(x, y), std::max(x, y)});
        }
        out << "n" << n << ";";
        for (const auto& [t, h] : dir) out << "d" << t << "," << h << ";";
        for (const auto& [a, b] : bi) out << "b" << a << "," << b << ";";
        std::string s = out.str();
        if (!best || s < *best) best = std::move(s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return *best;
}

/// Options for exhaustive mixed-graph enumeration.
struct EnumOptions {
    bool allow_bows = true;
    bool allow_cycles = true;
};

namespace detail {

struct EdgeSlot {
    bool bidirected;
    int a, b; // directed: a -> b; bidirected: a < b
};

inline std::vector<EdgeSlot> edge_slots(int n) {
    std::vector<EdgeSlot> slots;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (a != b) slots.push_back({false, a, b});
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) slots.push_back({true, a, b});
    return slots;
}

inline unsigned long long binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    unsigned long long r = 1;
    for (int i = 0; i < k; ++i) r = r * static_cast<unsigned long long>(n - i) /
                                     static_cast<unsigned long long>(i + 1);
    return r;
}

} // namespace detail

/// Number of labelled graphs the enumerator walks before filtering:
/// C(3*C(n,2), m) combinations of edge slots.
inline unsigned long long enumeration_space(int n, int m) {
    return detail::binom(3 * n * (n - 1) / 2, m);
}

/// Streams every labelled mixed graph on n nodes with exactly m edges that
/// satisfies the flags, in a fixed deterministic order (lexicographic over
/// edge-slot combinations). Shardable: [shard_lo, shard_hi) selects a range
/// of combination ranks, so a census can split the space across workers and
/// each shard remains deterministic on its own.
inline void enumerate_graphs(int n, int m, const EnumOptions& opts,
                             const std::function<void(const MixedGraph&)>& emit,
                             unsigned long long shard_lo = 0,
                             unsigned long long shard_hi = ~0ULL) {
    if (n < 1) throw Error("enumerate_graphs: need n >= 1");
    if (m < 0) throw Error("enumerate_graphs: need m >= 0");
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back(std::string(1, static_cast<char>('a' + i)));
    const auto slots = detail::edge_slots(n);
    const int s = static_cast<int>(slots.size());
    if (m > s) return;

    std::vector<int> pick(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) pick[static_cast<std::size_t>(i)] = i;

    // jump to combination of rank shard_lo (combinatorial number system)
    unsigned long long rank = 0;
    if (shard_lo > 0) {
        unsigned long long remaining = shard_lo;
        int start = 0;
        for (int i = 0; i < m; ++i) {
            int c = start;
            for (;;) {
                unsigned long long below = detail::binom(s - c - 1, m - i - 1);
                if (remaining < below) break;
                remaining -= below;
                ++c;
                if (c >= s) return; // shard_lo beyond the space
            }
            pick[static_cast<std::size_t>(i)] = c;
            start = c + 1;
        }
        rank = shard_lo;
    }

    auto passes = [&](const MixedGraph& g) {
        if (!opts.allow_bows && !g.is_bow_free()) return false;
        if (!opts.allow_cycles && !g.is_acyclic()) return false;
        return true;
    };

    for (;;) {
        if (rank >= shard_hi) return;
        MixedGraph g{std::vector<std::string>(names)};
        for (int i = 0; i < m; ++i) {
            const auto& slot = slots[static_cast<std::size_t>(pick[static_cast<std::size_t>(i)])];
            if (slot.bidirected)
                g.add_bidirected(slot.a, slot.b);
            else
                g.add_directed(slot.a, slot.b);
        }
        if (passes(g)) emit(g);
        ++rank;
        // next combination in lexicographic order
        int i = m - 1;
        while (i >= 0 && pick[static_cast<std::size_t>(i)] == s - m + i) --i;
        if (i < 0) return;
        ++pick[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < m; ++j)
            pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
    }
}

/// Convenience: collect the full (unsharded) enumeration.
inline std::vector<MixedGraph> enumerate_graphs_vec(int n, int m, const EnumOptions& opts) {
    std::vector<MixedGraph> out;
    enumerate_graphs(n, m, opts, [&](const MixedGraph& g) { out.push_back(g); });
    return out;
}

} // namespace algcon

#endif // ALGCON_GRAPH_HPP
