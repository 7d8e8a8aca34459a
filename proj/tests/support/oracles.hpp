// Independent reference implementations the tests check the library
// against. Nothing here shares code with src/: distances are BFS per
// query, alignments are enumerated from subsets, the recursion is a
// direct memoized transliteration, DTW walks every path.
#ifndef TRACECBR_TESTS_ORACLES_HPP
#define TRACECBR_TESTS_ORACLES_HPP

#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "tracecbr/ontology.hpp"
#include "tracecbr/similarity.hpp"
#include "tracecbr/trace.hpp"

namespace oracles {

// Undirected hop count over parent edges, -1 when unreachable.
inline int bfs_hops(const std::vector<tracecbr::Concept>& concepts,
                    const std::string& from, const std::string& to)
{
    const std::size_t n = concepts.size();
    auto index = [&](const std::string& id) -> int {
        for (std::size_t i = 0; i < n; ++i)
            if (concepts[i].id == id) return static_cast<int>(i);
        return -1;
    };
    std::vector<std::vector<int>> adj(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (const std::string& pid : concepts[i].parents) {
            int p = index(pid);
            adj[i].push_back(p);
            adj[p].push_back(static_cast<int>(i));
        }
    }
    std::vector<int> dist(n, -1);
    std::vector<int> queue;
    int s = index(from), t = index(to);
    dist[s] = 0;
    queue.push_back(s);
    for (std::size_t head = 0; head < queue.size(); ++head) {
        int u = queue[head];
        for (int v : adj[u]) {
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    return dist[t];
}

inline std::size_t bfs_diameter(const std::vector<tracecbr::Concept>& concepts)
{
    std::size_t best = 0;
    for (const auto& a : concepts)
        for (const auto& b : concepts) {
            int h = bfs_hops(concepts, a.id, b.id);
            if (h > 0) best = std::max(best, static_cast<std::size_t>(h));
        }
    return best;
}

inline double semantic_distance(const std::vector<tracecbr::Concept>& concepts,
                                const std::string& a, const std::string& b)
{
    if (a == b) return 0.0;
    int hops = bfs_hops(concepts, a, b);
    if (hops < 0) return 1.0;
    return static_cast<double>(hops) / static_cast<double>(bfs_diameter(concepts));
}

inline bool guard(const std::vector<tracecbr::Concept>& concepts,
                  const tracecbr::SemanticFeature& a, const tracecbr::SemanticFeature& b,
                  const tracecbr::SimilarityParams& p)
{
    if (semantic_distance(concepts, a.object, b.object) > p.alpha) return false;
    for (std::size_t k = 0; k < a.quals.size(); ++k) {
        if (semantic_distance(concepts, a.quals[k].qualification,
                              b.quals[k].qualification) > p.beta)
            return false;
        if (std::abs(a.quals[k].value - b.quals[k].value) > p.delta) return false;
    }
    return true;
}

/// Largest monotone alignment: enumerates every equal-size pair of index
/// subsets of A and B (paired in order) and keeps the largest whose pairs
/// all match. Requires n, m <= 16.
inline std::size_t max_alignment(std::size_t n, std::size_t m,
                                 const std::function<bool(std::size_t, std::size_t)>& match)
{
    std::vector<std::vector<char>> ok(n, std::vector<char>(m, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) ok[i][j] = match(i, j) ? 1 : 0;

    std::size_t best = 0;
    std::vector<std::size_t> ai, bi;
    for (std::uint32_t ma = 0; ma < (1u << n); ++ma) {
        const int size = std::popcount(ma);
        if (static_cast<std::size_t>(size) <= best) continue;
        ai.clear();
        for (std::size_t i = 0; i < n; ++i)
            if (ma & (1u << i)) ai.push_back(i);
        for (std::uint32_t mb = 0; mb < (1u << m); ++mb) {
            if (std::popcount(mb) != size) continue;
            bi.clear();
            for (std::size_t j = 0; j < m; ++j)
                if (mb & (1u << j)) bi.push_back(j);
            bool all = true;
            for (int k = 0; k < size; ++k)
                if (!ok[ai[k]][bi[k]]) { all = false; break; }
            if (all) { best = size; break; }
        }
    }
    return best;
}

/// Tail-anchored window predicate on 0-based positions, shared with the
/// enumeration so the oracle covers windowed runs too.
inline bool in_window(std::size_t n, std::size_t m, std::size_t i, std::size_t j,
                      const std::optional<std::size_t>& epsilon)
{
    if (!epsilon) return true;
    long long off = (static_cast<long long>(n) - static_cast<long long>(m)) -
                    (static_cast<long long>(i) - static_cast<long long>(j));
    return std::llabs(off) <= static_cast<long long>(*epsilon);
}

inline std::size_t ilcss(const std::vector<tracecbr::Concept>& concepts,
                         const tracecbr::Trace& a, const tracecbr::Trace& b,
                         const tracecbr::SimilarityParams& p)
{
    return max_alignment(a.size(), b.size(), [&](std::size_t i, std::size_t j) {
        return in_window(a.size(), b.size(), i, j, p.epsilon) &&
               guard(concepts, a.events()[i].sf, b.events()[j].sf, p);
    });
}

/// Direct memoized form of the head recursion: 0 when either side is
/// empty; 1 + value on both tails when the heads match; otherwise the max
/// over dropping one head. No window.
inline std::size_t recursion_ilcss(const std::vector<tracecbr::Concept>& concepts,
                                   const tracecbr::Trace& a, const tracecbr::Trace& b,
                                   const tracecbr::SimilarityParams& p)
{
    const std::size_t n = a.size(), m = b.size();
    std::vector<std::vector<long long>> memo(n + 1, std::vector<long long>(m + 1, -1));
    auto rec = [&](auto&& self, std::size_t i, std::size_t j) -> std::size_t {
        if (i == n || j == m) return 0;
        if (memo[i][j] >= 0) return static_cast<std::size_t>(memo[i][j]);
        std::size_t v;
        if (guard(concepts, a.events()[i].sf, b.events()[j].sf, p))
            v = 1 + self(self, i + 1, j + 1);
        else
            v = std::max(self(self, i + 1, j), self(self, i, j + 1));
        memo[i][j] = static_cast<long long>(v);
        return v;
    };
    return rec(rec, 0, 0);
}

/// Classic LCS by subsequence enumeration: every subset of a, kept if it
/// embeds into b left to right.
inline std::size_t lcs_subsequences(std::string_view a, std::string_view b)
{
    std::size_t best = 0;
    for (std::uint32_t mask = 0; mask < (1u << a.size()); ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) <= best) continue;
        std::size_t pos = 0;
        bool ok = true;
        for (std::size_t i = 0; i < a.size() && ok; ++i) {
            if (!(mask & (1u << i))) continue;
            pos = b.find(a[i], pos);
            if (pos == std::string_view::npos)
                ok = false;
            else
                ++pos;
        }
        if (ok) best = static_cast<std::size_t>(std::popcount(mask));
    }
    return best;
}

/// Minimum-cost warping path by walking every monotone path. Lengths <= 6.
inline double dtw(std::span<const double> a, std::span<const double> b)
{
    const std::size_t n = a.size(), m = b.size();
    auto rec = [&](auto&& self, std::size_t i, std::size_t j) -> double {
        const double cost = std::abs(a[i] - b[j]);
        if (i + 1 == n && j + 1 == m) return cost;
        double best = std::numeric_limits<double>::infinity();
        if (i + 1 < n) best = std::min(best, self(self, i + 1, j));
        if (j + 1 < m) best = std::min(best, self(self, i, j + 1));
        if (i + 1 < n && j + 1 < m) best = std::min(best, self(self, i + 1, j + 1));
        return cost + best;
    };
    return rec(rec, 0, 0);
}

} // namespace oracles

#endif
