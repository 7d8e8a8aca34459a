#ifndef TRACECBR_SIMILARITY_HPP
#define TRACECBR_SIMILARITY_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tracecbr/errors.hpp"
#include "tracecbr/ontology.hpp"
#include "tracecbr/trace.hpp"

namespace tracecbr {

/// Match-guard thresholds. alpha bounds the object semantic distance, beta
/// the qualification semantic distance, delta the absolute value difference.
/// epsilon, when set, restricts matchable pairs to a window on tail-anchored
/// indices: |(|A|-i) - (|B|-j)| <= epsilon. Absent epsilon reproduces the
/// unwindowed recursion.
struct SimilarityParams {
    double alpha = 0.0;
    double beta = 0.0;
    double delta = 0.0;
    std::optional<std::size_t> epsilon;
};

/// Throws validation_error unless all thresholds are finite and >= 0.
void validate_params(const SimilarityParams& p);

enum class Measure { ilcss, lcss, dtw, minkowski };

const char* measure_name(Measure m);

/// Matched index pairs, 0-based, strictly increasing in both coordinates.
struct Alignment {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;

    bool operator==(const Alignment&) const = default;
};

struct MatchReport {
    std::size_t raw_length = 0;
    double normalized = 0.0; // raw / min(|A|,|B|), 0 when either side is empty
    Alignment alignment;
    Measure measure = Measure::ilcss;
};

/// The per-event match guard: DS(objects) <= alpha and, positionally for
/// every i in 1..d, DS(qualifications_i) <= beta and |value_i difference|
/// <= delta. All comparisons are inclusive.
bool sf_match(const SemanticFeature& a, const SemanticFeature& b,
              const SimilarityParams& p, const Ontology& o);

/// Guarded longest common subsequence of two traces, computed by dynamic
/// programming in O(|A|*|B|*d), with the alignment extracted by
/// deterministic backtracking: at equal branch values prefer the match,
/// then prefer dropping an event of A.
MatchReport ilcss(const Trace& a, const Trace& b, const SimilarityParams& p,
                  const Ontology& o);

/// Classic LCS length under exact symbol equality.
std::size_t lcss_classic(std::string_view a, std::string_view b);
std::size_t lcss_classic(std::span<const std::string> a, std::span<const std::string> b);

/// Classic LCS of the object-id sequences of two traces, with the same
/// deterministic backtracking as ilcss.
MatchReport lcss_traces(const Trace& a, const Trace& b);

/// Dynamic time warping distance: minimum over all warping paths (steps
/// down, right, diagonal; endpoints anchored) of summed absolute
/// differences. Both sequences must be nonempty.
double dtw(std::span<const double> a, std::span<const double> b);

/// (sum |u_i - v_i|^p)^(1/p) for p >= 1. Lengths must agree.
double minkowski(std::span<const double> u, std::span<const double> v, double p);

/// raw / min(n, m); 0 when either length is 0. Requires raw <= min(n, m).
double normalized_similarity(std::size_t raw, std::size_t n, std::size_t m);

namespace detail {

/// Trace content with concept ids resolved to ontology indices once, so DP
/// inner loops run on plain arrays. quals/values are n*d, row per event.
struct ResolvedTrace {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<std::uint32_t> objects;
    std::vector<std::uint32_t> quals;
    std::vector<double> values;
};

ResolvedTrace resolve_trace(const Trace& t, const Ontology& o);

/// The sf_match guard on resolved events a[i] vs b[j]; the one definition
/// both the batch DP and the engine's incremental rows use.
bool guard(const Ontology& o, const ResolvedTrace& a, std::size_t i,
           const ResolvedTrace& b, std::size_t j, const SimilarityParams& p);

/// Shared LCS dynamic program over an arbitrary match predicate
/// match(i, j) on 0-based positions. Returns the table value and the
/// deterministic backtrack alignment (prefer match, then prefer advancing
/// the first sequence).
template <typename MatchFn>
std::pair<std::size_t, Alignment> lcs_align(std::size_t n, std::size_t m, MatchFn&& match)
{
    std::vector<std::uint32_t> table((n + 1) * (m + 1), 0);
    auto cell = [&](std::size_t i, std::size_t j) -> std::uint32_t& {
        return table[i * (m + 1) + j];
    };
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 1; j <= m; ++j) {
            if (match(i - 1, j - 1))
                cell(i, j) = cell(i - 1, j - 1) + 1;
            else
                cell(i, j) = std::max(cell(i - 1, j), cell(i, j - 1));
        }
    }

    Alignment alignment;
    std::size_t i = n, j = m;
    while (i > 0 && j > 0) {
        if (match(i - 1, j - 1)) {
            alignment.pairs.emplace_back(i - 1, j - 1);
            --i;
            --j;
        } else if (cell(i - 1, j) >= cell(i, j - 1)) {
            --i;
        } else {
            --j;
        }
    }
    std::reverse(alignment.pairs.begin(), alignment.pairs.end());
    return {cell(n, m), std::move(alignment)};
}

} // namespace detail

} // namespace tracecbr

#endif
