#include "tracecbr/similarity.hpp"

#include <cmath>
#include <limits>

namespace tracecbr {

void validate_params(const SimilarityParams& p)
{
    auto bad = [](double v) { return !std::isfinite(v) || v < 0.0; };
    if (bad(p.alpha) || bad(p.beta) || bad(p.delta))
        throw validation_error("similarity thresholds must be finite and >= 0");
}

const char* measure_name(Measure m)
{
    switch (m) {
    case Measure::ilcss: return "ilcss";
    case Measure::lcss: return "lcss";
    case Measure::dtw: return "dtw";
    case Measure::minkowski: return "minkowski";
    }
    return "?";
}

namespace detail {

ResolvedTrace resolve_trace(const Trace& t, const Ontology& o)
{
    ResolvedTrace r;
    r.n = t.size();
    r.d = t.dimension();
    r.objects.reserve(r.n);
    r.quals.reserve(r.n * r.d);
    r.values.reserve(r.n * r.d);
    for (const TraceEvent& e : t.events()) {
        r.objects.push_back(o.require(e.sf.object));
        for (const QualValue& qv : e.sf.quals) {
            r.quals.push_back(o.require(qv.qualification));
            r.values.push_back(qv.value);
        }
    }
    return r;
}

bool guard(const Ontology& o, const ResolvedTrace& a, std::size_t i,
           const ResolvedTrace& b, std::size_t j, const SimilarityParams& p)
{
    if (o.distance_by_index(a.objects[i], b.objects[j]) > p.alpha)
        return false;
    const std::size_t d = a.d;
    const std::uint32_t* qa = a.quals.data() + i * d;
    const std::uint32_t* qb = b.quals.data() + j * d;
    const double* va = a.values.data() + i * d;
    const double* vb = b.values.data() + j * d;
    for (std::size_t k = 0; k < d; ++k) {
        if (o.distance_by_index(qa[k], qb[k]) > p.beta) return false;
        if (std::abs(va[k] - vb[k]) > p.delta) return false;
    }
    return true;
}

} // namespace detail

bool sf_match(const SemanticFeature& a, const SemanticFeature& b,
              const SimilarityParams& p, const Ontology& o)
{
    validate_params(p);
    if (a.dimension() != b.dimension())
        throw validation_error("dimension mismatch: d=" + std::to_string(a.dimension()) +
                               " vs d=" + std::to_string(b.dimension()));
    if (o.semantic_distance(a.object, b.object) > p.alpha)
        return false;
    for (std::size_t k = 0; k < a.dimension(); ++k) {
        if (o.semantic_distance(a.quals[k].qualification, b.quals[k].qualification) > p.beta)
            return false;
        if (std::abs(a.quals[k].value - b.quals[k].value) > p.delta)
            return false;
    }
    return true;
}

MatchReport ilcss(const Trace& a, const Trace& b, const SimilarityParams& p,
                  const Ontology& o)
{
    validate_params(p);
    if (!a.empty() && !b.empty() && a.dimension() != b.dimension())
        throw validation_error("dimension mismatch: d=" + std::to_string(a.dimension()) +
                               " vs d=" + std::to_string(b.dimension()));

    const detail::ResolvedTrace ra = detail::resolve_trace(a, o);
    const detail::ResolvedTrace rb = detail::resolve_trace(b, o);
    const std::size_t n = ra.n, m = rb.n;

    auto match = [&](std::size_t i, std::size_t j) {
        if (p.epsilon) {
            // Window on tail-anchored indices, so the last events of both
            // traces always fall inside it.
            const long long off = (static_cast<long long>(n) - static_cast<long long>(m)) -
                                  (static_cast<long long>(i) - static_cast<long long>(j));
            if (std::llabs(off) > static_cast<long long>(*p.epsilon)) return false;
        }
        return detail::guard(o, ra, i, rb, j, p);
    };

    auto [raw, alignment] = detail::lcs_align(n, m, match);

    MatchReport report;
    report.raw_length = raw;
    report.normalized = normalized_similarity(raw, n, m);
    report.alignment = std::move(alignment);
    report.measure = Measure::ilcss;
    return report;
}

std::size_t lcss_classic(std::string_view a, std::string_view b)
{
    return detail::lcs_align(a.size(), b.size(),
                             [&](std::size_t i, std::size_t j) { return a[i] == b[j]; })
        .first;
}

std::size_t lcss_classic(std::span<const std::string> a, std::span<const std::string> b)
{
    return detail::lcs_align(a.size(), b.size(),
                             [&](std::size_t i, std::size_t j) { return a[i] == b[j]; })
        .first;
}

MatchReport lcss_traces(const Trace& a, const Trace& b)
{
    auto match = [&](std::size_t i, std::size_t j) {
        return a.events()[i].sf.object == b.events()[j].sf.object;
    };
    auto [raw, alignment] = detail::lcs_align(a.size(), b.size(), match);

    MatchReport report;
    report.raw_length = raw;
    report.normalized = normalized_similarity(raw, a.size(), b.size());
    report.alignment = std::move(alignment);
    report.measure = Measure::lcss;
    return report;
}

double dtw(std::span<const double> a, std::span<const double> b)
{
    if (a.empty() || b.empty())
        throw validation_error("dtw requires two nonempty sequences");

    const std::size_t n = a.size(), m = b.size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> prev(m + 1, inf), curr(m + 1, inf);
    prev[0] = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        curr[0] = inf;
        for (std::size_t j = 1; j <= m; ++j) {
            const double cost = std::abs(a[i - 1] - b[j - 1]);
            curr[j] = cost + std::min({prev[j - 1], prev[j], curr[j - 1]});
        }
        std::swap(prev, curr);
    }
    return prev[m];
}

double minkowski(std::span<const double> u, std::span<const double> v, double p)
{
    if (!std::isfinite(p) || p < 1.0)
        throw validation_error("minkowski order p must be >= 1");
    if (u.size() != v.size())
        throw validation_error("length mismatch: |u|=" + std::to_string(u.size()) +
                               ", |v|=" + std::to_string(v.size()) +
                               " (minkowski requires same length)");
    double sum = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        sum += std::pow(std::abs(u[i] - v[i]), p);
    return std::pow(sum, 1.0 / p);
}

double normalized_similarity(std::size_t raw, std::size_t n, std::size_t m)
{
    if (n == 0 || m == 0) {
        if (raw != 0)
            throw validation_error("normalized_similarity: raw > 0 for an empty side");
        return 0.0;
    }
    const std::size_t shorter = std::min(n, m);
    if (raw > shorter)
        throw validation_error("normalized_similarity: raw exceeds min(n, m)");
    return static_cast<double>(raw) / static_cast<double>(shorter);
}

} // namespace tracecbr
