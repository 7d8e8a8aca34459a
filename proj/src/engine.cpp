#include "tracecbr/engine.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace tracecbr {

bool DecisionPolicy::is_risk(const std::string& label) const
{
    return std::find(risk_labels.begin(), risk_labels.end(), label) != risk_labels.end();
}

void validate_policy(const DecisionPolicy& policy)
{
    if (!std::isfinite(policy.theta_alert) || !std::isfinite(policy.theta_min) ||
        policy.theta_min < 0.0 || policy.theta_min > policy.theta_alert ||
        policy.theta_alert > 1.0)
        throw validation_error("thresholds must satisfy 0 <= theta_min <= theta_alert <= 1");
}

const char* decision_kind_name(DecisionKind k)
{
    switch (k) {
    case DecisionKind::alert: return "alert";
    case DecisionKind::recommend: return "recommend";
    case DecisionKind::escalate_to_human: return "escalate_to_human";
    case DecisionKind::insufficient_evidence: return "insufficient_evidence";
    }
    return "?";
}

Session::Session(const ScenarioStore& store, const Ontology& ontology,
                 SimilarityParams params, DecisionPolicy policy)
    : store_(store), ontology_(ontology), params_(std::move(params)),
      policy_(std::move(policy))
{
    validate_params(params_);
    validate_policy(policy_);

    states_.reserve(store_.size());
    for (const Scenario& sc : store_.scenarios()) {
        ScenarioState s;
        s.resolved = detail::resolve_trace(sc.trace, ontology_);
        s.row.assign(s.resolved.n + 1, 0);
        states_.push_back(std::move(s));
    }
    resolved_target_.d = store_.dimension();
}

std::size_t Session::raw_length(std::size_t scenario_index) const
{
    return states_.at(scenario_index).raw;
}

// One LCS row transition for the latest target event (already appended to
// resolved_target_). With epsilon set the caller replays whole rows instead.
void Session::advance_row(ScenarioState& s) const
{
    const std::size_t m = s.resolved.n;
    const std::size_t i = resolved_target_.n - 1; // 0-based index of the new event
    std::uint32_t diag = s.row[0];                // old row value at j-1
    for (std::size_t j = 1; j <= m; ++j) {
        const std::uint32_t up = s.row[j];
        std::uint32_t value;
        if (detail::guard(ontology_, resolved_target_, i, s.resolved, j - 1, params_))
            value = diag + 1;
        else
            value = std::max(up, s.row[j - 1]); // s.row[j-1] already holds the new row
        diag = up;
        s.row[j] = value;
    }
    s.raw = s.row[m];
}

// Recomputes every row against the full current target; needed whenever the
// tail-anchored window applies, because target growth shifts the window
// under all previously computed cells.
void Session::replay_rows()
{
    const std::size_t n = resolved_target_.n;
    const long long eps = static_cast<long long>(*params_.epsilon);
    for (ScenarioState& s : states_) {
        const std::size_t m = s.resolved.n;
        std::fill(s.row.begin(), s.row.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            std::uint32_t diag = 0;
            for (std::size_t j = 1; j <= m; ++j) {
                const std::uint32_t up = s.row[j];
                const long long off =
                    (static_cast<long long>(n) - static_cast<long long>(m)) -
                    (static_cast<long long>(i) - static_cast<long long>(j - 1));
                std::uint32_t value;
                if (std::llabs(off) <= eps &&
                    detail::guard(ontology_, resolved_target_, i, s.resolved, j - 1, params_))
                    value = diag + 1;
                else
                    value = std::max(up, s.row[j - 1]);
                diag = up;
                s.row[j] = value;
            }
        }
        s.raw = s.row[m];
    }
}

void Session::elaborate(const TraceEvent& e)
{
    // Validate everything before mutating, so failures leave the session as
    // it was.
    if (!target_.empty()) {
        if (e.subject != target_.subject())
            throw validation_error("subject mismatch: event for '" + e.subject +
                                   "' in session of '" + target_.subject() + "'");
        if (e.sf.dimension() != target_.dimension())
            throw validation_error("dimension mismatch: event has d=" +
                                   std::to_string(e.sf.dimension()) + ", target has d=" +
                                   std::to_string(target_.dimension()));
        if (e.timestamp < target_.events().back().timestamp)
            throw validation_error("out-of-order timestamp: " +
                                   format_timestamp(e.timestamp));
    } else {
        if (e.sf.dimension() == 0)
            throw validation_error("event has no qualifications (d must be >= 1)");
        if (store_.dimension() != 0 && e.sf.dimension() != store_.dimension())
            throw validation_error("dimension mismatch: event has d=" +
                                   std::to_string(e.sf.dimension()) + ", store has d=" +
                                   std::to_string(store_.dimension()));
    }
    const std::uint32_t object = ontology_.require(e.sf.object);
    std::vector<std::uint32_t> quals;
    quals.reserve(e.sf.quals.size());
    for (const QualValue& qv : e.sf.quals) {
        quals.push_back(ontology_.require(qv.qualification));
        if (!std::isfinite(qv.value))
            throw validation_error("non-finite value for " + qv.qualification);
    }

    target_.append(e);
    resolved_target_.n += 1;
    resolved_target_.d = target_.dimension();
    resolved_target_.objects.push_back(object);
    for (std::size_t k = 0; k < quals.size(); ++k) {
        resolved_target_.quals.push_back(quals[k]);
        resolved_target_.values.push_back(e.sf.quals[k].value);
    }

    if (params_.epsilon)
        replay_rows();
    else
        for (ScenarioState& s : states_) advance_row(s);
}

Ranking Session::retrieve(std::size_t k) const
{
    if (k == 0)
        throw validation_error("k must be a positive integer");

    struct Entry {
        std::size_t index;
        std::size_t raw;
        double normalized;
    };
    std::vector<Entry> entries;
    entries.reserve(states_.size());
    for (std::size_t i = 0; i < states_.size(); ++i) {
        const std::size_t raw = states_[i].raw;
        entries.push_back({i, raw,
                           normalized_similarity(raw, target_.size(),
                                                 states_[i].resolved.n)});
    }
    std::sort(entries.begin(), entries.end(), [&](const Entry& a, const Entry& b) {
        if (a.normalized != b.normalized) return a.normalized > b.normalized;
        if (a.raw != b.raw) return a.raw > b.raw;
        return store_.scenarios()[a.index].id < store_.scenarios()[b.index].id;
    });
    if (k < entries.size()) entries.resize(k);

    Ranking ranking;
    ranking.reserve(entries.size());
    for (const Entry& e : entries) {
        const Scenario& sc = store_.scenarios()[e.index];
        RankedMatch rm;
        rm.scenario_id = sc.id;
        rm.label = sc.label;
        rm.strategy = sc.strategy;
        rm.report = ilcss(target_, sc.trace, params_, ontology_);
        ranking.push_back(std::move(rm));
    }
    return ranking;
}

Prediction Session::predict_continuation(const Ranking& ranking) const
{
    if (ranking.empty())
        throw validation_error("predict_continuation requires a nonempty ranking");

    const RankedMatch& top = ranking.front();
    const Scenario& sc = store_.get(top.scenario_id);

    Prediction p;
    p.scenario_id = sc.id;
    std::size_t from = 0; // raw 0: the whole scenario is the continuation
    if (!top.report.alignment.pairs.empty())
        from = top.report.alignment.pairs.back().second + 1;
    p.continuation.assign(sc.trace.events().begin() +
                              static_cast<std::ptrdiff_t>(from),
                          sc.trace.events().end());
    return p;
}

Session init_session(const ScenarioStore& store, const Ontology& ontology,
                     const SimilarityParams& params, const DecisionPolicy& policy)
{
    return Session(store, ontology, params, policy);
}

Interpretation interpret(const Ranking& ranking, std::size_t k_vote)
{
    if (k_vote == 0)
        throw validation_error("k_vote must be a positive integer");

    Interpretation out;
    if (ranking.empty()) return out; // ("unknown", 0)

    out.confidence = ranking.front().report.normalized;
    const std::size_t considered = std::min(k_vote, ranking.size());
    for (std::size_t i = 0; i < considered; ++i)
        out.votes[ranking[i].label] += 1;

    int best = 0;
    bool tie = false;
    for (const auto& [label, count] : out.votes) {
        if (count > best) {
            best = count;
            out.label = label;
            tie = false;
        } else if (count == best) {
            tie = true;
        }
    }
    if (tie) out.label = ranking.front().label;
    return out;
}

Decision decide(const Interpretation& interpretation, const DecisionPolicy& policy,
                const Ranking& ranking, std::string subject)
{
    validate_policy(policy);

    Decision d;
    d.subject = std::move(subject);
    d.label = interpretation.label;
    d.confidence = interpretation.confidence;
    if (!ranking.empty())
        d.scenario_id = ranking.front().scenario_id;

    if (d.confidence >= policy.theta_alert) {
        d.kind = policy.is_risk(d.label) ? DecisionKind::alert : DecisionKind::recommend;
        if (!ranking.empty())
            d.strategy = ranking.front().strategy;
    } else if (d.confidence >= policy.theta_min) {
        d.kind = DecisionKind::insufficient_evidence;
    } else {
        d.kind = DecisionKind::escalate_to_human;
    }
    return d;
}

std::string retain(ScenarioStore& store, const Session& session,
                   const std::string& label, const std::string& strategy)
{
    if (session.target().empty())
        throw validation_error("cannot retain an empty target");
    if (label.empty())
        throw validation_error("scenario label must be nonempty");

    Scenario sc;
    sc.id = store.fresh_id();
    sc.trace = session.target();
    sc.label = label;
    sc.strategy = strategy;
    store.add(std::move(sc));
    return store.scenarios().back().id;
}

std::string decision_to_json(const Decision& d, Timestamp t)
{
    nlohmann::ordered_json j;
    j["t"] = format_timestamp(t);
    j["subject"] = d.subject;
    j["kind"] = decision_kind_name(d.kind);
    j["label"] = d.label;
    j["confidence"] = d.confidence;
    if (d.scenario_id) j["scenario"] = *d.scenario_id;
    if (d.strategy) j["strategy"] = *d.strategy;
    return j.dump();
}

} // namespace tracecbr
