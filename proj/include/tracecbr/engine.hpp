#ifndef TRACECBR_ENGINE_HPP
#define TRACECBR_ENGINE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tracecbr/errors.hpp"
#include "tracecbr/ontology.hpp"
#include "tracecbr/similarity.hpp"
#include "tracecbr/store.hpp"
#include "tracecbr/trace.hpp"

namespace tracecbr {

/// Decision thresholds and the labels treated as risk. Kinds partition
/// confidence: alert/recommend at >= theta_alert (risk label decides which),
/// insufficient_evidence in [theta_min, theta_alert), escalate_to_human
/// below theta_min. Defaults are shipped configuration, not ground truth.
struct DecisionPolicy {
    double theta_alert = 0.7;
    double theta_min = 0.3;
    std::vector<std::string> risk_labels = {"dropout"};

    bool is_risk(const std::string& label) const;
};

/// Throws validation_error unless 0 <= theta_min <= theta_alert <= 1.
void validate_policy(const DecisionPolicy& policy);

/// One retrieval entry: a scenario plus its similarity report against the
/// current target. The report's alignment is filled for returned entries.
struct RankedMatch {
    std::string scenario_id;
    std::string label;
    std::string strategy;
    MatchReport report;
};

using Ranking = std::vector<RankedMatch>;

struct Interpretation {
    std::string label = "unknown";
    double confidence = 0.0;            // top-1 normalized similarity
    std::map<std::string, int> votes;   // per-label tallies over top-k
};

enum class DecisionKind { alert, recommend, escalate_to_human, insufficient_evidence };

const char* decision_kind_name(DecisionKind k);

struct Decision {
    DecisionKind kind = DecisionKind::escalate_to_human;
    std::string subject;
    std::string label;
    double confidence = 0.0;
    std::optional<std::string> strategy;    // alert/recommend only
    std::optional<std::string> scenario_id; // top-1 when a ranking existed
};

struct Prediction {
    std::string scenario_id;
    std::vector<TraceEvent> continuation; // suffix of the source scenario
};

/// One subject's evolving target case against a fixed snapshot of the
/// scenario base. elaborate() feeds events in chronological order and keeps
/// one ILCSS DP row per scenario, so each event costs O(|scenario|*d) guard
/// evaluations (with the tail-anchored epsilon window set, rows are replayed
/// from scratch instead, since the window moves as the target grows).
///
/// The store and ontology must outlive the session. One session has one
/// logical writer; reads of a quiescent session are safe from any thread.
class Session {
public:
    Session(const ScenarioStore& store, const Ontology& ontology,
            SimilarityParams params, DecisionPolicy policy);

    const Trace& target() const { return target_; }
    const SimilarityParams& params() const { return params_; }
    const DecisionPolicy& policy() const { return policy_; }
    std::size_t scenario_count() const { return states_.size(); }

    /// Current ILCSS raw length against scenario #i (store order); equals
    /// a from-scratch ilcss() of the current target at every instant.
    std::size_t raw_length(std::size_t scenario_index) const;

    /// Appends one event to the target and advances every scenario's DP
    /// state. Validation failures leave the session untouched.
    void elaborate(const TraceEvent& e);

    /// Top-k scenarios by (normalized desc, raw desc, id asc); k=0 is
    /// rejected, k > store size returns all. Alignments are computed for
    /// the returned entries only.
    Ranking retrieve(std::size_t k) const;

    /// Events of the top-1 scenario after its last aligned index; the whole
    /// scenario when nothing aligned. Throws on an empty ranking.
    Prediction predict_continuation(const Ranking& ranking) const;

private:
    struct ScenarioState {
        detail::ResolvedTrace resolved;
        std::vector<std::uint32_t> row; // DP row, |scenario|+1 entries
        std::uint32_t raw = 0;
    };

    void advance_row(ScenarioState& s) const;
    void replay_rows();

    const ScenarioStore& store_;
    const Ontology& ontology_;
    SimilarityParams params_;
    DecisionPolicy policy_;
    Trace target_;
    detail::ResolvedTrace resolved_target_; // grows with the target
    std::vector<ScenarioState> states_;
};

/// Free-function form of the constructor.
Session init_session(const ScenarioStore& store, const Ontology& ontology,
                     const SimilarityParams& params, const DecisionPolicy& policy);

/// Majority label over the top-k_vote entries, ties resolved to the top-1
/// label; confidence is the top-1 normalized similarity. Empty ranking
/// yields ("unknown", 0).
Interpretation interpret(const Ranking& ranking, std::size_t k_vote);

/// Applies the decision rule table. subject is carried through verbatim.
Decision decide(const Interpretation& interpretation, const DecisionPolicy& policy,
                const Ranking& ranking, std::string subject = {});

/// Retains the session's target as a new scenario under a fresh id
/// (store.fresh_id()); returns the id. Throws on an empty target.
std::string retain(ScenarioStore& store, const Session& session,
                   const std::string& label, const std::string& strategy);

/// Decision JSONL line: keys t, subject, kind, label, confidence, scenario,
/// strategy; the last two omitted when absent.
std::string decision_to_json(const Decision& d, Timestamp t);

} // namespace tracecbr

#endif
