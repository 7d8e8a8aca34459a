#ifndef TRACECBR_TRACE_HPP
#define TRACECBR_TRACE_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tracecbr/errors.hpp"
#include "tracecbr/ontology.hpp"

namespace tracecbr {

/// Microseconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

/// Parses a strict RFC 3339 UTC instant: "YYYY-MM-DDThh:mm:ss[.frac]Z",
/// uppercase separators, up to six fractional digits. Throws parse_error.
Timestamp parse_timestamp(const std::string& text);

/// Canonical rendering: seconds, fraction only when nonzero, trailing
/// zeros trimmed. format(parse(format(t))) == format(t) byte for byte.
std::string format_timestamp(Timestamp t);

struct QualValue {
    std::string qualification; // concept id
    double value = 0.0;

    bool operator==(const QualValue&) const = default;
};

/// One observed action: object concept plus d >= 1 (qualification, value)
/// pairs in significant order.
struct SemanticFeature {
    std::string object;
    std::vector<QualValue> quals;

    std::size_t dimension() const { return quals.size(); }
    bool operator==(const SemanticFeature&) const = default;
};

struct TraceEvent {
    SemanticFeature sf;
    Timestamp timestamp = 0;
    std::string subject;

    bool operator==(const TraceEvent&) const = default;
};

/// Chronologically ordered event sequence of one subject. Events all share
/// the qualification dimension d, fixed by the first event appended.
/// Value-like: copy freely, share across threads for reading.
class Trace {
public:
    Trace() = default;
    explicit Trace(std::string subject) : subject_(std::move(subject)) {}

    const std::string& subject() const { return subject_; }
    const std::vector<TraceEvent>& events() const { return events_; }
    std::size_t size() const { return events_.size(); }
    bool empty() const { return events_.empty(); }

    /// 0 while the trace is empty.
    std::size_t dimension() const { return dimension_; }

    /// Appends in place. Same preconditions as append_event below.
    void append(TraceEvent e);

    bool operator==(const Trace&) const = default;

private:
    std::string subject_;
    std::vector<TraceEvent> events_;
    std::size_t dimension_ = 0;
};

/// Returns a copy of t extended with e. An empty trace adopts e's subject
/// and dimension; otherwise e must match both and must not precede the last
/// event. Throws validation_error.
Trace append_event(Trace t, TraceEvent e);

/// Violation descriptions for every trace invariant break: per-event
/// dimension mismatches, unknown concept ids, subject mismatches,
/// out-of-order timestamps, non-finite values, d = 0. Event indices in the
/// messages are 1-based ordinals.
std::vector<std::string> validate_trace(const Trace& t, const Ontology& o);

/// Parses one event JSONL line. line_no is used in error messages (1-based);
/// pass 0 when there is no meaningful line number.
TraceEvent parse_event_line(const std::string& line, const Ontology& o,
                            std::size_t line_no = 0);

/// Reads event JSONL, groups events per subject (order of first appearance)
/// and sorts each group by timestamp, stable on input order. Every concept
/// id is validated against the ontology; each subject's dimension is fixed
/// by its first event.
std::vector<Trace> parse_log(std::istream& in, const Ontology& o);
std::vector<Trace> parse_log(const std::string& text, const Ontology& o);

/// Opens and parses an event JSONL file; throws io_error when unreadable.
std::vector<Trace> parse_log_file(const std::string& path, const Ontology& o);

/// Canonical one-line JSON for an event; key order t, subject, object,
/// quals, and q before v inside each pair.
std::string event_to_json(const TraceEvent& e);

/// Canonical event JSONL for a whole trace, one line per event with a
/// trailing newline after each.
std::string trace_to_jsonl(const Trace& t);

/// Value stream of one qualification, by id, across all events. Every event
/// must carry the qualification; throws validation_error otherwise.
std::vector<double> qualification_values(const Trace& t, const std::string& qualification);

} // namespace tracecbr

#endif
