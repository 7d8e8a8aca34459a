#include "tracecbr/trace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

namespace tracecbr {

namespace {

// Days between 1970-01-01 and y-m-d in the proleptic Gregorian calendar
// (Howard Hinnant's civil-date algorithm).
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d)
{
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d)
{
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp < 10 ? mp + 3 : mp - 9;
    y += m <= 2;
}

unsigned days_in_month(std::int64_t y, unsigned m)
{
    static const unsigned lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2) {
        bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
        return leap ? 29 : 28;
    }
    return lengths[m - 1];
}

bool all_digits(const std::string& s, std::size_t pos, std::size_t count)
{
    if (pos + count > s.size()) return false;
    for (std::size_t i = 0; i < count; ++i)
        if (s[pos + i] < '0' || s[pos + i] > '9') return false;
    return true;
}

unsigned read_uint(const std::string& s, std::size_t pos, std::size_t count)
{
    unsigned v = 0;
    for (std::size_t i = 0; i < count; ++i)
        v = v * 10 + static_cast<unsigned>(s[pos + i] - '0');
    return v;
}

} // namespace

Timestamp parse_timestamp(const std::string& text)
{
    auto fail = [&]() -> Timestamp {
        throw parse_error("bad timestamp: " + text +
                          " (expected YYYY-MM-DDThh:mm:ss[.frac]Z)");
    };

    // Fixed layout: 0123456789...
    //               YYYY-MM-DDThh:mm:ss
    if (text.size() < 20) return fail();
    if (!all_digits(text, 0, 4) || text[4] != '-' || !all_digits(text, 5, 2) ||
        text[7] != '-' || !all_digits(text, 8, 2) || text[10] != 'T' ||
        !all_digits(text, 11, 2) || text[13] != ':' || !all_digits(text, 14, 2) ||
        text[16] != ':' || !all_digits(text, 17, 2))
        return fail();

    const unsigned year = read_uint(text, 0, 4);
    const unsigned month = read_uint(text, 5, 2);
    const unsigned day = read_uint(text, 8, 2);
    const unsigned hour = read_uint(text, 11, 2);
    const unsigned minute = read_uint(text, 14, 2);
    const unsigned second = read_uint(text, 17, 2);

    if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month) ||
        hour > 23 || minute > 59 || second > 59)
        return fail();

    std::size_t pos = 19;
    std::int64_t micros = 0;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        std::size_t digits = 0;
        while (pos + digits < text.size() && text[pos + digits] >= '0' &&
               text[pos + digits] <= '9')
            ++digits;
        if (digits < 1 || digits > 6) return fail();
        micros = read_uint(text, pos, digits);
        for (std::size_t i = digits; i < 6; ++i) micros *= 10;
        pos += digits;
    }
    if (pos + 1 != text.size() || text[pos] != 'Z') return fail();

    const std::int64_t days = days_from_civil(year, month, day);
    const std::int64_t seconds = days * 86400 + hour * 3600 + minute * 60 + second;
    return seconds * 1000000 + micros;
}

std::string format_timestamp(Timestamp t)
{
    std::int64_t micros = t % 1000000;
    std::int64_t seconds = t / 1000000;
    if (micros < 0) {
        micros += 1000000;
        seconds -= 1;
    }
    std::int64_t days = seconds / 86400;
    std::int64_t sod = seconds % 86400;
    if (sod < 0) {
        sod += 86400;
        days -= 1;
    }
    std::int64_t year;
    unsigned month, day;
    civil_from_days(days, year, month, day);

    char buf[40];
    std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02lld:%02lld:%02lld",
                  static_cast<long long>(year), month, day,
                  static_cast<long long>(sod / 3600),
                  static_cast<long long>(sod % 3600 / 60),
                  static_cast<long long>(sod % 60));
    std::string out(buf);
    if (micros != 0) {
        std::snprintf(buf, sizeof buf, ".%06lld", static_cast<long long>(micros));
        std::string frac(buf);
        while (frac.back() == '0') frac.pop_back();
        out += frac;
    }
    out += 'Z';
    return out;
}

void Trace::append(TraceEvent e)
{
    if (empty()) {
        subject_ = e.subject;
        dimension_ = e.sf.dimension();
        if (dimension_ == 0)
            throw validation_error("event has no qualifications (d must be >= 1)");
    } else {
        if (e.subject != subject_)
            throw validation_error("subject mismatch: event for '" + e.subject +
                                   "' appended to trace of '" + subject_ + "'");
        if (e.sf.dimension() != dimension_)
            throw validation_error(
                "dimension mismatch: event has d=" + std::to_string(e.sf.dimension()) +
                ", trace has d=" + std::to_string(dimension_));
        if (e.timestamp < events_.back().timestamp)
            throw validation_error("out-of-order timestamp: " +
                                   format_timestamp(e.timestamp) + " precedes " +
                                   format_timestamp(events_.back().timestamp));
    }
    events_.push_back(std::move(e));
}

Trace append_event(Trace t, TraceEvent e)
{
    t.append(std::move(e));
    return t;
}

std::vector<std::string> validate_trace(const Trace& t, const Ontology& o)
{
    std::vector<std::string> violations;
    const auto& events = t.events();
    for (std::size_t i = 0; i < events.size(); ++i) {
        const TraceEvent& e = events[i];
        const std::string at = "event " + std::to_string(i + 1) + ": ";
        if (e.subject != t.subject())
            violations.push_back(at + "subject '" + e.subject + "' != trace subject '" +
                                 t.subject() + "'");
        if (e.sf.quals.empty())
            violations.push_back(at + "no qualifications");
        else if (e.sf.dimension() != t.dimension())
            violations.push_back(at + "dimension " + std::to_string(e.sf.dimension()) +
                                 " != trace dimension " + std::to_string(t.dimension()));
        if (!o.contains(e.sf.object))
            violations.push_back(at + "unknown object: " + e.sf.object);
        for (const QualValue& qv : e.sf.quals) {
            if (!o.contains(qv.qualification))
                violations.push_back(at + "unknown qualification: " + qv.qualification);
            if (!std::isfinite(qv.value))
                violations.push_back(at + "non-finite value for " + qv.qualification);
        }
        if (i > 0 && e.timestamp < events[i - 1].timestamp)
            violations.push_back(at + "timestamp precedes event " + std::to_string(i));
    }
    return violations;
}

namespace {

std::string at_line(std::size_t line_no)
{
    return line_no ? "line " + std::to_string(line_no) + ": " : "";
}

} // namespace

TraceEvent parse_event_line(const std::string& line, const Ontology& o,
                            std::size_t line_no)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw parse_error(at_line(line_no) + e.what());
    }
    if (!j.is_object())
        throw parse_error(at_line(line_no) + "event must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        if (k != "t" && k != "subject" && k != "object" && k != "quals")
            throw parse_error(at_line(line_no) + "unknown key: " + k);
    }
    for (const char* k : {"t", "subject", "object"}) {
        if (!j.contains(k) || !j[k].is_string())
            throw parse_error(at_line(line_no) + "missing string \"" + k + "\"");
    }
    if (!j.contains("quals") || !j["quals"].is_array())
        throw parse_error(at_line(line_no) + "missing \"quals\" array");

    TraceEvent e;
    try {
        e.timestamp = parse_timestamp(j["t"].get<std::string>());
    } catch (const parse_error& err) {
        throw parse_error(at_line(line_no) + err.what());
    }
    e.subject = j["subject"].get<std::string>();
    if (e.subject.empty())
        throw validation_error(at_line(line_no) + "empty subject");
    e.sf.object = j["object"].get<std::string>();
    if (!o.contains(e.sf.object))
        throw validation_error(at_line(line_no) + "unknown concept: " + e.sf.object);

    for (const auto& q : j["quals"]) {
        if (!q.is_object() || !q.contains("q") || !q["q"].is_string() ||
            !q.contains("v") || !q["v"].is_number() || q.size() != 2)
            throw parse_error(at_line(line_no) +
                              "each qual must be {\"q\": string, \"v\": number}");
        QualValue qv;
        qv.qualification = q["q"].get<std::string>();
        qv.value = q["v"].get<double>();
        if (!o.contains(qv.qualification))
            throw validation_error(at_line(line_no) +
                                   "unknown concept: " + qv.qualification);
        if (!std::isfinite(qv.value))
            throw validation_error(at_line(line_no) + "non-finite value");
        e.sf.quals.push_back(std::move(qv));
    }
    if (e.sf.quals.empty())
        throw validation_error(at_line(line_no) +
                               "event must have at least one qualification");
    return e;
}

std::vector<Trace> parse_log(std::istream& in, const Ontology& o)
{
    struct PendingTrace {
        std::string subject;
        std::size_t dimension = 0;
        std::vector<TraceEvent> events; // input order within subject
    };
    std::vector<PendingTrace> groups;
    std::unordered_map<std::string, std::size_t> by_subject;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        TraceEvent e = parse_event_line(line, o, line_no);

        auto [it, fresh] = by_subject.emplace(e.subject, groups.size());
        if (fresh) {
            groups.push_back({e.subject, e.sf.dimension(), {}});
        } else if (e.sf.dimension() != groups[it->second].dimension) {
            throw validation_error(
                at_line(line_no) + "dimension mismatch: event has d=" +
                std::to_string(e.sf.dimension()) + ", trace of '" + e.subject +
                "' has d=" + std::to_string(groups[it->second].dimension));
        }
        groups[it->second].events.push_back(std::move(e));
    }

    std::vector<Trace> traces;
    traces.reserve(groups.size());
    for (PendingTrace& g : groups) {
        std::stable_sort(g.events.begin(), g.events.end(),
                         [](const TraceEvent& a, const TraceEvent& b) {
                             return a.timestamp < b.timestamp;
                         });
        Trace t(g.subject);
        for (TraceEvent& e : g.events) t.append(std::move(e));
        traces.push_back(std::move(t));
    }
    return traces;
}

std::vector<Trace> parse_log(const std::string& text, const Ontology& o)
{
    std::istringstream in(text);
    return parse_log(in, o);
}

std::vector<Trace> parse_log_file(const std::string& path, const Ontology& o)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io_error("cannot open trace file: " + path);
    return parse_log(in, o);
}

std::string event_to_json(const TraceEvent& e)
{
    nlohmann::ordered_json j;
    j["t"] = format_timestamp(e.timestamp);
    j["subject"] = e.subject;
    j["object"] = e.sf.object;
    nlohmann::ordered_json quals = nlohmann::ordered_json::array();
    for (const QualValue& qv : e.sf.quals) {
        nlohmann::ordered_json q;
        q["q"] = qv.qualification;
        q["v"] = qv.value;
        quals.push_back(std::move(q));
    }
    j["quals"] = std::move(quals);
    return j.dump();
}

std::string trace_to_jsonl(const Trace& t)
{
    std::string out;
    for (const TraceEvent& e : t.events()) {
        out += event_to_json(e);
        out += '\n';
    }
    return out;
}

std::vector<double> qualification_values(const Trace& t, const std::string& qualification)
{
    std::vector<double> values;
    values.reserve(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        const auto& quals = t.events()[i].sf.quals;
        auto it = std::find_if(quals.begin(), quals.end(), [&](const QualValue& qv) {
            return qv.qualification == qualification;
        });
        if (it == quals.end())
            throw validation_error("event " + std::to_string(i + 1) +
                                   " has no qualification '" + qualification + "'");
        values.push_back(it->value);
    }
    return values;
}

} // namespace tracecbr
