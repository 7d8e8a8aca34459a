#include "tracecbr/store.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

namespace tracecbr {

namespace {

std::string at_line(std::size_t line_no)
{
    return line_no ? "line " + std::to_string(line_no) + ": " : "";
}

void validate_scenario_shape(const Scenario& sc, std::size_t line_no)
{
    if (sc.id.empty())
        throw validation_error(at_line(line_no) + "scenario id must be nonempty");
    if (sc.label.empty())
        throw validation_error(at_line(line_no) + "scenario label must be nonempty");
    if (sc.trace.empty())
        throw validation_error(at_line(line_no) + "scenario trace must be nonempty");
}

} // namespace

ScenarioStore::ScenarioStore(std::vector<Scenario> scenarios,
                             std::optional<std::string> path)
    : path_(std::move(path))
{
    for (Scenario& sc : scenarios) {
        validate_new(sc);
        if (dimension_ == 0) dimension_ = sc.trace.dimension();
        index_.emplace(sc.id, scenarios_.size());
        scenarios_.push_back(std::move(sc));
    }
}

bool ScenarioStore::contains(const std::string& id) const
{
    return index_.find(id) != index_.end();
}

const Scenario& ScenarioStore::get(const std::string& id) const
{
    auto it = index_.find(id);
    if (it == index_.end())
        throw validation_error("scenario not found: " + id);
    return scenarios_[it->second];
}

void ScenarioStore::validate_new(const Scenario& sc) const
{
    validate_scenario_shape(sc, 0);
    if (contains(sc.id))
        throw validation_error("duplicate scenario id: " + sc.id);
    if (dimension_ != 0 && sc.trace.dimension() != dimension_)
        throw validation_error("dimension mismatch: scenario '" + sc.id + "' has d=" +
                               std::to_string(sc.trace.dimension()) + ", store has d=" +
                               std::to_string(dimension_));
}

void ScenarioStore::add(Scenario sc)
{
    validate_new(sc);
    if (path_) {
        std::ofstream out(*path_, std::ios::binary | std::ios::app);
        if (!out)
            throw io_error("cannot append to scenario file: " + *path_);
        out << scenario_to_json(sc) << '\n';
        out.flush();
        if (!out)
            throw io_error("write failed: " + *path_);
    }
    if (dimension_ == 0) dimension_ = sc.trace.dimension();
    index_.emplace(sc.id, scenarios_.size());
    scenarios_.push_back(std::move(sc));
}

std::vector<ScenarioSummary> ScenarioStore::list() const
{
    std::vector<ScenarioSummary> out;
    out.reserve(scenarios_.size());
    for (const Scenario& sc : scenarios_)
        out.push_back({sc.id, sc.label, sc.trace.size()});
    return out;
}

std::string ScenarioStore::fresh_id() const
{
    long long max_suffix = 0;
    for (const Scenario& sc : scenarios_) {
        const std::string& id = sc.id;
        if (id.size() < 2 || id.size() > 19 || id[0] != 's') continue;
        bool numeric = true;
        for (std::size_t i = 1; i < id.size(); ++i)
            if (id[i] < '0' || id[i] > '9') { numeric = false; break; }
        if (!numeric) continue;
        max_suffix = std::max(max_suffix, std::stoll(id.substr(1)));
    }
    return "s" + std::to_string(max_suffix + 1);
}

Scenario parse_scenario_line(const std::string& line, const Ontology& o,
                             std::size_t line_no)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw parse_error(at_line(line_no) + e.what());
    }
    if (!j.is_object())
        throw parse_error(at_line(line_no) + "scenario must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        if (k != "id" && k != "label" && k != "strategy" && k != "events" && k != "notes")
            throw parse_error(at_line(line_no) + "unknown key: " + k);
    }
    for (const char* k : {"id", "label", "strategy"}) {
        if (!j.contains(k) || !j[k].is_string())
            throw parse_error(at_line(line_no) + "missing string \"" + k + "\"");
    }
    if (!j.contains("events") || !j["events"].is_array())
        throw parse_error(at_line(line_no) + "missing \"events\" array");

    Scenario sc;
    sc.id = j["id"].get<std::string>();
    sc.label = j["label"].get<std::string>();
    sc.strategy = j["strategy"].get<std::string>();

    for (const auto& ev : j["events"]) {
        TraceEvent e = parse_event_line(ev.dump(), o, line_no);
        try {
            sc.trace.append(std::move(e));
        } catch (const validation_error& err) {
            throw validation_error(at_line(line_no) + "scenario '" + sc.id +
                                   "': " + err.what());
        }
    }

    if (j.contains("notes")) {
        if (!j["notes"].is_object())
            throw parse_error(at_line(line_no) + "\"notes\" must be an object");
        for (auto it = j["notes"].begin(); it != j["notes"].end(); ++it) {
            if (!it.value().is_string())
                throw parse_error(at_line(line_no) + "notes values must be strings");
            sc.notes[it.key()] = it.value().get<std::string>();
        }
    }

    validate_scenario_shape(sc, line_no);
    return sc;
}

std::string scenario_to_json(const Scenario& sc)
{
    nlohmann::ordered_json j;
    j["id"] = sc.id;
    j["label"] = sc.label;
    j["strategy"] = sc.strategy;
    nlohmann::ordered_json events = nlohmann::ordered_json::array();
    for (const TraceEvent& e : sc.trace.events())
        events.push_back(nlohmann::ordered_json::parse(event_to_json(e)));
    j["events"] = std::move(events);
    if (!sc.notes.empty()) {
        nlohmann::ordered_json notes = nlohmann::ordered_json::object();
        for (const auto& [k, v] : sc.notes) notes[k] = v;
        j["notes"] = std::move(notes);
    }
    return j.dump();
}

ScenarioStore open_store(const std::string& path, const Ontology& o)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io_error("cannot open scenario file: " + path);

    std::vector<Scenario> scenarios;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    std::size_t dimension = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        Scenario sc = parse_scenario_line(line, o, line_no);
        if (!seen.insert(sc.id).second)
            throw validation_error(at_line(line_no) +
                                   "duplicate scenario id: " + sc.id);
        if (dimension == 0)
            dimension = sc.trace.dimension();
        else if (sc.trace.dimension() != dimension)
            throw validation_error(at_line(line_no) + "dimension mismatch: scenario '" +
                                   sc.id + "' has d=" +
                                   std::to_string(sc.trace.dimension()) +
                                   ", store has d=" + std::to_string(dimension));
        scenarios.push_back(std::move(sc));
    }
    return ScenarioStore(std::move(scenarios), path);
}

void save_store(const ScenarioStore& s, const std::string& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw io_error("cannot write scenario file: " + path);
    for (const Scenario& sc : s.scenarios())
        out << scenario_to_json(sc) << '\n';
    out.flush();
    if (!out)
        throw io_error("write failed: " + path);
}

ScenarioStore add_scenario(ScenarioStore s, Scenario sc)
{
    s.add(std::move(sc));
    return s;
}

const Scenario& get_scenario(const ScenarioStore& s, const std::string& id)
{
    return s.get(id);
}

std::vector<ScenarioSummary> list_scenarios(const ScenarioStore& s)
{
    return s.list();
}

} // namespace tracecbr
