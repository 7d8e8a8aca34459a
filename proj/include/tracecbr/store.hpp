#ifndef TRACECBR_STORE_HPP
#define TRACECBR_STORE_HPP

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "tracecbr/errors.hpp"
#include "tracecbr/ontology.hpp"
#include "tracecbr/trace.hpp"

namespace tracecbr {

/// A completed past trace with its outcome and the teaching action that
/// worked (or failed). Conventional labels are "dropout", "difficulty",
/// "success"; the vocabulary is open.
struct Scenario {
    std::string id;
    Trace trace;
    std::string label;
    std::string strategy;
    std::map<std::string, std::string> notes;
};

struct ScenarioSummary {
    std::string id;
    std::string label;
    std::size_t length = 0;
};

/// The base of scenarios, backed by an append-only JSONL file. Iteration
/// order is file order. Every scenario shares one qualification dimension.
/// Concurrent reads are safe; writes must be serialized by the caller.
class ScenarioStore {
public:
    ScenarioStore() = default;

    /// Validates ids (unique, nonempty), nonempty traces and labels, and
    /// dimension consistency; throws validation_error.
    explicit ScenarioStore(std::vector<Scenario> scenarios,
                           std::optional<std::string> path = std::nullopt);

    const std::vector<Scenario>& scenarios() const { return scenarios_; }
    std::size_t size() const { return scenarios_.size(); }
    bool empty() const { return scenarios_.empty(); }

    /// Shared qualification dimension; 0 while the store is empty.
    std::size_t dimension() const { return dimension_; }

    const std::optional<std::string>& path() const { return path_; }

    bool contains(const std::string& id) const;

    /// Throws validation_error naming the id when absent.
    const Scenario& get(const std::string& id) const;

    /// Appends a validated scenario; when a backing file is attached, the
    /// scenario is persisted as one appended line. Existing entries are
    /// never touched. Throws on duplicate id or dimension mismatch.
    void add(Scenario sc);

    std::vector<ScenarioSummary> list() const;

    /// Next id in the documented scheme: "s" + (max numeric suffix over ids
    /// of the form s<digits>) + 1, starting at "s1".
    std::string fresh_id() const;

private:
    void validate_new(const Scenario& sc) const;

    std::vector<Scenario> scenarios_;
    std::unordered_map<std::string, std::size_t> index_;
    std::optional<std::string> path_;
    std::size_t dimension_ = 0;
};

/// Parses one scenario JSONL line; concepts are validated against the
/// ontology. line_no (1-based) is used in error messages; 0 disables it.
Scenario parse_scenario_line(const std::string& line, const Ontology& o,
                             std::size_t line_no = 0);

/// Canonical one-line JSON: keys id, label, strategy, events, notes (notes
/// omitted when empty); events exactly as event_to_json renders them.
std::string scenario_to_json(const Scenario& sc);

/// Loads a scenario JSONL file. The returned store keeps the path attached,
/// so add() appends to it. Throws io_error when the file cannot be read.
ScenarioStore open_store(const std::string& path, const Ontology& o);

/// Writes every scenario as canonical JSONL, one line each. open(save(S))
/// reproduces S exactly.
void save_store(const ScenarioStore& s, const std::string& path);

/// Free-function forms of the member operations.
ScenarioStore add_scenario(ScenarioStore s, Scenario sc);
const Scenario& get_scenario(const ScenarioStore& s, const std::string& id);
std::vector<ScenarioSummary> list_scenarios(const ScenarioStore& s);

} // namespace tracecbr

#endif
