#include "tracecbr/ontology.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace tracecbr {

namespace {

constexpr std::uint16_t kUnreachable = std::numeric_limits<std::uint16_t>::max();

// Walks parent edges from each concept, three-color DFS. Reports one
// violation per cycle found, spelled as the id path that closes it.
void find_cycles(const std::vector<Concept>& concepts,
                 const std::unordered_map<std::string, std::uint32_t>& index,
                 std::vector<std::string>& out)
{
    enum class Mark : std::uint8_t { White, Gray, Black };
    std::vector<Mark> mark(concepts.size(), Mark::White);
    std::vector<std::uint32_t> path;

    // Recursive lambda; ontologies are small enough for plain recursion.
    auto visit = [&](auto&& self, std::uint32_t u) -> void {
        mark[u] = Mark::Gray;
        path.push_back(u);
        for (const std::string& pid : concepts[u].parents) {
            auto it = index.find(pid);
            if (it == index.end()) continue; // dangling parent reported elsewhere
            std::uint32_t v = it->second;
            if (mark[v] == Mark::Gray) {
                std::ostringstream msg;
                msg << "parent cycle: ";
                auto start = std::find(path.begin(), path.end(), v);
                for (auto p = start; p != path.end(); ++p)
                    msg << concepts[*p].id << " -> ";
                msg << concepts[v].id;
                out.push_back(msg.str());
            } else if (mark[v] == Mark::White) {
                self(self, v);
            }
        }
        path.pop_back();
        mark[u] = Mark::Black;
    };

    for (std::uint32_t u = 0; u < concepts.size(); ++u)
        if (mark[u] == Mark::White) visit(visit, u);
}

} // namespace

std::vector<std::string> validate_concepts(const std::vector<Concept>& concepts)
{
    std::vector<std::string> violations;

    std::unordered_map<std::string, std::uint32_t> index;
    for (std::uint32_t i = 0; i < concepts.size(); ++i) {
        const Concept& c = concepts[i];
        if (c.id.empty()) {
            violations.push_back("empty concept id");
            continue;
        }
        if (!index.emplace(c.id, i).second)
            violations.push_back("duplicate concept id: " + c.id);
    }

    for (const Concept& c : concepts)
        for (const std::string& pid : c.parents)
            if (index.find(pid) == index.end())
                violations.push_back("unknown parent: " + pid);

    find_cycles(concepts, index, violations);
    return violations;
}

Ontology::Ontology(std::vector<Concept> concepts)
    : concepts_(std::move(concepts))
{
    std::vector<std::string> violations = validate_concepts(concepts_);
    if (!violations.empty()) {
        std::string msg = "invalid ontology:";
        for (const std::string& v : violations) msg += "\n  " + v;
        throw validation_error(msg);
    }

    for (std::uint32_t i = 0; i < concepts_.size(); ++i)
        index_.emplace(concepts_[i].id, i);

    // Undirected adjacency over parent edges.
    const std::size_t n = concepts_.size();
    std::vector<std::vector<std::uint32_t>> adj(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        for (const std::string& pid : concepts_[i].parents) {
            std::uint32_t p = index_.at(pid);
            adj[i].push_back(p);
            adj[p].push_back(i);
        }
    }

    // BFS from every node. Desk-scale graphs, so the dense matrix is fine.
    dist_.assign(n * n, kUnreachable);
    std::deque<std::uint32_t> queue;
    for (std::uint32_t s = 0; s < n; ++s) {
        std::uint16_t* row = dist_.data() + static_cast<std::size_t>(s) * n;
        row[s] = 0;
        queue.clear();
        queue.push_back(s);
        while (!queue.empty()) {
            std::uint32_t u = queue.front();
            queue.pop_front();
            for (std::uint32_t v : adj[u]) {
                if (row[v] == kUnreachable) {
                    row[v] = static_cast<std::uint16_t>(row[u] + 1);
                    queue.push_back(v);
                }
            }
        }
    }

    diameter_ = 0;
    for (std::uint16_t d : dist_)
        if (d != kUnreachable && d > diameter_) diameter_ = d;
}

bool Ontology::contains(const std::string& id) const
{
    return index_.find(id) != index_.end();
}

std::optional<std::uint32_t> Ontology::index_of(const std::string& id) const
{
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::uint32_t Ontology::require(const std::string& id) const
{
    auto it = index_.find(id);
    if (it == index_.end())
        throw validation_error("unknown concept: " + id);
    return it->second;
}

double Ontology::distance_by_index(std::uint32_t a, std::uint32_t b) const
{
    if (a == b) return 0.0;
    std::uint16_t d = dist_[static_cast<std::size_t>(a) * concepts_.size() + b];
    if (d == kUnreachable) return 1.0; // different components; also every pair of an edgeless graph
    return static_cast<double>(d) / static_cast<double>(diameter_);
}

double Ontology::semantic_distance(const std::string& a, const std::string& b) const
{
    return distance_by_index(require(a), require(b));
}

std::vector<std::string> validate_ontology(const Ontology& o)
{
    return validate_concepts(o.concepts());
}

namespace {

Concept concept_from_json(const nlohmann::json& j, std::size_t pos)
{
    std::string where = "concepts[" + std::to_string(pos) + "]";
    if (!j.is_object())
        throw parse_error(where + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.key() != "id" && it.key() != "label" && it.key() != "parents")
            throw parse_error(where + ": unknown key: " + it.key());
    }
    if (!j.contains("id") || !j["id"].is_string())
        throw parse_error(where + ": missing string \"id\"");

    Concept c;
    c.id = j["id"].get<std::string>();
    if (j.contains("label")) {
        if (!j["label"].is_string())
            throw parse_error(where + ": \"label\" must be a string");
        c.label = j["label"].get<std::string>();
    } else {
        c.label = c.id;
    }
    if (j.contains("parents")) {
        if (!j["parents"].is_array())
            throw parse_error(where + ": \"parents\" must be an array");
        for (const auto& p : j["parents"]) {
            if (!p.is_string())
                throw parse_error(where + ": parent ids must be strings");
            c.parents.push_back(p.get<std::string>());
        }
    }
    return c;
}

} // namespace

Ontology load_ontology(std::istream& in)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw parse_error(std::string("ontology: ") + e.what());
    }
    if (!doc.is_object())
        throw parse_error("ontology: top level must be an object");
    for (auto it = doc.begin(); it != doc.end(); ++it)
        if (it.key() != "concepts")
            throw parse_error("ontology: unknown key: " + it.key());
    if (!doc.contains("concepts") || !doc["concepts"].is_array())
        throw parse_error("ontology: missing \"concepts\" array");

    std::vector<Concept> concepts;
    concepts.reserve(doc["concepts"].size());
    for (std::size_t i = 0; i < doc["concepts"].size(); ++i)
        concepts.push_back(concept_from_json(doc["concepts"][i], i));
    return Ontology(std::move(concepts));
}

Ontology load_ontology(const std::string& text)
{
    std::istringstream in(text);
    return load_ontology(in);
}

Ontology load_ontology_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io_error("cannot open ontology file: " + path);
    return load_ontology(in);
}

} // namespace tracecbr
