#ifndef TRACECBR_ONTOLOGY_HPP
#define TRACECBR_ONTOLOGY_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "tracecbr/errors.hpp"

namespace tracecbr {

/// One node of the concept graph. Parent ids are is-a edges.
struct Concept {
    std::string id;
    std::string label;
    std::vector<std::string> parents;
};

/// Returns human-readable descriptions of every invariant violation in a
/// concept list: empty/duplicate ids, unknown parents, parent cycles.
/// Empty result means the list builds a valid ontology.
std::vector<std::string> validate_concepts(const std::vector<Concept>& concepts);

/// Immutable concept DAG with precomputed pairwise distances.
///
/// Construction validates the concept list and throws validation_error when
/// it is not a DAG with resolvable unique ids. After that the object never
/// mutates, so any number of threads may read it concurrently.
class Ontology {
public:
    explicit Ontology(std::vector<Concept> concepts);

    const std::vector<Concept>& concepts() const { return concepts_; }
    std::size_t size() const { return concepts_.size(); }

    /// Longest finite shortest-path length (in edges) between two concepts
    /// of the same connected component; 0 for an edgeless graph.
    std::size_t diameter() const { return diameter_; }

    bool contains(const std::string& id) const;
    std::optional<std::uint32_t> index_of(const std::string& id) const;

    /// Index lookup that throws validation_error naming the id.
    std::uint32_t require(const std::string& id) const;

    /// Normalized semantic distance in [0,1]: undirected shortest-path edge
    /// count divided by the diameter. 1.0 for concepts in different
    /// components; the discrete 0/1 metric when the graph has no edges.
    double semantic_distance(const std::string& a, const std::string& b) const;

    /// Same distance, addressed by index. This is the engine's hot path.
    double distance_by_index(std::uint32_t a, std::uint32_t b) const;

private:
    std::vector<Concept> concepts_;
    std::unordered_map<std::string, std::uint32_t> index_;
    std::vector<std::uint16_t> dist_; // row-major size^2, kUnreachable across components
    std::size_t diameter_ = 0;
};

/// Parses the ontology JSON document ({"concepts":[...]}) and builds a
/// validated Ontology. Unknown keys are rejected.
Ontology load_ontology(std::istream& in);
Ontology load_ontology(const std::string& text);

/// Opens and parses an ontology file; throws io_error when unreadable.
Ontology load_ontology_file(const std::string& path);

/// Re-runs the content validation on a built ontology. Always empty for an
/// Ontology constructed through the public API; exists so callers can treat
/// violations as data.
std::vector<std::string> validate_ontology(const Ontology& o);

} // namespace tracecbr

#endif
