#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "tracecbr/ontology.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace tracecbr;

namespace {

const char* kChain = R"({"concepts":[
  {"id":"course","label":"Course"},
  {"id":"exercise","label":"Exercise","parents":["course"]},
  {"id":"exercise.hard","label":"Hard exercise","parents":["exercise"]}
]})";

} // namespace

TEST_CASE("single concept, no edges")
{
    Ontology o = load_ontology(R"({"concepts":[{"id":"course","label":"Course"}]})");
    CHECK(o.size() == 1);
    CHECK(o.diameter() == 0);
    CHECK(o.semantic_distance("course", "course") == 0.0);
}

TEST_CASE("three-concept chain: diameter and distances")
{
    Ontology o = load_ontology(kChain);
    CHECK(o.size() == 3);
    CHECK(o.diameter() == 2);
    CHECK(o.semantic_distance("course", "exercise.hard") == 1.0);
    CHECK(o.semantic_distance("course", "exercise") == 0.5);
    CHECK(o.semantic_distance("exercise", "exercise") == 0.0);
    // symmetric
    CHECK(o.semantic_distance("exercise.hard", "course") == 1.0);
}

TEST_CASE("disconnected components are at distance 1")
{
    Ontology o = load_ontology(R"({"concepts":[
      {"id":"a"},{"id":"b","parents":["a"]},{"id":"x"},{"id":"y","parents":["x"]}]})");
    CHECK(o.semantic_distance("a", "x") == 1.0);
    CHECK(o.semantic_distance("b", "y") == 1.0);
    CHECK(o.semantic_distance("a", "b") == 1.0); // sp 1 / diameter 1
}

TEST_CASE("edgeless ontology uses the discrete metric")
{
    Ontology o = load_ontology(R"({"concepts":[{"id":"a"},{"id":"b"},{"id":"c"}]})");
    CHECK(o.diameter() == 0);
    CHECK(o.semantic_distance("a", "a") == 0.0);
    CHECK(o.semantic_distance("a", "b") == 1.0);
}

TEST_CASE("unknown concept is rejected by name")
{
    Ontology o = load_ontology(kChain);
    CHECK_THROWS_WITH_AS(o.semantic_distance("course", "ghost"),
                         "unknown concept: ghost", validation_error);
}

TEST_CASE("cycle fails validation")
{
    CHECK_THROWS_AS(load_ontology(R"({"concepts":[
      {"id":"A","parents":["B"]},{"id":"B","parents":["A"]}]})"),
                    validation_error);

    std::vector<Concept> self_loop = {{"A", "A", {"A"}}};
    auto violations = validate_concepts(self_loop);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0] == "parent cycle: A -> A");
}

TEST_CASE("violations are stable strings")
{
    SUBCASE("valid chain has none")
    {
        std::vector<Concept> chain = {
            {"course", "Course", {}},
            {"exercise", "Exercise", {"course"}},
            {"exercise.hard", "Hard", {"exercise"}},
        };
        CHECK(validate_concepts(chain).empty());
    }
    SUBCASE("dangling parent")
    {
        std::vector<Concept> cs = {{"a", "a", {"ghost"}}};
        auto violations = validate_concepts(cs);
        REQUIRE(violations.size() == 1);
        CHECK(violations[0] == "unknown parent: ghost");
    }
    SUBCASE("duplicate id")
    {
        std::vector<Concept> cs = {{"a", "first", {}}, {"a", "second", {}}};
        auto violations = validate_concepts(cs);
        REQUIRE(violations.size() == 1);
        CHECK(violations[0] == "duplicate concept id: a");
    }
    SUBCASE("empty id")
    {
        std::vector<Concept> cs = {{"", "nameless", {}}};
        auto violations = validate_concepts(cs);
        REQUIRE(violations.size() == 1);
        CHECK(violations[0] == "empty concept id");
    }
}

TEST_CASE("validate_ontology on a built ontology is empty")
{
    Ontology o = load_ontology(kChain);
    CHECK(validate_ontology(o).empty());
}

TEST_CASE("parse errors: malformed inputs")
{
    CHECK_THROWS_AS(load_ontology("{"), parse_error);
    CHECK_THROWS_AS(load_ontology(R"({"concepts":[{"id":"a","color":"red"}]})"),
                    parse_error); // unknown key
    CHECK_THROWS_AS(load_ontology(R"({"concepts":[{"label":"no id"}]})"), parse_error);
    CHECK_THROWS_AS(load_ontology(R"({"nodes":[]})"), parse_error);
    CHECK_THROWS_AS(load_ontology(R"([1,2,3])"), parse_error);
}

TEST_CASE("missing file raises io_error")
{
    CHECK_THROWS_AS(load_ontology_file("/nonexistent/ontology.json"), io_error);
}

TEST_CASE("label defaults to the id when omitted")
{
    Ontology o = load_ontology(R"({"concepts":[{"id":"a"}]})");
    CHECK(o.concepts()[0].label == "a");
}

TEST_CASE("loading is deterministic")
{
    Ontology a = load_ontology(kChain);
    Ontology b = load_ontology(kChain);
    CHECK(a.size() == b.size());
    CHECK(a.diameter() == b.diameter());
    for (const Concept& c : a.concepts())
        for (const Concept& d : a.concepts())
            CHECK(a.semantic_distance(c.id, d.id) == b.semantic_distance(c.id, d.id));
}

TEST_CASE("random ontologies: distance matches the BFS oracle and is a metric")
{
    std::mt19937 rng(20240915);
    for (int round = 0; round < 60; ++round) {
        std::vector<Concept> cs = gen::concepts(rng);
        Ontology o{cs};
        CHECK(o.diameter() == oracles::bfs_diameter(cs));
        for (const Concept& a : cs) {
            CHECK(o.semantic_distance(a.id, a.id) == 0.0);
            for (const Concept& b : cs) {
                const double ds = o.semantic_distance(a.id, b.id);
                CHECK(ds == oracles::semantic_distance(cs, a.id, b.id));
                CHECK(ds == o.semantic_distance(b.id, a.id));
                CHECK(ds >= 0.0);
                CHECK(ds <= 1.0);
                if (a.id != b.id) CHECK(ds > 0.0);
                for (const Concept& c : cs)
                    CHECK(o.semantic_distance(a.id, b.id) <=
                          o.semantic_distance(a.id, c.id) +
                              o.semantic_distance(c.id, b.id) + 1e-12);
            }
        }
    }
}
