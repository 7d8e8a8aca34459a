// tracecbr -- compare activity traces, rank stored scenarios, and stream
// follow-up decisions over event logs.
//
// Exit codes: 0 success, 1 I/O or parse failure, 2 validation failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tracecbr/engine.hpp"
#include "tracecbr/errors.hpp"
#include "tracecbr/ontology.hpp"
#include "tracecbr/similarity.hpp"
#include "tracecbr/store.hpp"
#include "tracecbr/trace.hpp"

namespace {

using namespace tracecbr;

struct CliConfig {
    std::string ontology_path;
    std::string scenarios_path;
    std::string measure = "ilcss";
    double alpha = 0.0;
    double beta = 0.0;
    double delta = 0.0;
    std::optional<std::size_t> epsilon;
    std::string projection; // qualification id for dtw/minkowski
    double p = 2.0;
    std::size_t k = 3;
    double theta_alert = 0.7;
    double theta_min = 0.3;
    std::vector<std::string> risk_labels;
    std::string format = "jsonl";
    bool follow = false;
};

SimilarityParams similarity_params(const CliConfig& cfg)
{
    SimilarityParams p;
    p.alpha = cfg.alpha;
    p.beta = cfg.beta;
    p.delta = cfg.delta;
    p.epsilon = cfg.epsilon;
    validate_params(p);
    return p;
}

DecisionPolicy decision_policy(const CliConfig& cfg)
{
    DecisionPolicy policy;
    policy.theta_alert = cfg.theta_alert;
    policy.theta_min = cfg.theta_min;
    if (!cfg.risk_labels.empty()) policy.risk_labels = cfg.risk_labels;
    validate_policy(policy);
    return policy;
}

Trace load_single_trace(const std::string& path, const Ontology& o)
{
    std::vector<Trace> traces = parse_log_file(path, o);
    if (traces.size() != 1)
        throw validation_error(path + ": expected exactly one subject, found " +
                               std::to_string(traces.size()));
    return std::move(traces.front());
}

void print_report(const MatchReport& report, const std::string& format)
{
    if (format == "table") {
        std::printf("measure     %s\n", measure_name(report.measure));
        std::printf("raw         %zu\n", report.raw_length);
        std::printf("normalized  %g\n", report.normalized);
        std::printf("pairs      ");
        for (const auto& [i, j] : report.alignment.pairs)
            std::printf(" (%zu,%zu)", i, j);
        std::printf("\n");
        return;
    }
    nlohmann::ordered_json j;
    j["measure"] = measure_name(report.measure);
    j["raw"] = report.raw_length;
    j["normalized"] = report.normalized;
    nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
    for (const auto& [a, b] : report.alignment.pairs)
        pairs.push_back(nlohmann::ordered_json::array({a, b}));
    j["alignment"] = std::move(pairs);
    std::cout << j.dump() << '\n';
}

void print_distance(const char* measure, double distance, const CliConfig& cfg)
{
    if (cfg.format == "table") {
        std::printf("measure     %s\n", measure);
        if (std::string(measure) == "minkowski") std::printf("p           %g\n", cfg.p);
        std::printf("distance    %.17g\n", distance);
        return;
    }
    nlohmann::ordered_json j;
    j["measure"] = measure;
    if (std::string(measure) == "minkowski") j["p"] = cfg.p;
    j["distance"] = distance;
    std::cout << j.dump() << '\n';
}

int cmd_compare(const CliConfig& cfg, const std::string& path_a, const std::string& path_b)
{
    // flag validation precedes any file I/O
    SimilarityParams params = similarity_params(cfg);
    if (cfg.measure == "minkowski" && (!std::isfinite(cfg.p) || cfg.p < 1.0))
        throw validation_error("--p must be >= 1");
    if ((cfg.measure == "dtw" || cfg.measure == "minkowski") && cfg.projection.empty())
        throw validation_error("--measure " + cfg.measure +
                               " requires --project <qualification id>");

    Ontology ontology = load_ontology_file(cfg.ontology_path);
    Trace a = load_single_trace(path_a, ontology);
    Trace b = load_single_trace(path_b, ontology);

    if (cfg.measure == "ilcss") {
        print_report(ilcss(a, b, params, ontology), cfg.format);
    } else if (cfg.measure == "lcss") {
        print_report(lcss_traces(a, b), cfg.format);
    } else if (cfg.measure == "dtw" || cfg.measure == "minkowski") {
        std::vector<double> u = qualification_values(a, cfg.projection);
        std::vector<double> v = qualification_values(b, cfg.projection);
        if (cfg.measure == "dtw")
            print_distance("dtw", dtw(u, v), cfg);
        else
            print_distance("minkowski", minkowski(u, v, cfg.p), cfg);
    }
    return 0;
}

void print_decision_table(const Decision& d, Timestamp t)
{
    std::printf("%s\t%s\t%s\t%s\t%g\t%s\t%s\n", format_timestamp(t).c_str(),
                d.subject.c_str(), decision_kind_name(d.kind), d.label.c_str(),
                d.confidence, d.scenario_id ? d.scenario_id->c_str() : "-",
                d.strategy ? d.strategy->c_str() : "-");
}

int cmd_watch(const CliConfig& cfg, const std::string& events_path)
{
    SimilarityParams params = similarity_params(cfg);
    DecisionPolicy policy = decision_policy(cfg);
    Ontology ontology = load_ontology_file(cfg.ontology_path);
    ScenarioStore store = open_store(cfg.scenarios_path, ontology);

    std::ifstream file;
    if (!cfg.follow) {
        file.open(events_path, std::ios::binary);
        if (!file)
            throw io_error("cannot open event file: " + events_path);
    }
    std::istream& in = cfg.follow ? std::cin : file;

    // One session per subject; events are processed strictly in input order
    // and a malformed line aborts the run.
    std::unordered_map<std::string, Session> sessions;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        TraceEvent e = parse_event_line(line, ontology, line_no);

        auto it = sessions.find(e.subject);
        if (it == sessions.end())
            it = sessions.emplace(e.subject, Session(store, ontology, params, policy))
                     .first;
        Session& session = it->second;

        session.elaborate(e);
        Ranking ranking = session.retrieve(cfg.k);
        Interpretation interpretation = interpret(ranking, cfg.k);
        Decision decision = decide(interpretation, policy, ranking, e.subject);

        if (cfg.format == "table")
            print_decision_table(decision, e.timestamp);
        else
            std::cout << decision_to_json(decision, e.timestamp) << '\n';
        std::cout.flush();
    }
    return 0;
}

int cmd_scenario_add(const CliConfig& cfg, const std::string& trace_path,
                     const std::string& label, const std::string& strategy)
{
    if (label.empty())
        throw validation_error("--label must be nonempty");

    Ontology ontology = load_ontology_file(cfg.ontology_path);
    ScenarioStore store = std::filesystem::exists(cfg.scenarios_path)
                              ? open_store(cfg.scenarios_path, ontology)
                              : ScenarioStore({}, cfg.scenarios_path);

    Scenario sc;
    sc.id = store.fresh_id();
    sc.trace = load_single_trace(trace_path, ontology);
    sc.label = label;
    sc.strategy = strategy;
    store.add(std::move(sc));
    std::cout << store.scenarios().back().id << '\n';
    return 0;
}

int cmd_scenario_list(const CliConfig& cfg)
{
    Ontology ontology = load_ontology_file(cfg.ontology_path);
    ScenarioStore store = open_store(cfg.scenarios_path, ontology);
    for (const ScenarioSummary& s : store.list()) {
        if (cfg.format == "table") {
            std::printf("%s\t%s\t%zu\n", s.id.c_str(), s.label.c_str(), s.length);
        } else {
            nlohmann::ordered_json j;
            j["id"] = s.id;
            j["label"] = s.label;
            j["length"] = s.length;
            std::cout << j.dump() << '\n';
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CliConfig cfg;
    CLI::App app{"trace-based scenario retrieval and follow-up decisions"};
    app.require_subcommand(1);

    long long epsilon_flag = -1;

    auto add_common = [&](CLI::App* cmd, bool needs_scenarios) {
        cmd->add_option("--ontology", cfg.ontology_path, "ontology JSON file")
            ->required();
        if (needs_scenarios)
            cmd->add_option("--scenarios", cfg.scenarios_path, "scenario JSONL file")
                ->required();
        cmd->add_option("--format", cfg.format, "output format")
            ->check(CLI::IsMember({"jsonl", "table"}));
    };
    auto add_similarity = [&](CLI::App* cmd) {
        cmd->add_option("--alpha", cfg.alpha, "object distance threshold");
        cmd->add_option("--beta", cfg.beta, "qualification distance threshold");
        cmd->add_option("--delta", cfg.delta, "value difference threshold");
        cmd->add_option("--epsilon", epsilon_flag,
                        "tail-indexed alignment window (unbounded when omitted)")
            ->check(CLI::NonNegativeNumber);
    };

    std::string path_a, path_b, events_path, trace_path, label, strategy;

    CLI::App* compare = app.add_subcommand("compare", "compare two trace files");
    add_common(compare, false);
    add_similarity(compare);
    compare->add_option("a", path_a, "first trace file")->required();
    compare->add_option("b", path_b, "second trace file")->required();
    compare->add_option("--measure", cfg.measure, "similarity measure")
        ->check(CLI::IsMember({"ilcss", "lcss", "dtw", "minkowski"}));
    compare->add_option("--project", cfg.projection,
                        "qualification id projected for dtw/minkowski");
    compare->add_option("--p", cfg.p, "minkowski order (>= 1)");

    CLI::App* watch =
        app.add_subcommand("watch", "stream decisions for an event log");
    add_common(watch, true);
    add_similarity(watch);
    watch->add_option("events", events_path, "event JSONL file");
    watch->add_flag("--follow", cfg.follow, "read events from standard input");
    watch->add_option("-k", cfg.k, "ranking depth and vote size");
    watch->add_option("--theta-alert", cfg.theta_alert, "alert threshold");
    watch->add_option("--theta-min", cfg.theta_min, "escalation threshold");
    watch->add_option("--risk", cfg.risk_labels,
                      "label treated as risk (repeatable; default: dropout)");

    CLI::App* scenario = app.add_subcommand("scenario", "manage the scenario base");
    scenario->require_subcommand(1);
    CLI::App* add = scenario->add_subcommand("add", "retain a trace as a scenario");
    add_common(add, true);
    add->add_option("--trace", trace_path, "event JSONL file with one subject")
        ->required();
    add->add_option("--label", label, "outcome label")->required();
    add->add_option("--strategy", strategy, "recommended strategy")->required();
    CLI::App* list = scenario->add_subcommand("list", "list stored scenarios");
    add_common(list, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2; // flag errors are validation failures
    }

    try {
        if (epsilon_flag >= 0) cfg.epsilon = static_cast<std::size_t>(epsilon_flag);
        if (cfg.k == 0) throw validation_error("-k must be a positive integer");

        if (compare->parsed()) return cmd_compare(cfg, path_a, path_b);
        if (watch->parsed()) {
            if (!cfg.follow && events_path.empty())
                throw validation_error("watch needs an event file or --follow");
            return cmd_watch(cfg, events_path);
        }
        if (add->parsed()) return cmd_scenario_add(cfg, trace_path, label, strategy);
        if (list->parsed()) return cmd_scenario_list(cfg);
    } catch (const io_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const parse_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const validation_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
