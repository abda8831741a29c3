// omx: ontology matching toolkit CLI.
// Subcommands: match, gen-data, repair, eval, modules.
// Exit codes: 0 success, 1 input error, 2 empty result, 3 unrepairable.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "omx/config.hpp"
#include "omx/edoal.hpp"
#include "omx/evaluation.hpp"
#include "omx/pipeline.hpp"
#include "omx/rdfxml.hpp"
#include "omx/synthesis.hpp"
#include "omx/turtle.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kEmptyResult = 2;
constexpr int kUnrepairable = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.good()) throw std::runtime_error("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out.good()) throw std::runtime_error("cannot write file: " + path.string());
    out << content;
}

omx::OntologyGraph load_ontology(const std::string& path) {
    std::string text = read_file(path);
    auto ext = fs::path(path).extension().string();
    if (ext == ".rdf" || ext == ".owl" || ext == ".xml") return omx::parse_rdfxml(text);
    if (ext == ".ttl" || ext == ".n3") return omx::parse_turtle(text);
    try {
        return omx::parse_turtle(text);
    } catch (const omx::TurtleError&) {
        return omx::parse_rdfxml(text);
    }
}

// Shared flags that override values loaded from --config.
struct CommonOpts {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::string prompt_style;
    std::string backend;
    std::string fixtures;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "key = value config file");
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--seed", opts.seed, "random seed");
    cmd->add_option("--prompt-style", opts.prompt_style, "base or patterns")
        ->check(CLI::IsMember({"base", "patterns"}));
    cmd->add_option("--backend", opts.backend, "http or mock")
        ->check(CLI::IsMember({"http", "mock"}));
    cmd->add_option("--fixtures", opts.fixtures, "mock fixture JSON file");
}

omx::RunConfig resolve_config(const CommonOpts& opts) {
    omx::RunConfig cfg;
    if (!opts.config_path.empty()) cfg = omx::load_config_file(opts.config_path);
    else omx::apply_env_overrides(cfg);
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.prompt_style == "base") cfg.prompt_style = omx::PromptStyle::Base;
    else if (opts.prompt_style == "patterns")
        cfg.prompt_style = omx::PromptStyle::Patterns;
    if (opts.backend == "http") cfg.gateway.backend = omx::gateway::BackendKind::Http;
    else if (opts.backend == "mock")
        cfg.gateway.backend = omx::gateway::BackendKind::Mock;
    if (!opts.fixtures.empty()) cfg.gateway.fixture_path = opts.fixtures;
    cfg.check();
    return cfg;
}

fs::path fresh_run_dir(const fs::path& base) {
    auto now = std::chrono::system_clock::now().time_since_epoch();
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
    for (int attempt = 0;; ++attempt) {
        fs::path dir = base / "runs" / (std::to_string(ms) + "-" + std::to_string(attempt));
        if (!fs::exists(dir)) {
            fs::create_directories(dir);
            return dir;
        }
    }
}

int cmd_match(const std::string& source_path, const std::string& target_path,
              const CommonOpts& opts) {
    omx::OntologyGraph source, target;
    omx::RunConfig cfg;
    try {
        cfg = resolve_config(opts);
        source = load_ontology(source_path);
        target = load_ontology(target_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }

    omx::gateway::Gateway gw(cfg.gateway);
    omx::pipeline::PlanResult plan;
    try {
        plan = omx::pipeline::plan_tasks(source, target, cfg, gw);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
    for (const auto& w : plan.warnings) std::cerr << "warning: " << w << "\n";

    auto results = omx::pipeline::run_tasks(plan.tasks, gw);

    fs::create_directories(opts.out_dir);
    auto run_dir = fresh_run_dir(opts.out_dir);
    for (std::size_t i = 0; i < results.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "task_%03zu.txt", i);
        std::string transcript;
        for (const auto& m : plan.tasks[i].prompt)
            transcript += "== " + omx::gateway::role_name(m.role) + " ==\n" +
                          m.content + "\n";
        transcript += "== response ==\n" + results[i].response + "\n";
        write_file(run_dir / name, transcript);
    }

    auto onto_iri = [](const std::string& path) {
        return omx::Iri{"file://" + fs::absolute(path).string()};
    };
    auto [merged, report] =
        omx::pipeline::finalize(results, onto_iri(source_path), onto_iri(target_path));

    write_file(fs::path(opts.out_dir) / "final.edoal",
               omx::edoal::serialize_alignment(merged));
    json j;
    j["tasks"] = report.tasks;
    j["repaired"] = report.repaired;
    j["invalid"] = report.invalid;
    j["final_cells"] = report.final_cells;
    j["duplicates_removed"] = report.duplicates_removed;
    j["warnings"] = plan.warnings;
    write_file(fs::path(opts.out_dir) / "report.json", j.dump(2) + "\n");

    std::size_t valid = 0;
    for (const auto& r : results)
        if (r.alignment) ++valid;
    std::cout << "tasks: " << report.tasks << ", valid partials: " << valid
              << ", final cells: " << report.final_cells << "\n";
    return valid == 0 ? kEmptyResult : kOk;
}

int cmd_gen_data(std::size_t total, std::optional<std::size_t> n_pos,
                 std::optional<std::size_t> n_neg, const CommonOpts& opts) {
    omx::RunConfig cfg;
    try {
        cfg = resolve_config(opts);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
    auto [pos, neg] = omx::synthesis::default_split(total);
    if (n_pos) pos = *n_pos;
    if (n_neg) neg = *n_neg;

    omx::gateway::Gateway gw(cfg.gateway);
    try {
        auto manifest = omx::synthesis::build_corpus(pos, neg, cfg.seed, gw, opts.out_dir);
        std::cout << "emitted " << manifest.total << " records (" << manifest.positives
                  << " positive, " << manifest.empties << " empty), valid rate "
                  << manifest.valid_rate << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
    return kOk;
}

int cmd_repair(const std::string& in_path, const std::string& out_path) {
    std::string text;
    try {
        text = read_file(in_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
    auto result = omx::edoal::repair(text);
    if (result.report.fixes.empty())
        std::cout << "no fixes applied\n";
    for (const auto& f : result.report.fixes)
        std::cout << "fix: " << omx::edoal::fix_kind_name(f.kind) << " (" << f.detail
                  << ")\n";
    std::cout << (result.report.valid_after ? "valid\n" : "still invalid\n");
    try {
        write_file(out_path, result.text);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
    return result.report.valid_after ? kOk : kUnrepairable;
}

int cmd_eval(const std::string& manifest_path, const std::string& out_path) {
    std::map<std::string, omx::evaluation::EvalReport> reports;
    try {
        std::istringstream in(read_file(manifest_path));
        std::string name, sys_path, ref_path;
        while (in >> name >> sys_path >> ref_path) {
            omx::edoal::Alignment sys, ref;
            try {
                sys = omx::edoal::parse_alignment(read_file(sys_path));
            } catch (const std::exception& e) {
                std::cerr << "error in " << sys_path << ": " << e.what() << "\n";
                return kInputError;
            }
            try {
                ref = omx::edoal::parse_alignment(read_file(ref_path));
            } catch (const std::exception& e) {
                std::cerr << "error in " << ref_path << ": " << e.what() << "\n";
                return kInputError;
            }
            reports[name] = omx::evaluation::score(sys, ref);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }

    auto table = omx::evaluation::report_table(reports);
    std::cout << table;
    try {
        write_file(out_path, table);
        write_file(fs::path(out_path).replace_extension(".json"),
                   omx::evaluation::report_json(reports));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
    return kOk;
}

int cmd_modules(const std::string& ontology_path, const CommonOpts& opts) {
    omx::OntologyGraph graph;
    omx::RunConfig cfg;
    try {
        cfg = resolve_config(opts);
        graph = load_ontology(ontology_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }

    try {
        auto digraph = omx::build_entity_digraph(graph);
        auto scores = omx::pagerank(digraph, 0.85, 1e-10, 200);
        auto anchors = omx::top_k_anchors(scores, static_cast<std::size_t>(cfg.anchors_k),
                                          omx::entity_index(graph));
        fs::create_directories(opts.out_dir);
        for (std::size_t i = 0; i < anchors.size(); ++i) {
            auto module = omx::extract_module(
                graph, {anchors[i]}, static_cast<std::size_t>(cfg.hops),
                static_cast<std::size_t>(cfg.superclass_depth));
            char name[32];
            std::snprintf(name, sizeof(name), "module_%03zu.ttl", i);
            write_file(fs::path(opts.out_dir) / name,
                       omx::serialize_turtle(module.graph));
        }
        std::cout << anchors.size() << " modules written to " << opts.out_dir << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ontology matching toolkit"};
    app.require_subcommand(1);

    CommonOpts match_opts, gen_opts, modules_opts;
    std::string source_path, target_path, in_path, out_path, manifest_path,
        ontology_path;
    std::size_t total = 6650;
    std::optional<std::size_t> n_pos, n_neg;

    auto* match = app.add_subcommand("match", "match two ontologies");
    match->add_option("source", source_path, "source ontology")->required();
    match->add_option("target", target_path, "target ontology")->required();
    add_common(match, match_opts);

    auto* gen = app.add_subcommand("gen-data", "build a synthetic training corpus");
    gen->add_option("--total", total, "record count before split");
    gen->add_option("--n-pos", n_pos, "positive record count (overrides split)");
    gen->add_option("--n-neg", n_neg, "empty record count (overrides split)");
    add_common(gen, gen_opts);

    auto* repair = app.add_subcommand("repair", "repair an EDOAL document");
    repair->add_option("input", in_path, "alignment XML to repair")->required();
    repair->add_option("output", out_path, "repaired output path")->required();

    auto* eval = app.add_subcommand("eval", "score system alignments against references");
    eval->add_option("manifest", manifest_path,
                     "lines: dataset system_path reference_path")
        ->required();
    eval->add_option("output", out_path, "table output path")->required();

    auto* modules = app.add_subcommand("modules", "extract anchor modules");
    modules->add_option("ontology", ontology_path, "ontology file")->required();
    add_common(modules, modules_opts);

    CLI11_PARSE(app, argc, argv);

    if (match->parsed()) return cmd_match(source_path, target_path, match_opts);
    if (gen->parsed()) return cmd_gen_data(total, n_pos, n_neg, gen_opts);
    if (repair->parsed()) return cmd_repair(in_path, out_path);
    if (eval->parsed()) return cmd_eval(manifest_path, out_path);
    if (modules->parsed()) return cmd_modules(ontology_path, modules_opts);
    return kInputError;
}
