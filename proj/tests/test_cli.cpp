#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"
#include "omx/config.hpp"
#include "omx/pipeline.hpp"
#include "omx/synthesis.hpp"
#include "omx/turtle.hpp"

namespace fs = std::filesystem;
using namespace omx;

namespace {

const std::string cli = OMX_CLI_PATH;
const fs::path fixture_dir = OMX_FIXTURE_DIR;

int run(const std::string& cmd) {
    int rc = std::system((cmd + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
}

fs::path fresh_dir(const std::string& name) {
    auto dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

OntologyGraph load_ttl(const fs::path& p) { return parse_turtle(slurp(p)); }

// Reproduce the CLI's default mock planning to key chat fixtures.
std::map<std::string, std::string> match_fixtures(const std::string& response) {
    RunConfig cfg;
    gateway::Gateway gw(cfg.gateway,
                        std::make_shared<gateway::MockBackend>(
                            std::map<std::string, std::string>{}));
    auto plan = pipeline::plan_tasks(load_ttl(fixture_dir / "toy_source.ttl"),
                                     load_ttl(fixture_dir / "toy_target.ttl"), cfg, gw);
    std::map<std::string, std::string> fixtures;
    for (const auto& t : plan.tasks)
        fixtures[gateway::prompt_hash_hex(t.prompt)] = response;
    return fixtures;
}

std::string one_cell_response() {
    edoal::Alignment a;
    edoal::Correspondence c;
    c.entity1.kind = edoal::ExprKind::ClassId;
    c.entity1.id = Iri{"http://src.example/Paper"};
    c.entity2.kind = edoal::ExprKind::ClassId;
    c.entity2.id = Iri{"http://tgt.example/Article"};
    a.cells.push_back(c);
    return edoal::serialize_alignment(a);
}

void write_fixture_file(const fs::path& path,
                        const std::map<std::string, std::string>& fixtures) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : fixtures) j[k] = v;
    spit(path, j.dump());
}

}  // namespace

TEST_CASE("match produces a validating final alignment") {
    auto dir = fresh_dir("omx_cli_match");
    write_fixture_file(dir / "fixtures.json", match_fixtures(one_cell_response()));

    int rc = run(cli + " match " + (fixture_dir / "toy_source.ttl").string() + " " +
                 (fixture_dir / "toy_target.ttl").string() +
                 " --backend mock --fixtures " + (dir / "fixtures.json").string() +
                 " --out " + (dir / "out").string());
    CHECK(rc == 0);

    auto final_text = slurp(dir / "out" / "final.edoal");
    CHECK(edoal::validate(final_text).empty());
    CHECK(edoal::parse_alignment(final_text).cells.size() == 1);

    auto report = nlohmann::json::parse(slurp(dir / "out" / "report.json"));
    CHECK(report.at("final_cells").get<int>() == 1);
    CHECK(fs::exists(dir / "out" / "runs"));
}

TEST_CASE("match with a missing source exits 1") {
    auto dir = fresh_dir("omx_cli_missing");
    int rc = run(cli + " match /nonexistent.ttl " +
                 (fixture_dir / "toy_target.ttl").string() + " --backend mock --out " +
                 (dir / "out").string());
    CHECK(rc == 1);
}

TEST_CASE("match with empty mock responses exits 2 and writes an empty alignment") {
    auto dir = fresh_dir("omx_cli_empty");
    write_fixture_file(dir / "fixtures.json", match_fixtures(""));
    int rc = run(cli + " match " + (fixture_dir / "toy_source.ttl").string() + " " +
                 (fixture_dir / "toy_target.ttl").string() +
                 " --backend mock --fixtures " + (dir / "fixtures.json").string() +
                 " --out " + (dir / "out").string());
    CHECK(rc == 2);
    auto final_text = slurp(dir / "out" / "final.edoal");
    CHECK(edoal::parse_alignment(final_text).cells.empty());
}

TEST_CASE("repair subcommand exit codes") {
    auto dir = fresh_dir("omx_cli_repair");
    auto valid = one_cell_response();

    SUBCASE("valid input passes through") {
        spit(dir / "in.xml", valid);
        int rc = run(cli + " repair " + (dir / "in.xml").string() + " " +
                     (dir / "out.xml").string());
        CHECK(rc == 0);
        CHECK(slurp(dir / "out.xml") == valid);
    }
    SUBCASE("missing prefix gets fixed") {
        auto broken = valid;
        std::string decl = " xmlns:edoal=\"http://ns.inria.org/edoal/1.0/\"";
        auto pos = broken.find(decl);
        REQUIRE(pos != std::string::npos);
        broken.erase(pos, decl.size());
        spit(dir / "in.xml", broken);
        int rc = run(cli + " repair " + (dir / "in.xml").string() + " " +
                     (dir / "out.xml").string());
        CHECK(rc == 0);
        CHECK_NOTHROW(edoal::parse_alignment(slurp(dir / "out.xml")));
    }
    SUBCASE("hopeless garbage exits 3") {
        spit(dir / "in.xml", "not xml at all {{{");
        int rc = run(cli + " repair " + (dir / "in.xml").string() + " " +
                     (dir / "out.xml").string());
        CHECK(rc == 3);
    }
    SUBCASE("unreadable input exits 1") {
        int rc = run(cli + " repair /nonexistent.xml " + (dir / "out.xml").string());
        CHECK(rc == 1);
    }
}

TEST_CASE("eval subcommand scores self-vs-self at 1.00") {
    auto dir = fresh_dir("omx_cli_eval");
    spit(dir / "ref.edoal", one_cell_response());
    spit(dir / "manifest.txt",
         "toy " + (dir / "ref.edoal").string() + " " + (dir / "ref.edoal").string() + "\n");
    int rc = run(cli + " eval " + (dir / "manifest.txt").string() + " " +
                 (dir / "table.txt").string());
    CHECK(rc == 0);

    auto table = slurp(dir / "table.txt");
    for (const char* col : {"s-p", "s-r", "s-f", "c-p", "c-r", "c-f"})
        CHECK(table.find(col) != std::string::npos);
    CHECK(table.find("1.00") != std::string::npos);

    auto j = nlohmann::json::parse(slurp(dir / "table.json"));
    CHECK(j.at("toy").at("simple").at("f1").get<double>() == doctest::Approx(1.0));
}

TEST_CASE("eval with an unreadable alignment exits 1") {
    auto dir = fresh_dir("omx_cli_eval_bad");
    spit(dir / "manifest.txt", "toy /nonexistent.edoal /nonexistent.edoal\n");
    int rc = run(cli + " eval " + (dir / "manifest.txt").string() + " " +
                 (dir / "table.txt").string());
    CHECK(rc == 1);
}

TEST_CASE("gen-data emits a reproducible corpus") {
    auto dir = fresh_dir("omx_cli_gen");
    const std::uint64_t seed0 = 500;

    // fixtures replayed through the public prompt builders
    std::map<std::string, std::string> fixtures;
    for (std::size_t i = 0; i < 3; ++i) {
        auto plan = synthesis::record_plan(seed0, i);
        auto t = grammar::derive_template(plan.seed, plan.max_depth, plan.cells);
        std::vector<Iri> iris;
        for (std::size_t s = 1; s <= t.slot_count; ++s)
            iris.emplace_back("http://one.example/g" + std::to_string(i) + "e" +
                              std::to_string(s));
        auto filled = grammar::substitute(t, iris);
        auto xml = edoal::serialize_alignment(filled);
        fixtures[gateway::prompt_hash_hex(synthesis::fill_prompt(t))] = xml;
        for (int side = 1; side <= 2; ++side) {
            OntologyGraph g;
            for (const auto& c : filled.cells)
                for (const auto& iri :
                     edoal::atomic_iris(side == 1 ? c.entity1 : c.entity2))
                    g.add(Triple{Subject{iri}, vocab::rdf_type, RdfTerm{vocab::owl_class}});
            fixtures[gateway::prompt_hash_hex(synthesis::ontology_prompt(xml, side))] =
                serialize_turtle(g);
        }
    }
    for (std::size_t j = 0; j < 2; ++j) {
        auto seed = seed0 + 3 + j;
        for (int side = 1; side <= 2; ++side) {
            OntologyGraph g;
            std::string ns = side == 1 ? "http://alpha.example/" : "http://beta.example/";
            g.add(Triple{Subject{Iri{ns + "T" + std::to_string(side)}}, vocab::rdf_type,
                         RdfTerm{vocab::owl_class}});
            fixtures[gateway::prompt_hash_hex(
                synthesis::empty_ontology_prompt(seed, side))] = serialize_turtle(g);
        }
    }
    write_fixture_file(dir / "fixtures.json", fixtures);

    auto cmd = cli + " gen-data --n-pos 3 --n-neg 2 --seed 500 --backend mock" +
               " --fixtures " + (dir / "fixtures.json").string();
    CHECK(run(cmd + " --out " + (dir / "c1").string()) == 0);
    CHECK(run(cmd + " --out " + (dir / "c2").string()) == 0);

    auto corpus = slurp(dir / "c1" / "corpus.jsonl");
    CHECK(std::count(corpus.begin(), corpus.end(), '\n') == 5);
    CHECK(corpus == slurp(dir / "c2" / "corpus.jsonl"));

    auto manifest = nlohmann::json::parse(slurp(dir / "c1" / "manifest.json"));
    CHECK(manifest.at("total").get<int>() ==
          manifest.at("positives").get<int>() + manifest.at("empties").get<int>());
    CHECK(manifest.at("positives").get<int>() == 3);
    CHECK(manifest.at("empties").get<int>() == 2);
}

TEST_CASE("modules subcommand writes re-parseable module files") {
    auto dir1 = fresh_dir("omx_cli_modules1");
    auto dir2 = fresh_dir("omx_cli_modules2");
    auto cmd = cli + " modules " + (fixture_dir / "toy_source.ttl").string() +
               " --backend mock";
    CHECK(run(cmd + " --out " + dir1.string()) == 0);
    CHECK(run(cmd + " --out " + dir2.string()) == 0);

    std::size_t count = 0;
    for (const auto& entry : fs::directory_iterator(dir1)) {
        ++count;
        auto g = parse_turtle(slurp(entry.path()));
        CHECK_FALSE(g.empty());
    }
    CHECK(count >= 2);

    std::size_t count2 = std::distance(fs::directory_iterator(dir2),
                                       fs::directory_iterator{});
    CHECK(count == count2);
}

TEST_CASE("modules with an unparseable ontology exits 1") {
    auto dir = fresh_dir("omx_cli_modules_bad");
    spit(dir / "bad.ttl", "@prefix broken");
    int rc = run(cli + " modules " + (dir / "bad.ttl").string() + " --out " +
                 (dir / "out").string());
    CHECK(rc == 1);
}
