#include "omx/synthesis.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include "json.hpp"
#include "omx/pipeline.hpp"
#include "omx/turtle.hpp"

namespace omx::synthesis {

namespace fs = std::filesystem;
using gateway::ChatMessage;
using gateway::Role;
using nlohmann::json;

namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// LLM responses may arrive wrapped in markdown fences or trailed by EOS tokens.
std::string strip_llm_noise(std::string text) {
    static const std::vector<std::string> markers = {
        "<|endoftext|>", "<|eot_id|>", "<|im_end|>", "<|end|>", "</s>", "<eos>",
    };
    for (const auto& m : markers)
        for (auto pos = text.find(m); pos != std::string::npos; pos = text.find(m, pos))
            text.erase(pos, m.size());
    auto first = text.find("```");
    if (first != std::string::npos) {
        auto line_end = text.find('\n', first);
        auto close = line_end == std::string::npos ? std::string::npos
                                                   : text.find("```", line_end);
        if (close != std::string::npos)
            text = text.substr(line_end + 1, close - line_end - 1);
    }
    return text;
}

const std::vector<std::string>& topics() {
    static const std::vector<std::string> list = {
        "marine biology",      "medieval architecture", "public transport networks",
        "culinary recipes",    "astronomy instruments", "textile manufacturing",
        "alpine ecosystems",   "financial derivatives", "music theory",
        "archaeological digs",
    };
    return list;
}

void collect_typed_iris(const edoal::Expression& e,
                        std::vector<std::pair<Iri, edoal::ExprKind>>& out) {
    if (e.is_atomic()) {
        out.emplace_back(e.id, e.kind);
        return;
    }
    for (const auto& c : e.children) collect_typed_iris(c, out);
}

std::set<std::string> class_property_locals(const OntologyGraph& g) {
    std::set<std::string> out;
    for (const auto& [iri, info] : entity_index(g))
        if (info.kind != EntityKind::Unknown) out.insert(iri.local_name());
    return out;
}

}  // namespace

std::vector<ChatMessage> fill_prompt(const grammar::AlignmentTemplate& t) {
    std::string system =
        "You are an ontology engineer. The user gives an EDOAL alignment whose "
        "entity IRIs are MASK_1, MASK_2, ... placeholders. Replace every "
        "placeholder with a plausible absolute entity IRI so the correspondences "
        "stay semantically coherent. Use one namespace per side. Answer with the "
        "completed EDOAL XML only.";
    std::string user = edoal::serialize_alignment(t.skeleton);
    return {{Role::System, std::move(system)}, {Role::User, std::move(user)}};
}

std::vector<ChatMessage> ontology_prompt(const std::string& alignment_xml, int side) {
    std::string system =
        "You are an ontology engineer. Given an EDOAL alignment, write ontology " +
        std::to_string(side) +
        " of the pair in Turtle. Declare every entity the alignment mentions on "
        "side " +
        std::to_string(side) +
        ", with rdfs:label for each, and add a few extra entities that do not "
        "appear in the other ontology. Answer with Turtle only.";
    return {{Role::System, std::move(system)}, {Role::User, alignment_xml}};
}

std::vector<ChatMessage> empty_ontology_prompt(std::uint64_t seed, int side) {
    std::uint64_t h = splitmix(seed);
    std::size_t n = topics().size();
    std::size_t a = h % n;
    std::size_t b = (a + 1 + (h >> 8) % (n - 1)) % n;
    const std::string& topic = side == 1 ? topics()[a] : topics()[b];
    std::string system =
        "You are an ontology engineer. Write a small ontology in Turtle about " +
        topic +
        ". Use a dedicated namespace, declare 3 to 6 classes or properties with "
        "rdfs:label, and do not borrow entities from any other domain. Answer "
        "with Turtle only.";
    std::string user = "Generate the ontology (variant " + std::to_string(seed) + ").";
    return {{Role::System, std::move(system)}, {Role::User, std::move(user)}};
}

std::vector<ChatMessage> matching_messages(const OntologyGraph& onto1,
                                           const OntologyGraph& onto2) {
    OntologyModule m1{onto1, {}, ModuleOrigin::Source};
    OntologyModule m2{onto2, {}, ModuleOrigin::Target};
    return pipeline::build_prompt(m1, m2, PromptStyle::Base);
}

RecordPlan record_plan(std::uint64_t seed0, std::size_t index) {
    RecordPlan plan;
    plan.seed = seed0 + index;
    plan.cells = 1 + splitmix(plan.seed) % 5;
    plan.max_depth = 3;
    return plan;
}

FillResult fill_template(const grammar::AlignmentTemplate& t, gateway::Gateway& gw) {
    FillResult result;
    gateway::ChatRequest req;
    req.messages = fill_prompt(t);
    result.raw = gw.chat(req);

    auto repaired = edoal::repair(strip_llm_noise(result.raw));
    result.repair = repaired.report;
    if (!repaired.report.valid_after && repaired.report.fixes.empty())
        result.repair.valid_after = true;  // was already valid, repair is identity
    if (repaired.text.find("MASK_") != std::string::npos) return result;  // unfilled
    try {
        result.alignment = edoal::parse_alignment(repaired.text);
    } catch (const edoal::AlignmentError&) {
    }
    return result;
}

namespace {

std::optional<OntologyGraph> parse_turtle_response(const std::string& raw) {
    try {
        return parse_turtle(strip_llm_noise(raw));
    } catch (const TurtleError&) {
        return std::nullopt;
    }
}

Iri type_for(edoal::ExprKind kind) {
    switch (kind) {
        case edoal::ExprKind::PropertyId: return vocab::owl_datatype_property;
        case edoal::ExprKind::RelationId: return vocab::owl_object_property;
        case edoal::ExprKind::InstanceId: return vocab::owl_named_individual;
        default: return vocab::owl_class;
    }
}

std::size_t inject_missing(OntologyGraph& g,
                           const std::vector<std::pair<Iri, edoal::ExprKind>>& needed) {
    std::size_t injected = 0;
    for (const auto& [iri, kind] : needed) {
        if (g.mentions(iri)) continue;
        g.add(Triple{Subject{iri}, vocab::rdf_type, RdfTerm{type_for(kind)}});
        ++injected;
    }
    return injected;
}

}  // namespace

PairResult generate_ontology_pair(const edoal::Alignment& a, gateway::Gateway& gw) {
    PairResult result;
    std::string xml = edoal::serialize_alignment(a);

    // Fig-2 order: the two ontologies are generated sequentially.
    for (int side = 1; side <= 2; ++side) {
        gateway::ChatRequest req;
        req.messages = ontology_prompt(xml, side);
        auto graph = parse_turtle_response(gw.chat(req));
        if (!graph) return result;

        std::vector<std::pair<Iri, edoal::ExprKind>> needed;
        for (const auto& c : a.cells)
            collect_typed_iris(side == 1 ? c.entity1 : c.entity2, needed);
        result.injected += inject_missing(*graph, needed);
        (side == 1 ? result.onto1 : result.onto2) = std::move(graph);
    }
    return result;
}

SynthRecord generate_positive(std::uint64_t seed0, std::size_t index,
                              gateway::Gateway& gw) {
    SynthRecord record;
    record.kind = SynthRecord::Kind::Positive;

    auto plan = record_plan(seed0, index);
    auto t = grammar::derive_template(plan.seed, plan.max_depth, plan.cells);
    auto filled = fill_template(t, gw);
    if (!filled.alignment) {
        record.target = filled.raw;
        return record;
    }
    auto pair = generate_ontology_pair(*filled.alignment, gw);
    if (!pair.onto1 || !pair.onto2) {
        record.target = edoal::serialize_alignment(*filled.alignment);
        return record;
    }
    record.messages = matching_messages(*pair.onto1, *pair.onto2);
    record.target = edoal::serialize_alignment(*filled.alignment);
    record.valid = true;
    return record;
}

SynthRecord generate_empty_pair(std::uint64_t seed, gateway::Gateway& gw) {
    SynthRecord record;
    record.kind = SynthRecord::Kind::Empty;

    std::optional<OntologyGraph> graphs[2];
    for (int side = 1; side <= 2; ++side) {
        gateway::ChatRequest req;
        req.messages = empty_ontology_prompt(seed, side);
        graphs[side - 1] = parse_turtle_response(gw.chat(req));
        if (!graphs[side - 1]) return record;
    }

    auto locals1 = class_property_locals(*graphs[0]);
    auto locals2 = class_property_locals(*graphs[1]);
    for (const auto& l : locals1)
        if (locals2.count(l)) record.warning = true;

    edoal::Alignment empty;
    record.messages = matching_messages(*graphs[0], *graphs[1]);
    record.target = edoal::serialize_alignment(empty);
    record.valid = true;
    return record;
}

std::pair<std::size_t, std::size_t> default_split(std::size_t total) {
    auto positives = static_cast<std::size_t>(
        static_cast<double>(total) * 4650.0 / 6650.0 + 0.5);
    return {positives, total - positives};
}

CorpusManifest build_corpus(std::size_t n_pos, std::size_t n_neg, std::uint64_t seed0,
                            gateway::Gateway& gw, const std::string& out_dir) {
    fs::create_directories(out_dir);
    fs::create_directories(fs::path(out_dir) / "rejects");
    std::ofstream corpus(fs::path(out_dir) / "corpus.jsonl");
    if (!corpus.good())
        throw std::runtime_error("cannot write corpus under " + out_dir);

    CorpusManifest manifest;
    manifest.seed_range = {seed0, seed0 + n_pos + n_neg};
    std::size_t emitted = 0;

    auto handle = [&](SynthRecord record, std::size_t index) {
        if (!record.valid) {
            char name[16];
            std::snprintf(name, sizeof(name), "%03zu.xml", index);
            std::ofstream reject(fs::path(out_dir) / "rejects" / name);
            reject << record.target;
            return;
        }
        json line;
        line["messages"] = json::array();
        for (const auto& m : record.messages)
            line["messages"].push_back(
                {{"role", role_name(m.role)}, {"content", m.content}});
        line["messages"].push_back({{"role", "assistant"}, {"content", record.target}});
        corpus << line.dump() << "\n";
        ++emitted;
    };

    for (std::size_t i = 0; i < n_pos; ++i) {
        auto record = generate_positive(seed0, i, gw);
        if (record.valid) ++manifest.positives;
        handle(std::move(record), i);
    }
    for (std::size_t j = 0; j < n_neg; ++j) {
        auto record = generate_empty_pair(seed0 + n_pos + j, gw);
        if (record.valid) ++manifest.empties;
        handle(std::move(record), n_pos + j);
    }

    manifest.total = manifest.positives + manifest.empties;
    std::size_t attempted = n_pos + n_neg;
    manifest.valid_rate =
        attempted == 0 ? 1.0 : static_cast<double>(emitted) / attempted;

    json m;
    m["total"] = manifest.total;
    m["positives"] = manifest.positives;
    m["empties"] = manifest.empties;
    m["valid_rate"] = manifest.valid_rate;
    m["seed_range"] = {manifest.seed_range.first, manifest.seed_range.second};
    std::ofstream mf(fs::path(out_dir) / "manifest.json");
    mf << m.dump(2) << "\n";
    return manifest;
}

}  // namespace omx::synthesis
