#include "intrinsic/annotations.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "intrinsic/error.hpp"

namespace intrinsic {

using nlohmann::json;

Relation flip(Relation r) {
    switch (r) {
        case Relation::Less: return Relation::Greater;
        case Relation::Greater: return Relation::Less;
        default: return Relation::Equal;
    }
}

const char* to_string(Relation r) {
    switch (r) {
        case Relation::Equal: return "E";
        case Relation::Less: return "1";
        case Relation::Greater: return "2";
    }
    return "?";
}

const char* to_string(Provenance p) {
    switch (p) {
        case Provenance::Original: return "original";
        case Provenance::Symmetry: return "symmetry";
        case Provenance::Transitive: return "transitive";
    }
    return "?";
}

namespace {

uint64_t pair_key(int i, int j) {
    return (static_cast<uint64_t>(static_cast<uint32_t>(i)) << 32) | static_cast<uint32_t>(j);
}

Provenance provenance_from_string(const std::string& s) {
    if (s == "original") return Provenance::Original;
    if (s == "symmetry") return Provenance::Symmetry;
    if (s == "transitive") return Provenance::Transitive;
    throw ValidationError("unknown provenance \"" + s + "\"");
}

}  // namespace

ComparisonGraph load_annotations(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open annotations: " + path);

    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw IoError("malformed JSON in " + path + ": " + e.what());
    }

    ComparisonGraph g;
    try {
        g.image_id = doc.at("image").get<std::string>();
        std::unordered_set<int> ids;
        for (const auto& p : doc.at("points")) {
            Point pt;
            pt.id = p.at("id").get<int>();
            pt.x = p.at("x").get<double>();
            pt.y = p.at("y").get<double>();
            if (pt.x < 0.0 || pt.x > 1.0 || pt.y < 0.0 || pt.y > 1.0)
                throw ValidationError("point " + std::to_string(pt.id) +
                                      " has coordinates outside [0,1] in " + path);
            if (!ids.insert(pt.id).second)
                throw ValidationError("duplicate point id " + std::to_string(pt.id) + " in " + path);
            g.points.push_back(pt);
        }
        std::unordered_set<uint64_t> seen;
        for (const auto& c : doc.at("comparisons")) {
            Judgment jd;
            jd.i = c.at("point1").get<int>();
            jd.j = c.at("point2").get<int>();
            const std::string darker = c.at("darker").get<std::string>();
            if (darker == "1") jd.relation = Relation::Less;
            else if (darker == "2") jd.relation = Relation::Greater;
            else if (darker == "E") jd.relation = Relation::Equal;
            else throw ValidationError("bad darker value \"" + darker + "\" in " + path);
            jd.confidence = c.at("weight").get<double>();
            if (jd.confidence < 0.0 || jd.confidence > 1.0)
                throw ValidationError("confidence outside [0,1] in " + path);
            if (c.contains("provenance"))
                jd.provenance = provenance_from_string(c.at("provenance").get<std::string>());
            if (jd.i == jd.j)
                throw ValidationError("self comparison on point " + std::to_string(jd.i) + " in " + path);
            if (!ids.count(jd.i) || !ids.count(jd.j))
                throw ValidationError("comparison references unknown point (" + std::to_string(jd.i) +
                                      ", " + std::to_string(jd.j) + ") in " + path);
            if (!seen.insert(pair_key(jd.i, jd.j)).second)
                throw ValidationError("duplicate ordered pair (" + std::to_string(jd.i) + ", " +
                                      std::to_string(jd.j) + ") in " + path);
            g.judgments.push_back(jd);
        }
    } catch (const json::exception& e) {
        throw IoError("bad annotation schema in " + path + ": " + e.what());
    }
    return g;
}

void save_annotations(const ComparisonGraph& g, const std::string& path) {
    json doc;
    doc["image"] = g.image_id;
    doc["points"] = json::array();
    for (const auto& p : g.points)
        doc["points"].push_back({{"id", p.id}, {"x", p.x}, {"y", p.y}});
    doc["comparisons"] = json::array();
    for (const auto& jd : g.judgments)
        doc["comparisons"].push_back({{"point1", jd.i},
                                      {"point2", jd.j},
                                      {"darker", to_string(jd.relation)},
                                      {"weight", jd.confidence},
                                      {"provenance", to_string(jd.provenance)}});
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw IoError("cannot open annotations for writing: " + tmp);
        out << doc.dump(2) << "\n";
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw IoError("cannot move " + tmp + " to " + path);
}

ComparisonGraph filter_by_confidence(const ComparisonGraph& g, double min_conf) {
    ComparisonGraph out;
    out.image_id = g.image_id;
    out.points = g.points;
    for (const auto& jd : g.judgments)
        if (jd.confidence >= min_conf) out.judgments.push_back(jd);
    return out;
}

ComparisonGraph symmetrize(const ComparisonGraph& g) {
    ComparisonGraph out = g;
    std::unordered_set<uint64_t> present;
    for (const auto& jd : g.judgments) present.insert(pair_key(jd.i, jd.j));
    for (const auto& jd : g.judgments) {
        if (present.count(pair_key(jd.j, jd.i))) continue;
        Judgment rev;
        rev.i = jd.j;
        rev.j = jd.i;
        rev.relation = flip(jd.relation);
        rev.confidence = jd.confidence;
        rev.provenance = Provenance::Symmetry;
        out.judgments.push_back(rev);
        present.insert(pair_key(rev.i, rev.j));
    }
    return out;
}

namespace {

// Relation implied by the chain i <a> k <b> j, if any. The (>,<) and (<,>)
// patterns are indeterminate.
std::optional<Relation> compose(Relation a, Relation b) {
    if (a == Relation::Equal && b == Relation::Equal) return Relation::Equal;
    if (a != Relation::Less && b != Relation::Less &&
        (a == Relation::Greater || b == Relation::Greater))
        return Relation::Greater;
    if (a != Relation::Greater && b != Relation::Greater &&
        (a == Relation::Less || b == Relation::Less))
        return Relation::Less;
    return std::nullopt;
}

}  // namespace

ClosureResult transitive_closure(const ComparisonGraph& g, int max_rounds) {
    ClosureResult result;
    result.graph = g;

    // dense node indexing
    std::vector<int> ids;
    ids.reserve(g.points.size());
    for (const auto& p : g.points) ids.push_back(p.id);
    std::sort(ids.begin(), ids.end());
    std::unordered_map<int, int> node_of;
    for (size_t k = 0; k < ids.size(); ++k) node_of[ids[k]] = static_cast<int>(k);
    const int n = static_cast<int>(ids.size());

    struct Edge {
        Relation rel;
        double conf;
    };
    std::vector<std::map<int, Edge>> adj(n);  // ordered for deterministic neighbor walks
    for (const auto& jd : result.graph.judgments) {
        int a = node_of.at(jd.i), b = node_of.at(jd.j);
        adj[a][b] = Edge{jd.relation, jd.confidence};
    }

    for (int round = 0; round < max_rounds; ++round) {
        result.rounds = round + 1;
        struct Addition {
            int a, b;
            Relation rel;
            double conf;
        };
        std::vector<Addition> additions;

        for (int a = 0; a < n; ++a) {
            for (int b = a + 1; b < n; ++b) {
                if (adj[a].count(b) || adj[b].count(a)) continue;
                std::optional<Relation> agreed;
                double conf = 0.0;
                bool conflict = false;
                // walk the smaller neighborhood
                const auto& na = adj[a].size() <= adj[b].size() ? adj[a] : adj[b];
                const bool from_a = adj[a].size() <= adj[b].size();
                for (const auto& [k, ek] : na) {
                    const auto& other = from_a ? adj[b] : adj[a];
                    auto it = other.find(k);
                    if (it == other.end()) continue;
                    // chain a <rel_ak> k <rel_kb> b
                    Relation rel_ak = from_a ? ek.rel : flip(it->second.rel);
                    Relation rel_kb = from_a ? flip(it->second.rel) : ek.rel;
                    double chain_conf = std::min(ek.conf, it->second.conf);
                    auto implied = compose(rel_ak, rel_kb);
                    if (!implied) continue;
                    if (!agreed) {
                        agreed = implied;
                        conf = chain_conf;
                    } else if (*agreed != *implied) {
                        conflict = true;
                        break;
                    }
                }
                if (agreed && !conflict)
                    additions.push_back({a, b, *agreed, conf});
            }
        }

        if (additions.empty()) return result;
        for (const auto& add : additions) {
            adj[add.a][add.b] = Edge{add.rel, add.conf};
            adj[add.b][add.a] = Edge{flip(add.rel), add.conf};
            Judgment fwd{ids[add.a], ids[add.b], add.rel, add.conf, Provenance::Transitive};
            Judgment rev{ids[add.b], ids[add.a], flip(add.rel), add.conf, Provenance::Transitive};
            result.graph.judgments.push_back(fwd);
            result.graph.judgments.push_back(rev);
        }
    }
    result.truncated = true;
    return result;
}

}  // namespace intrinsic
