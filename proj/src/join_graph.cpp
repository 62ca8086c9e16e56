#include "jsk/join_graph.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "jsk/error.hpp"

namespace jsk {

namespace {

using json = nlohmann::json;

/// "name:int" -> ("name", integer); "name" -> ("name", string).
std::pair<std::string, std::optional<ColumnType>> split_annotation(const std::string& column,
                                                                   const std::string& where) {
    auto colon = column.rfind(':');
    if (colon == std::string::npos) return {column, std::nullopt};
    std::string name = column.substr(0, colon);
    std::string tag = column.substr(colon + 1);
    if (name.empty()) throw QueryError(where + ": empty column name");
    if (tag == "int") return {name, ColumnType::integer};
    if (tag == "string" || tag == "str") return {name, ColumnType::string};
    throw QueryError(where + ": unknown column type annotation '" + tag + "'");
}

void note_type(RelationSpec& rel, const std::string& column, std::optional<ColumnType> type,
               const std::string& where) {
    if (!type) return;
    auto [it, inserted] = rel.column_types.emplace(column, *type);
    if (!inserted && it->second != *type)
        throw QueryError(where + ": conflicting type annotations for column '" + column + "'");
}

const json& require(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw QueryError(where + ": missing field '" + key + "'");
    return *it;
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_string()) throw QueryError(where + "." + key + ": expected a string");
    return v.get<std::string>();
}

std::pair<std::string, std::string> split_endpoint(const json& v, const std::string& where) {
    if (!v.is_string()) throw QueryError(where + ": join endpoint must be a \"Rel.col\" string");
    auto s = v.get<std::string>();
    auto dot = s.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == s.size())
        throw QueryError(where + ": malformed join endpoint '" + s + "'");
    return {s.substr(0, dot), s.substr(dot + 1)};
}

}  // namespace

std::optional<CompareOp> parse_compare_op(std::string_view op) {
    if (op == "=" || op == "==") return CompareOp::eq;
    if (op == "!=" || op == "<>") return CompareOp::ne;
    if (op == "<") return CompareOp::lt;
    if (op == "<=") return CompareOp::le;
    if (op == ">") return CompareOp::gt;
    if (op == ">=") return CompareOp::ge;
    return std::nullopt;
}

std::string_view to_string(CompareOp op) {
    switch (op) {
        case CompareOp::eq: return "=";
        case CompareOp::ne: return "!=";
        case CompareOp::lt: return "<";
        case CompareOp::le: return "<=";
        case CompareOp::gt: return ">";
        case CompareOp::ge: return ">=";
    }
    return "?";
}

ColumnType RelationSpec::type_of(const std::string& column) const {
    auto it = column_types.find(column);
    return it == column_types.end() ? ColumnType::string : it->second;
}

std::optional<std::size_t> QuerySpec::find_relation(std::string_view name) const {
    for (std::size_t k = 0; k < relations.size(); ++k)
        if (relations[k].name == name) return k;
    return std::nullopt;
}

QuerySpec parse_query(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw QueryError(std::string("query document: ") + e.what());
    }
    if (!doc.is_object()) throw QueryError("query document: top level must be an object");

    QuerySpec spec;
    const json& rels = require(doc, "relations", "query");
    if (!rels.is_array() || rels.empty()) throw QueryError("relations: expected a non-empty array");

    for (std::size_t k = 0; k < rels.size(); ++k) {
        const std::string where = "relations[" + std::to_string(k) + "]";
        const json& r = rels[k];
        if (!r.is_object()) throw QueryError(where + ": expected an object");
        RelationSpec rel;
        rel.name = require_string(r, "name", where);
        if (rel.name.empty() || rel.name.find('.') != std::string::npos)
            throw QueryError(where + ".name: must be non-empty and contain no '.'");
        if (spec.find_relation(rel.name)) throw QueryError(where + ": duplicate relation '" + rel.name + "'");
        if (r.contains("source")) rel.source = require_string(r, "source", where);

        const json& cols = require(r, "join_columns", where);
        if (!cols.is_array()) throw QueryError(where + ".join_columns: expected an array");
        for (std::size_t c = 0; c < cols.size(); ++c) {
            const std::string cw = where + ".join_columns[" + std::to_string(c) + "]";
            if (!cols[c].is_string()) throw QueryError(cw + ": expected a string");
            auto [name, type] = split_annotation(cols[c].get<std::string>(), cw);
            if (std::find(rel.join_columns.begin(), rel.join_columns.end(), name) != rel.join_columns.end())
                throw QueryError(cw + ": duplicate column '" + name + "'");
            note_type(rel, name, type, cw);
            rel.join_columns.push_back(std::move(name));
        }

        if (r.contains("filters")) {
            const json& fs = r["filters"];
            if (!fs.is_array()) throw QueryError(where + ".filters: expected an array");
            for (std::size_t f = 0; f < fs.size(); ++f) {
                const std::string fw = where + ".filters[" + std::to_string(f) + "]";
                if (!fs[f].is_object()) throw QueryError(fw + ": expected an object");
                auto [column, type] = split_annotation(require_string(fs[f], "column", fw), fw);
                note_type(rel, column, type, fw);
                auto op = parse_compare_op(require_string(fs[f], "op", fw));
                if (!op) throw QueryError(fw + ".op: unknown operator");
                const json& v = require(fs[f], "value", fw);
                Predicate p;
                p.column = column;
                p.op = *op;
                if (v.is_number_integer()) {
                    p.value = v.get<std::int64_t>();
                } else if (v.is_string()) {
                    p.value = v.get<std::string>();
                } else {
                    throw QueryError(fw + ".value: expected an integer or a string");
                }
                rel.filters.push_back(std::move(p));
            }
        }
        spec.relations.push_back(std::move(rel));
    }

    // Predicate types are resolved once every annotation has been seen.
    for (std::size_t k = 0; k < spec.relations.size(); ++k) {
        auto& rel = spec.relations[k];
        for (std::size_t f = 0; f < rel.filters.size(); ++f) {
            auto& p = rel.filters[f];
            const std::string fw = "relations[" + std::to_string(k) + "].filters[" + std::to_string(f) + "]";
            p.type = rel.type_of(p.column);
            bool int_value = std::holds_alternative<std::int64_t>(p.value);
            if (p.type == ColumnType::integer && !int_value)
                throw QueryError(fw + ": int column '" + p.column + "' compared with a string");
            if (p.type == ColumnType::string && int_value)
                throw QueryError(fw + ": string column '" + p.column + "' compared with an integer");
            if (p.type == ColumnType::string && p.op != CompareOp::eq && p.op != CompareOp::ne)
                throw QueryError(fw + ": operator '" + std::string(to_string(p.op)) +
                                 "' is not defined on string column '" + p.column + "'");
        }
    }

    const json& joins = require(doc, "joins", "query");
    if (!joins.is_array() || joins.empty()) throw QueryError("joins: expected at least one join");

    std::map<std::string, std::size_t> copies;
    for (std::size_t j = 0; j < joins.size(); ++j) {
        const std::string where = "joins[" + std::to_string(j) + "]";
        const json& pair = joins[j];
        if (!pair.is_array() || pair.size() != 2) throw QueryError(where + ": expected a pair of endpoints");
        auto [lrel, lcol] = split_endpoint(pair[0], where + "[0]");
        auto [rrel, rcol] = split_endpoint(pair[1], where + "[1]");
        for (auto [rel, col, side] : {std::tuple{lrel, lcol, 0}, std::tuple{rrel, rcol, 1}}) {
            auto k = spec.find_relation(rel);
            const std::string ew = where + "[" + std::to_string(side) + "]";
            if (!k) throw QueryError(ew + ": unknown relation '" + rel + "'");
            const auto& cols = spec.relations[*k].join_columns;
            if (std::find(cols.begin(), cols.end(), col) == cols.end())
                throw QueryError(ew + ": unknown column '" + rel + "." + col + "'");
        }
        if (lrel == rrel) {
            // Self-join: the right side refers to a fictitious copy.
            std::size_t n = ++copies[lrel];
            RelationSpec copy = spec.relations[*spec.find_relation(lrel)];
            copy.name = lrel + "#" + std::to_string(n);
            rrel = copy.name;
            spec.relations.push_back(std::move(copy));
        }
        spec.joins.push_back({lrel, lcol, rrel, rcol});
    }
    return spec;
}

QuerySpec load_query(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open query file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    QuerySpec spec = parse_query(buf.str());
    auto dir = path.parent_path();
    for (auto& rel : spec.relations) {
        if (!rel.source.empty() && std::filesystem::path(rel.source).is_relative())
            rel.source = (dir / rel.source).lexically_normal().string();
    }
    return spec;
}

std::optional<std::size_t> JoinGraph::find_relation(std::string_view name) const {
    for (std::size_t k = 0; k < relation_names_.size(); ++k)
        if (relation_names_[k] == name) return k;
    return std::nullopt;
}

std::optional<std::size_t> JoinGraph::edge_index(std::size_t u, std::size_t v) const {
    auto it = edge_lookup_.find({std::min(u, v), std::max(u, v)});
    if (it == edge_lookup_.end()) return std::nullopt;
    return it->second;
}

JoinGraph JoinGraph::make(const std::vector<std::size_t>& attributes_per_relation,
                          const std::vector<Edge>& edges, std::vector<std::string> relation_names) {
    JoinGraph g;
    const std::size_t r = attributes_per_relation.size();
    if (relation_names.empty()) {
        for (std::size_t k = 0; k < r; ++k) relation_names.push_back("R" + std::to_string(k));
    }
    if (relation_names.size() != r) throw QueryError("relation name count does not match relation count");
    g.relation_names_ = std::move(relation_names);
    g.omega_.resize(r);
    for (std::size_t k = 0; k < r; ++k) {
        if (attributes_per_relation[k] == 0)
            throw QueryError("relation " + g.relation_names_[k] + " has no joined attribute");
        for (std::size_t a = 0; a < attributes_per_relation[k]; ++a) {
            g.omega_[k].push_back(g.attributes_.size());
            g.attributes_.push_back({k, std::to_string(g.attributes_.size()), ColumnType::string});
        }
    }
    for (auto [u, v] : edges) {
        if (u >= g.attributes_.size() || v >= g.attributes_.size())
            throw QueryError("edge references an unknown attribute");
        g.edges_.emplace_back(std::min(u, v), std::max(u, v));
    }
    g.finalize();
    return g;
}

void JoinGraph::finalize() {
    const std::size_t w = attributes_.size();
    const std::size_t r = omega_.size();
    if (edges_.empty()) throw QueryError("query has no joins");

    gamma_.assign(w, {});
    edge_lookup_.clear();
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        auto [u, v] = edges_[e];
        if (u == v) throw QueryError("attribute joined with itself");
        if (relation_of(u) == relation_of(v))
            throw QueryError("join between two attributes of relation " + relation_names_[relation_of(u)]);
        if (!edge_lookup_.emplace(edges_[e], e).second)
            throw QueryError("duplicate join between the same attributes");
        gamma_[u].push_back(v);
        gamma_[v].push_back(u);
    }
    for (auto& g : gamma_) std::sort(g.begin(), g.end());

    for (std::size_t u = 0; u < w; ++u) {
        if (gamma_[u].empty())
            throw QueryError("attribute " + relation_names_[relation_of(u)] + "." + attributes_[u].column +
                             " is not joined");
    }

    // Relation-level tree check by union-find: a second path between two
    // relations is a cycle (parallel joins included).
    std::vector<std::size_t> parent(r);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (auto [u, v] : edges_) {
        auto a = find(relation_of(u));
        auto b = find(relation_of(v));
        if (a == b) throw QueryError("cyclic join graph is not supported");
        parent[a] = b;
    }
    if (edges_.size() != r - 1)
        throw QueryError("join graph is disconnected: " + std::to_string(r) + " relations but " +
                         std::to_string(edges_.size()) + " joins");

    // Attribute-level components, labelled by their smallest attribute id.
    std::vector<std::size_t> comp(w);
    std::iota(comp.begin(), comp.end(), 0);
    std::function<std::size_t(std::size_t)> cfind = [&](std::size_t x) {
        while (comp[x] != x) x = comp[x] = comp[comp[x]];
        return x;
    };
    for (auto [u, v] : edges_) {
        auto a = cfind(u);
        auto b = cfind(v);
        if (a != b) comp[std::max(a, b)] = std::min(a, b);
    }
    component_.assign(w, 0);
    component_labels_.clear();
    std::map<std::size_t, std::size_t> dense;
    for (std::size_t u = 0; u < w; ++u) {
        auto label = cfind(u);
        auto [it, inserted] = dense.emplace(label, component_labels_.size());
        if (inserted) component_labels_.push_back(label);
        component_[u] = it->second;
    }

    position_.assign(w, 0);
    for (auto& om : omega_) {
        std::sort(om.begin(), om.end());
        for (std::size_t p = 0; p < om.size(); ++p) position_[om[p]] = p;
    }
}

JoinGraph build_join_graph(const QuerySpec& spec) {
    JoinGraph g;
    const std::size_t r = spec.relations.size();
    g.omega_.resize(r);

    // Columns referenced by joins, per relation.
    std::vector<std::set<std::string>> used(r);
    for (const auto& j : spec.joins) {
        auto l = spec.find_relation(j.left_relation);
        auto rr = spec.find_relation(j.right_relation);
        if (!l || !rr) throw QueryError("join references an unknown relation");
        used[*l].insert(j.left_column);
        used[*rr].insert(j.right_column);
    }

    std::map<std::pair<std::size_t, std::string>, std::size_t> ids;
    for (std::size_t k = 0; k < r; ++k) {
        const auto& rel = spec.relations[k];
        g.relation_names_.push_back(rel.name);
        if (used[k].empty()) throw QueryError("relation " + rel.name + " takes part in no join");
        for (const auto& col : rel.join_columns) {
            if (!used[k].count(col)) continue;
            ids[{k, col}] = g.attributes_.size();
            g.omega_[k].push_back(g.attributes_.size());
            g.attributes_.push_back({k, col, rel.type_of(col)});
        }
    }
    for (const auto& j : spec.joins) {
        auto l = ids.at({*spec.find_relation(j.left_relation), j.left_column});
        auto rr = ids.at({*spec.find_relation(j.right_relation), j.right_column});
        if (g.attributes_[l].type != g.attributes_[rr].type)
            throw QueryError("join " + j.left_relation + "." + j.left_column + " = " + j.right_relation + "." +
                             j.right_column + " compares columns of different types");
        g.edges_.emplace_back(std::min(l, rr), std::max(l, rr));
    }
    g.finalize();
    return g;
}

std::vector<std::size_t> PlanTree::leaves() const {
    std::vector<bool> has_child(parent.size(), false);
    for (std::size_t u = 0; u < parent.size(); ++u)
        if (parent[u] != u) has_child[parent[u]] = true;
    std::vector<std::size_t> out;
    for (std::size_t u = 0; u < parent.size(); ++u)
        if (!has_child[u]) out.push_back(u);
    return out;
}

PlanTree traversal_plan(const JoinGraph& graph, std::optional<std::size_t> root) {
    const std::size_t w = graph.attribute_count();
    std::size_t o = root.value_or(0);
    if (o >= w) throw QueryError("unknown root attribute " + std::to_string(o));

    PlanTree plan;
    plan.root = o;
    plan.parent.assign(w, w);
    plan.parent[o] = o;
    std::vector<bool> visited(w, false);

    // Mirrors the recursive combination: mark u, then each other attribute
    // of its relation (descending into its neighbours), then u's unvisited
    // neighbours.
    std::function<std::size_t(std::size_t)> visit = [&](std::size_t u) -> std::size_t {
        std::size_t idx = plan.nodes.size();
        plan.nodes.push_back({u, graph.relation_of(u), {}, {}});
        visited[u] = true;
        const auto k = graph.relation_of(u);
        for (std::size_t other : graph.omega(k)) {
            if (other == u) continue;
            visited[other] = true;
            plan.parent[other] = u;
            PlanNode::Branch branch{other, {}};
            for (std::size_t v : graph.gamma(other)) {
                if (visited[v]) throw QueryError("join graph is not a tree");
                plan.parent[v] = other;
                branch.children.push_back(visit(v));
            }
            plan.nodes[idx].cross.push_back(std::move(branch));
        }
        for (std::size_t v : graph.gamma(u)) {
            if (visited[v]) continue;
            plan.parent[v] = u;
            auto child = visit(v);
            plan.nodes[idx].joined.push_back(child);
        }
        return idx;
    };
    visit(o);
    return plan;
}

}  // namespace jsk
