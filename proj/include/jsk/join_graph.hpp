#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace jsk {

enum class ColumnType { string, integer };

enum class CompareOp { eq, ne, lt, le, gt, ge };

std::optional<CompareOp> parse_compare_op(std::string_view op);
std::string_view to_string(CompareOp op);

/// A conjunct of a relation's filter, evaluated at ingestion.
struct Predicate {
    std::string column;
    ColumnType type = ColumnType::string;
    CompareOp op = CompareOp::eq;
    std::variant<std::int64_t, std::string> value;
};

struct RelationSpec {
    std::string name;
    std::string source;
    /// Declared joinable columns, annotations stripped.
    std::vector<std::string> join_columns;
    std::map<std::string, ColumnType> column_types;
    std::vector<Predicate> filters;

    ColumnType type_of(const std::string& column) const;
};

struct JoinSpec {
    std::string left_relation;
    std::string left_column;
    std::string right_relation;
    std::string right_column;
};

struct QuerySpec {
    std::vector<RelationSpec> relations;
    std::vector<JoinSpec> joins;

    std::optional<std::size_t> find_relation(std::string_view name) const;
};

/// Parses a query document. Self-joins (both endpoints in one relation) are
/// rewritten as joins against a fictitious copy of that relation.
QuerySpec parse_query(std::string_view text);

/// Reads and parses a query file; relative `source` paths are resolved
/// against the directory holding the query file.
QuerySpec load_query(const std::filesystem::path& path);

struct Attribute {
    std::size_t relation = 0;
    std::string column;
    ColumnType type = ColumnType::string;
};

/// Attributes are vertices, joins are edges, relations group attributes.
///
/// Attribute ids are assigned relation by relation, in join_columns order.
/// The relation-level multigraph must be a tree: |E| = r - 1, connected,
/// no repeated relation pair. That forces the attribute-level graph to be a
/// forest with w - r + 1 components.
class JoinGraph {
public:
    using Edge = std::pair<std::size_t, std::size_t>;

    /// Builds a graph from per-relation attribute counts and attribute-id
    /// edges. Attribute ids run 0..w-1 in relation order.
    static JoinGraph make(const std::vector<std::size_t>& attributes_per_relation,
                          const std::vector<Edge>& edges,
                          std::vector<std::string> relation_names = {});

    std::size_t attribute_count() const noexcept { return attributes_.size(); }
    std::size_t relation_count() const noexcept { return omega_.size(); }
    std::size_t component_count() const noexcept { return component_labels_.size(); }

    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const Attribute& attribute(std::size_t u) const { return attributes_.at(u); }
    const std::string& relation_name(std::size_t k) const { return relation_names_.at(k); }
    std::optional<std::size_t> find_relation(std::string_view name) const;

    /// Joined attributes of relation k, ascending.
    const std::vector<std::size_t>& omega(std::size_t k) const { return omega_.at(k); }
    /// Attributes joined with u, ascending.
    const std::vector<std::size_t>& gamma(std::size_t u) const { return gamma_.at(u); }
    /// Component label: the smallest attribute id in u's component.
    std::size_t psi(std::size_t u) const { return component_labels_.at(component_.at(u)); }
    /// Dense component index in [0, component_count()), ordered by label.
    std::size_t component_of(std::size_t u) const { return component_.at(u); }
    std::size_t component_label(std::size_t c) const { return component_labels_.at(c); }
    std::size_t relation_of(std::size_t u) const { return attributes_.at(u).relation; }
    std::optional<std::size_t> edge_index(std::size_t u, std::size_t v) const;
    /// Position of attribute u inside its relation's omega list.
    std::size_t position_in_relation(std::size_t u) const { return position_.at(u); }

private:
    void finalize();

    std::vector<Attribute> attributes_;
    std::vector<std::string> relation_names_;
    std::vector<std::vector<std::size_t>> omega_;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::size_t>> gamma_;
    std::vector<std::size_t> component_;
    std::vector<std::size_t> component_labels_;
    std::vector<std::size_t> position_;
    std::map<Edge, std::size_t> edge_lookup_;

    friend JoinGraph build_join_graph(const QuerySpec& spec);
};

/// Ω is taken from the joins: a relation's joined attributes are exactly the
/// columns its joins reference, in join_columns order.
JoinGraph build_join_graph(const QuerySpec& spec);

/// Rooted depth-first combination order over a join graph.
///
/// Each node is a relation entered through one attribute. `cross` lists the
/// relation's other attributes, each with the subtrees hanging off it; they
/// are folded in by cross-correlation. `joined` lists the subtrees attached
/// to the entry attribute itself, folded in by element-wise product.
struct PlanNode {
    struct Branch {
        std::size_t attribute = 0;
        std::vector<std::size_t> children;
    };

    std::size_t attribute = 0;
    std::size_t relation = 0;
    std::vector<Branch> cross;
    std::vector<std::size_t> joined;
};

struct PlanTree {
    std::size_t root = 0;
    /// nodes[0] is the root visit.
    std::vector<PlanNode> nodes;
    /// Attribute-level parent; the root maps to itself.
    std::vector<std::size_t> parent;

    /// Attributes with no children in the attribute-level tree.
    std::vector<std::size_t> leaves() const;
};

/// `root == std::nullopt` picks the lowest attribute id.
PlanTree traversal_plan(const JoinGraph& graph, std::optional<std::size_t> root = std::nullopt);

}  // namespace jsk
