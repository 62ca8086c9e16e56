#include "jsk/ingestion.hpp"

#include <charconv>
#include <fstream>

#include "jsk/error.hpp"

namespace jsk {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

std::int64_t parse_int(std::string_view cell, std::string_view what) {
    auto s = trim(cell);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        throw DataError("cannot parse '" + std::string(cell) + "' as an integer (" + std::string(what) + ")");
    return v;
}

template <class T>
bool compare(const T& a, CompareOp op, const T& b) {
    switch (op) {
        case CompareOp::eq: return a == b;
        case CompareOp::ne: return a != b;
        case CompareOp::lt: return a < b;
        case CompareOp::le: return a <= b;
        case CompareOp::gt: return a > b;
        case CompareOp::ge: return a >= b;
    }
    return false;
}

}  // namespace

std::uint64_t canonicalize(std::string_view cell, ColumnType type) {
    if (type == ColumnType::integer) return static_cast<std::uint64_t>(parse_int(cell, "int column"));
    return fnv1a64(cell);
}

bool CsvReader::next(std::vector<std::string>& fields) {
    fields.clear();
    std::string line;
    if (!std::getline(*in_, line)) return false;
    ++line_;
    record_line_ = line_;

    std::string field;
    bool quoted = false;
    bool was_quoted = false;
    for (;;) {
        for (std::size_t i = 0; i < line.size(); ++i) {
            char c = line[i];
            if (quoted) {
                if (c == '"') {
                    if (i + 1 < line.size() && line[i + 1] == '"') {
                        field += '"';
                        ++i;
                    } else {
                        quoted = false;
                    }
                } else {
                    field += c;
                }
            } else if (c == '"' && field.empty() && !was_quoted) {
                quoted = was_quoted = true;
            } else if (c == ',') {
                fields.push_back(std::move(field));
                field.clear();
                was_quoted = false;
            } else if (c == '\r' && i + 1 == line.size()) {
                // CRLF line end
            } else {
                field += c;
            }
        }
        if (!quoted) break;
        // Quoted field continues on the next physical line.
        if (!std::getline(*in_, line))
            throw DataError("unterminated quoted field starting on line " + std::to_string(record_line_));
        ++line_;
        field += '\n';
    }
    fields.push_back(std::move(field));
    ++rows_;
    return true;
}

std::string_view RowView::operator[](std::string_view column) const {
    auto it = header_->find(std::string(column));
    if (it == header_->end()) throw QueryError("column '" + std::string(column) + "' not present in the data");
    return (*fields_)[it->second];
}

bool RowView::has(std::string_view column) const { return header_->count(std::string(column)) != 0; }

bool apply_filters(const RowView& row, std::span<const Predicate> predicates) {
    for (const auto& p : predicates) {
        std::string_view cell = row[p.column];
        if (p.type == ColumnType::string && p.op != CompareOp::eq && p.op != CompareOp::ne)
            throw QueryError("operator '" + std::string(to_string(p.op)) + "' is not defined on string column '" +
                             p.column + "'");
        if (p.type == ColumnType::integer && !std::holds_alternative<std::int64_t>(p.value))
            throw QueryError("int column '" + p.column + "' compared with a string");
        if (p.type == ColumnType::string && !std::holds_alternative<std::string>(p.value))
            throw QueryError("string column '" + p.column + "' compared with an integer");
        if (cell.empty()) return false;
        bool ok = p.type == ColumnType::integer
                      ? compare(parse_int(cell, "filter on " + p.column), p.op, std::get<std::int64_t>(p.value))
                      : compare(cell, p.op, std::string_view(std::get<std::string>(p.value)));
        if (!ok) return false;
    }
    return true;
}

IngestStats read_stream(std::istream& in, const JoinGraph& graph, std::size_t relation,
                        std::span<const Predicate> predicates, const UpdateSink& sink) {
    CsvReader reader(in);
    std::vector<std::string> fields;
    if (!reader.next(fields)) throw DataError("missing CSV header for relation " + graph.relation_name(relation));
    std::unordered_map<std::string, std::size_t> header;
    for (std::size_t i = 0; i < fields.size(); ++i) header.emplace(fields[i], i);
    const std::size_t width = fields.size();

    const auto& omega = graph.omega(relation);
    std::vector<std::size_t> key_cols;
    for (std::size_t u : omega) {
        auto it = header.find(graph.attribute(u).column);
        if (it == header.end())
            throw DataError("relation " + graph.relation_name(relation) + ": missing declared column '" +
                            graph.attribute(u).column + "'");
        key_cols.push_back(it->second);
    }
    for (const auto& p : predicates) {
        if (!header.count(p.column))
            throw DataError("relation " + graph.relation_name(relation) + ": missing filter column '" + p.column + "'");
    }
    auto delta_it = header.find(std::string(kDeltaColumn));
    const bool has_delta = delta_it != header.end();

    IngestStats stats;
    TupleUpdate t;
    t.relation = relation;
    t.values.resize(omega.size());
    while (reader.next(fields)) {
        if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
        if (fields.size() != width)
            throw DataError("relation " + graph.relation_name(relation) + ", line " + std::to_string(reader.line()) +
                            ": expected " + std::to_string(width) + " fields, got " + std::to_string(fields.size()));
        ++stats.rows;
        if (!apply_filters(RowView(header, fields), predicates)) {
            ++stats.filtered;
            continue;
        }
        bool null_key = false;
        for (std::size_t p = 0; p < key_cols.size(); ++p) {
            const std::string& cell = fields[key_cols[p]];
            if (cell.empty()) {
                null_key = true;
                break;
            }
            try {
                t.values[p] = canonicalize(cell, graph.attribute(omega[p]).type);
            } catch (const DataError& e) {
                throw DataError("relation " + graph.relation_name(relation) + ", line " +
                                std::to_string(reader.line()) + ": " + e.what());
            }
        }
        if (null_key) {
            ++stats.null_keys;
            continue;
        }
        t.delta = 1.0;
        if (has_delta) {
            auto cell = trim(fields[delta_it->second]);
            if (!cell.empty()) {
                auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), t.delta);
                if (ec != std::errc() || ptr != cell.data() + cell.size())
                    throw DataError("relation " + graph.relation_name(relation) + ", line " +
                                    std::to_string(reader.line()) + ": bad " + std::string(kDeltaColumn) + " value");
            }
        }
        ++stats.emitted;
        sink(t);
    }
    return stats;
}

IngestStats read_stream(const std::filesystem::path& path, const JoinGraph& graph, std::size_t relation,
                        std::span<const Predicate> predicates, const UpdateSink& sink) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open data source " + path.string());
    return read_stream(in, graph, relation, predicates, sink);
}

std::vector<std::vector<TupleUpdate>> load_relations(const QuerySpec& spec, const JoinGraph& graph) {
    std::vector<std::vector<TupleUpdate>> out(graph.relation_count());
    for (std::size_t k = 0; k < graph.relation_count(); ++k) {
        auto idx = spec.find_relation(graph.relation_name(k));
        if (!idx) throw QueryError("relation " + graph.relation_name(k) + " missing from the query");
        const auto& rel = spec.relations[*idx];
        if (rel.source.empty()) throw QueryError("relation " + rel.name + " has no data source");
        read_stream(rel.source, graph, k, rel.filters, [&](const TupleUpdate& t) { out[k].push_back(t); });
    }
    return out;
}

}  // namespace jsk
