#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "jsk/join_graph.hpp"
#include "jsk/sketch.hpp"

namespace jsk {

/// Name of the optional CSV column holding each row's frequency change.
inline constexpr std::string_view kDeltaColumn = "__delta";

/// FNV-1a, 64-bit.
constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Maps a cell to a 64-bit item: ints to their two's-complement pattern,
/// strings to their FNV-1a hash. Throws DataError on a malformed int.
std::uint64_t canonicalize(std::string_view cell, ColumnType type);

/// RFC 4180 reader: comma separated, double-quote quoting with "" escapes,
/// quoted fields may span lines, LF or CRLF line ends.
class CsvReader {
public:
    explicit CsvReader(std::istream& in) : in_(&in) {}

    /// False at end of input.
    bool next(std::vector<std::string>& fields);

    /// Records returned so far (header included).
    std::size_t rows_read() const noexcept { return rows_; }
    /// Physical line the last record started on, 1-based.
    std::size_t line() const noexcept { return record_line_; }

private:
    std::istream* in_;
    std::size_t rows_ = 0;
    std::size_t line_ = 0;
    std::size_t record_line_ = 0;
};

/// One CSV record addressed by header column name.
class RowView {
public:
    RowView(const std::unordered_map<std::string, std::size_t>& header, const std::vector<std::string>& fields)
        : header_(&header), fields_(&fields) {}

    /// Throws QueryError when the column is not in the header.
    std::string_view operator[](std::string_view column) const;
    bool has(std::string_view column) const;

private:
    const std::unordered_map<std::string, std::size_t>* header_;
    const std::vector<std::string>* fields_;
};

/// Conjunction of the predicates. An empty cell is NULL and satisfies no
/// predicate. Int predicates compare numerically; string predicates support
/// only = and !=.
bool apply_filters(const RowView& row, std::span<const Predicate> predicates);

struct IngestStats {
    std::size_t rows = 0;       // data rows read
    std::size_t emitted = 0;    // updates produced
    std::size_t filtered = 0;   // rows failing a predicate
    std::size_t null_keys = 0;  // rows with an empty joined column
};

using UpdateSink = std::function<void(const TupleUpdate&)>;

/// Streams relation `relation` of `graph` out of CSV text: one update per
/// row passing the filters, values in omega order, delta from `__delta`
/// (default +1).
IngestStats read_stream(std::istream& in, const JoinGraph& graph, std::size_t relation,
                        std::span<const Predicate> predicates, const UpdateSink& sink);

IngestStats read_stream(const std::filesystem::path& path, const JoinGraph& graph, std::size_t relation,
                        std::span<const Predicate> predicates, const UpdateSink& sink);

/// Reads every relation of the query from its source file.
std::vector<std::vector<TupleUpdate>> load_relations(const QuerySpec& spec, const JoinGraph& graph);

}  // namespace jsk
