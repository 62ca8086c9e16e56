#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "jsk/sketch.hpp"

namespace jsk {

/// Binary sketch container, little-endian:
///
///   "JSK1" | version u32 | method u8 | m u64 | l u32 | seed u64 |
///   relation count u32 | per relation: name length u32, name bytes,
///   l*m float64 counters (repetition-major)
struct SketchFile {
    static constexpr std::uint32_t kVersion = 1;

    SketchConfig config;
    std::vector<RelationSketch> relations;
};

void write_sketch_file(std::ostream& out, const SketchFile& file);
void write_sketch_file(const std::filesystem::path& path, const SketchFile& file);
SketchFile read_sketch_file(std::istream& in);
SketchFile read_sketch_file(const std::filesystem::path& path);

/// Orders the file's sketches by the graph's relations, matching by name.
std::vector<RelationSketch> align_to_graph(const SketchFile& file, const JoinGraph& graph);

}  // namespace jsk
