#include "jsk/sketch_file.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "jsk/error.hpp"

namespace jsk {

namespace {

constexpr char kMagic[4] = {'J', 'S', 'K', '1'};

template <class T>
void put(std::ostream& out, T value) {
    std::uint64_t bits = 0;
    if constexpr (std::is_same_v<T, double>) {
        bits = std::bit_cast<std::uint64_t>(value);
    } else {
        bits = static_cast<std::uint64_t>(value);
    }
    char bytes[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
    out.write(bytes, sizeof(T));
}

template <class T>
T get(std::istream& in) {
    unsigned char bytes[sizeof(T)];
    if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw DataError("sketch file is truncated");
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    if constexpr (std::is_same_v<T, double>) {
        return std::bit_cast<double>(bits);
    } else {
        return static_cast<T>(bits);
    }
}

}  // namespace

void write_sketch_file(std::ostream& out, const SketchFile& file) {
    out.write(kMagic, 4);
    put<std::uint32_t>(out, SketchFile::kVersion);
    put<std::uint8_t>(out, static_cast<std::uint8_t>(file.config.method));
    put<std::uint64_t>(out, file.config.m);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(file.config.l));
    put<std::uint64_t>(out, file.config.seed);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(file.relations.size()));
    for (const auto& sk : file.relations) {
        if (!(sk.config == file.config)) throw QueryError("relation sketch " + sk.name + " has a different config");
        put<std::uint32_t>(out, static_cast<std::uint32_t>(sk.name.size()));
        out.write(sk.name.data(), static_cast<std::streamsize>(sk.name.size()));
        for (Eigen::Index rep = 0; rep < sk.counters.rows(); ++rep)
            for (Eigen::Index j = 0; j < sk.counters.cols(); ++j) put<double>(out, sk.counters(rep, j));
    }
    if (!out) throw DataError("failed writing sketch file");
}

void write_sketch_file(const std::filesystem::path& path, const SketchFile& file) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot create sketch file " + path.string());
    write_sketch_file(out, file);
}

SketchFile read_sketch_file(std::istream& in) {
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw DataError("not a sketch file (bad magic)");
    auto version = get<std::uint32_t>(in);
    if (version != SketchFile::kVersion) throw DataError("unsupported sketch file version " + std::to_string(version));

    SketchFile file;
    auto tag = get<std::uint8_t>(in);
    if (tag > 1) throw DataError("unknown method tag " + std::to_string(tag));
    file.config.method = static_cast<Method>(tag);
    file.config.m = get<std::uint64_t>(in);
    file.config.l = get<std::uint32_t>(in);
    file.config.seed = get<std::uint64_t>(in);
    if (file.config.m == 0 || file.config.l == 0) throw DataError("sketch file has an empty shape");
    auto count = get<std::uint32_t>(in);
    for (std::uint32_t k = 0; k < count; ++k) {
        auto len = get<std::uint32_t>(in);
        std::string name(len, '\0');
        if (len && !in.read(name.data(), len)) throw DataError("sketch file is truncated");
        RelationSketch sk(k, std::move(name), file.config);
        for (Eigen::Index rep = 0; rep < sk.counters.rows(); ++rep)
            for (Eigen::Index j = 0; j < sk.counters.cols(); ++j) sk.counters(rep, j) = get<double>(in);
        file.relations.push_back(std::move(sk));
    }
    return file;
}

SketchFile read_sketch_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open sketch file " + path.string());
    return read_sketch_file(in);
}

std::vector<RelationSketch> align_to_graph(const SketchFile& file, const JoinGraph& graph) {
    if (file.relations.size() != graph.relation_count())
        throw QueryError("sketch file holds " + std::to_string(file.relations.size()) + " relations, query has " +
                         std::to_string(graph.relation_count()));
    std::vector<RelationSketch> out;
    for (std::size_t k = 0; k < graph.relation_count(); ++k) {
        const RelationSketch* match = nullptr;
        for (const auto& sk : file.relations)
            if (sk.name == graph.relation_name(k)) match = &sk;
        if (!match) throw QueryError("sketch file has no sketch for relation " + graph.relation_name(k));
        RelationSketch sk = *match;
        sk.relation = k;
        out.push_back(std::move(sk));
    }
    return out;
}

}  // namespace jsk
