#ifndef LFGDOP_TESTS_FIXTURES_HPP
#define LFGDOP_TESTS_FIXTURES_HPP

#include <fstream>
#include <sstream>
#include <string>

#include "lfgdop/corpus.hpp"

namespace fixtures {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string data_path(const std::string& name) {
    return std::string(LFGDOP_DATA_DIR) + "/" + name;
}

inline lfgdop::Corpus kim_corpus() {
    return lfgdop::parse_corpus_file(read_file(data_path("kim.lfg")));
}

inline lfgdop::Corpus bundled_corpus() {
    return lfgdop::parse_corpus_file(read_file(data_path("corpus.lfg")));
}

// Locate a node by category/word along a preorder walk (nth occurrence).
inline lfgdop::NodeId find_node(const lfgdop::Representation& r, const std::string& label,
                                int nth = 0) {
    int seen = 0;
    for (lfgdop::NodeId n : r.cstruct.preorder())
        if (r.cstruct.at(n).label == label && seen++ == nth) return n;
    throw std::runtime_error("node not found: " + label);
}

} // namespace fixtures

#endif
