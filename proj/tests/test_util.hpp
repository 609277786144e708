#pragma once

#include "synergylab/corpus.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>

namespace testutil {

// Scratch directory removed on destruction.
struct TempDir {
    std::string path;
    TempDir() {
        static int counter = 0;
        path = (std::filesystem::temp_directory_path() /
                ("synergylab_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++)))
                   .string();
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return path + "/" + name; }
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

// Writes the four corpus CSVs into dir and loads them.
inline synergylab::Corpus make_corpus(const TempDir& dir, const std::string& papers,
                                      const std::string& authors, const std::string& authorships,
                                      const std::string& citations,
                                      const synergylab::LoadOptions& opts = {}) {
    write_file(dir.file("papers.csv"), papers);
    write_file(dir.file("authors.csv"), authors);
    write_file(dir.file("authorships.csv"), authorships);
    write_file(dir.file("citations.csv"), citations);
    synergylab::CorpusPaths paths{dir.file("papers.csv"), dir.file("authors.csv"),
                                  dir.file("authorships.csv"), dir.file("citations.csv")};
    return synergylab::load_corpus(paths, synergylab::Schema{}, opts);
}

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

} // namespace testutil
