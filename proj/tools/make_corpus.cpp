// Regenerates the built-in corpus files (data/corpus by default).
#include "walras/corpus.hpp"

#include <iostream>

int main(int argc, char** argv) {
    const std::filesystem::path dir = argc > 1 ? std::filesystem::path(argv[1]) : walras::built_in_corpus_dir();
    try {
        walras::write_corpus(dir);
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return 1;
    }
    std::cout << "wrote " << walras::build_corpus().size() << " economies to " << dir.string() << '\n';
}
