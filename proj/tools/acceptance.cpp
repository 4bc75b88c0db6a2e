// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include "walras/acceptance.hpp"
#include "walras/corpus.hpp"

#include <iostream>

int main(int argc, char** argv) {
    walras::AcceptanceConfig cfg;
    cfg.corpus_dir = argc > 1 ? std::filesystem::path(argv[1]) : walras::built_in_corpus_dir();
    try {
        bool all = true;
        for (const auto& r : walras::run_acceptance(cfg, [](const walras::CheckResult& r) {
                 std::cout << walras::format_check_line(r) << std::endl;
             })) {
            all = all && r.pass;
        }
        std::cout << (all ? "ALL CRITERIA PASSED" : "SOME CRITERIA FAILED") << std::endl;
        return all ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "acceptance: " << e.what() << '\n';
        return 2;
    }
}
