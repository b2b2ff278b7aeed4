// Acceptance suite runner: one pass/fail line per criterion.
// Usage: acceptance_tests [--quick] [--only 1,4,7]

#include <cstdlib>
#include <cstring>
#include <iostream>
#include <sstream>

#include "chanfront/acceptance.hpp"
#include "chanfront/parallel.hpp"

int main(int argc, char** argv) {
    chanfront::accept::Options opt;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--quick") == 0) opt.quick = true;
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
            std::stringstream ss(argv[++i]);
            std::string tok;
            while (std::getline(ss, tok, ',')) opt.only.push_back(std::atoi(tok.c_str()));
        }
        if (std::strcmp(argv[i], "--threads") == 0 && i + 1 < argc)
            chanfront::par::set_max_threads(std::atoi(argv[++i]));
    }
    auto results = chanfront::accept::run_all(opt);
    bool ok = chanfront::accept::print_table(results, std::cout);
    return ok ? 0 : 1;
}
