// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Flags: --quick (halved scales), --threads N.

#include <cstring>
#include <iostream>

#include "semergo/acceptance.hpp"

int main(int argc, char** argv) {
    semergo::AcceptanceOptions opt;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--quick") == 0) {
            opt.quick = true;
        } else if (std::strcmp(argv[i], "--threads") == 0 && i + 1 < argc) {
            opt.threads = static_cast<unsigned>(std::atoi(argv[++i]));
        } else {
            std::cerr << "usage: acceptance [--quick] [--threads N]\n";
            return 1;
        }
    }
    auto results = semergo::run_acceptance(std::cout, opt);
    int passed = 0;
    for (const auto& r : results) passed += r.pass ? 1 : 0;
    std::cout << passed << "/" << results.size() << " criteria passed\n";
    return semergo::acceptance_all_passed(results) ? 0 : 2;
}
