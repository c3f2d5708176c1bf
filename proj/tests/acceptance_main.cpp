#include <cstdlib>
#include <iostream>
#include <string>

#include "dirac/acceptance.hpp"

int main(int argc, char** argv) {
    dirac::AcceptanceOptions opt;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "-v" || a == "--verbose")
            opt.verbose = true;
        else
            opt.only.push_back(std::atoi(a.c_str()));
    }
    const auto lines = dirac::run_acceptance(std::cout, opt);
    int failed = 0;
    for (const auto& l : lines) failed += l.pass ? 0 : 1;
    std::cout << (failed ? "acceptance: " + std::to_string(failed) + " criteria failed" : "acceptance: all criteria passed")
              << std::endl;
    return failed ? 1 : 0;
}
