#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dirac {

struct AcceptanceLine {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    std::vector<int> only;  // empty: every criterion
    bool verbose = false;   // per-step diagnostics on the log stream
};

// Runs the acceptance criteria and writes one PASS/FAIL line per criterion.
std::vector<AcceptanceLine> run_acceptance(std::ostream& out, const AcceptanceOptions& opt = {});

}  // namespace dirac
