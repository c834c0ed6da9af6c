// Acceptance suite: one pass/fail line per criterion. Run with a criterion
// number (1-8) or with no arguments for the full suite.

#include <cstdlib>
#include <iostream>

#include "acceptance_criteria.hpp"

int main(int argc, char** argv) {
    using atraj::acceptance::run_criterion;
    int failures = 0;
    if (argc > 1) {
        for (int i = 1; i < argc; ++i) {
            failures += run_criterion(std::atoi(argv[i])) ? 0 : 1;
        }
    } else {
        for (int criterion = 1; criterion <= 8; ++criterion) {
            failures += run_criterion(criterion) ? 0 : 1;
        }
    }
    return failures == 0 ? 0 : 1;
}
