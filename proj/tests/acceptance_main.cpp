// Runs the full acceptance battery and prints one line per criterion.

#include <cstdio>

#include "confspec/verify.hpp"

int main() {
    const auto results = confspec::run_acceptance_battery();
    bool all = true;
    for (const auto& r : results) {
        std::printf("%s  %s  (%s)\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                    r.detail.c_str());
        all = all && r.pass;
    }
    std::printf("%s\n", all ? "acceptance: all criteria passed"
                            : "acceptance: FAILURES present");
    return all ? 0 : 1;
}
