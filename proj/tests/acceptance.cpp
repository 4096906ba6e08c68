// One line per criterion; exit status is nonzero if any criterion fails.
#include "tsolve/validation.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>

int main(int argc, char** argv)
{
    std::string suite = argc > 1 ? argv[1] : "all";
    std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 20240601;
    bool all = true;
    for (const auto& c : tsolve::run_suite(suite, seed)) {
        all = all && c.pass;
        std::printf("AC%d %s  %s (%.1fs, limit %.0fs): %s\n", c.id, c.pass ? "PASS" : "FAIL", c.name.c_str(), c.seconds,
                    c.time_limit, c.detail.c_str());
        std::fflush(stdout);
    }
    return all ? 0 : 1;
}
