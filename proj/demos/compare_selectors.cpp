// Small benchmark of all four selectors on one world. Pass the world name
// and trial count, e.g. `compare_selectors TwoWall 10`.

#include <cstdlib>
#include <iostream>

#include "guild/guild.hpp"

int main(int argc, char **argv)
{
    using namespace guild;
    RunConfig config;
    config.environment.builtin = argc > 1 ? argv[1] : "Trap";
    config.sample_budget = 3000;
    BenchOptions options;
    options.trials = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 8;
    options.reference_seconds = 10.0;

    try
    {
        const BenchOutcome outcome = run_bench(config, options, std::cerr);
        print_summary(std::cout, outcome);
    }
    catch (const std::exception &e)
    {
        std::cerr << e.what() << '\n';
        return 1;
    }
}
