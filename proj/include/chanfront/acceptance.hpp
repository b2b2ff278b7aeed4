#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "chanfront/channel.hpp"
#include "chanfront/sturm.hpp"

namespace chanfront::accept {

struct Options {
    bool quick = false;        // reduced sizes, same checks
    std::string out_dir;       // optional: write per-criterion CSV artifacts
    std::vector<int> only;     // run a subset (1-based criterion ids); empty = all
};

struct Result {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

std::vector<Result> run_all(const Options& opt);

// Prints one line per criterion; returns true when everything passed.
bool print_table(const std::vector<Result>& results, std::ostream& os);

// Dense linear solve of the truncated junction system (boundary value 1 at
// the origin, 0 past depth K): per-spine-edge coefficient pairs. Used as the
// brute-force oracle against the ratio recursion.
struct DenseSolution {
    std::vector<double> c_plus, c_minus; // spine edges 0..K
};
DenseSolution dense_junction_solve(const std::vector<Cell>& cells, int K, double lambda_q,
                                   SolveMethod method = SolveMethod::ode);

} // namespace chanfront::accept
