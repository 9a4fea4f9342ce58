// Regenerates the benchmark fixture data from the built-in brute-force
// oracles.  Usage: gen-fixtures > fixtures/benchmarks.txt
// The embedded copy in src/benchfns.cpp must be kept identical.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "owbo/benchfns.hpp"

namespace {

void emit(const owbo::Benchmark& b, const char* note) {
    std::printf("[%s d=%d]\n", b.name.c_str(), b.dim);
    std::printf("lower =");
    for (int j = 0; j < b.dim; ++j) std::printf(" %.17g", b.domain.lower[j]);
    std::printf("\nupper =");
    for (int j = 0; j < b.dim; ++j) std::printf(" %.17g", b.domain.upper[j]);
    std::printf("\nmin_value = %.17g\n", b.true_min_value);
    for (const auto& m : b.true_minimizers) {
        std::printf("minimizer =");
        for (int j = 0; j < b.dim; ++j) std::printf(" %.17g", m[j]);
        std::printf("\n");
    }
    std::printf("oracle = %s\n\n", note);
}

}  // namespace

int main() {
    // an empty fixture source forces every entry through the oracles
    setenv("OWBO_FIXTURES", "/dev/null", 1);

    std::printf(
        "# Benchmark reference data, derived by the built-in brute-force oracles\n"
        "# (dense grid / separable scan / multistart with pattern refine).\n"
        "# Regenerate with: gen-fixtures > fixtures/benchmarks.txt\n\n");

    emit(owbo::make_benchmark("ackley", 2), "analytic (both exponential terms peak at the origin)");
    emit(owbo::make_benchmark("branin", 2),
         "stationarity (sin x1 = 0 with the parabola term zeroed); min over the three roots");
    emit(owbo::make_benchmark("bukin", 2), "analytic (both absolute-value terms vanish)");
    emit(owbo::make_benchmark("michalewicz", 2),
         "separable per-coordinate dense grid + pattern refine");
    emit(owbo::make_benchmark("michalewicz", 10),
         "separable per-coordinate dense grid + pattern refine");
    emit(owbo::make_benchmark("hartmann6", 6), "1e4 LHS multistart + pattern refine");
    return 0;
}
