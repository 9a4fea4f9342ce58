#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "owbo/acquisition_spec.hpp"

namespace owbo {

struct BenchRow {
    std::string param;
    double value = 0.0;
    std::string acq;
    double median_seconds = 0.0;
};

// Single-iteration timing sweep.  Baseline: ackley, d=2, n_samples=1e6,
// n_gmm=2; `param` in {n_samples, n_gmm, d} overrides one of these per sweep
// value.  The timed section per repeat is one loop iteration: the
// likelihood-ratio build (weighted rules only), acquisition minimization,
// objective query, and model update on a fresh seeded 10-point design.
std::vector<BenchRow> bench_sweep(const std::string& param, const std::vector<double>& values,
                                  const std::vector<AcquisitionSpec>& acqs, int repeats,
                                  std::uint64_t seed);

}  // namespace owbo
