"""Bayesian optimization with output-weighted acquisition functions."""

from _owbo import (
    benchmark_eval,
    benchmark_info,
    benchmarks,
    output_pdf,
    run,
)

__all__ = ["benchmarks", "benchmark_info", "benchmark_eval", "run", "output_pdf"]
__version__ = "0.1.0"
