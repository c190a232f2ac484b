"""Published reference fixtures and their runner."""

from .catalog import CATALOG, Benchmark, BenchmarkReport, get_benchmark, refine_double_origin, run_benchmark

__all__ = ['CATALOG', 'Benchmark', 'BenchmarkReport', 'get_benchmark', 'refine_double_origin', 'run_benchmark']
