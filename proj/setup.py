import sys

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

ext = Pybind11Extension(
    "_owbo",
    sources=[
        "bindings/module.cpp",
        "src/core.cpp",
        "src/rng.cpp",
        "src/kernel.cpp",
        "src/optim.cpp",
        "src/gp.cpp",
        "src/density.cpp",
        "src/acquisition.cpp",
        "src/benchfns.cpp",
        "src/bo.cpp",
        "src/precursor.cpp",
        "src/bench.cpp",
    ],
    include_dirs=["include", "/usr/include/eigen3"],
    cxx_std=20,
)

setup(
    name="owbo",
    version="0.1.0",
    description="Bayesian optimization with output-weighted acquisition functions",
    packages=["owbo"],
    package_dir={"": "python"},
    ext_modules=[ext],
    cmdclass={"build_ext": build_ext},
    python_requires=">=3.8",
)
