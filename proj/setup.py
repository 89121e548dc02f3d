import glob

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

ext = Pybind11Extension(
    "tbsim._tbsim",
    sources=["python/bindings.cpp"] + sorted(glob.glob("src/*.cpp")),
    include_dirs=["include"],
    cxx_std=20,
)

setup(
    packages=["tbsim"],
    package_dir={"tbsim": "python/tbsim"},
    ext_modules=[ext],
    cmdclass={"build_ext": build_ext},
)
