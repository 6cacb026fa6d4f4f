"""CMake-driven extension build: the pybind11 module is produced by the
same CMake project that builds the C++ library and CLI."""

import os
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name, sourcedir=""):
        super().__init__(name, sources=[])
        self.sourcedir = os.fspath(Path(sourcedir).resolve())


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        ext_fullpath = Path.cwd() / self.get_ext_fullpath(ext.name)
        out_dir = ext_fullpath.parent.resolve()
        cfg = "Debug" if int(os.environ.get("DEBUG", 0)) else "Release"
        cmake_args = [
            f"-DROBAYES_EXT_OUTPUT_DIR={out_dir}",
            f"-DPython3_EXECUTABLE={sys.executable}",
            f"-DCMAKE_BUILD_TYPE={cfg}",
            "-DROBAYES_BUILD_TESTS=OFF",
            "-DROBAYES_BUILD_CLI=OFF",
            "-DROBAYES_BUILD_PYTHON=ON",
        ]
        build_temp = Path(self.build_temp) / "cmake"
        build_temp.mkdir(parents=True, exist_ok=True)
        subprocess.run(
            ["cmake", ext.sourcedir, *cmake_args], cwd=build_temp, check=True
        )
        subprocess.run(
            ["cmake", "--build", ".", "--target", "_core", "-j"],
            cwd=build_temp,
            check=True,
        )


setup(
    ext_modules=[CMakeExtension("robayes._core")],
    cmdclass={"build_ext": CMakeBuild},
)
