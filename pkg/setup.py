"""Build script.

The integrator hot loop ships as an optional Cython extension
(rotorlab._kernels._midpoint).  If Cython or a C compiler is missing the
build silently degrades to the pure-Python kernel; the package selects the
backend at import time, so both installs behave identically apart from speed.
"""

from setuptools import setup
from setuptools.command.build_ext import build_ext


def extensions():
    try:
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        return []
    return cythonize(
        [
            Extension(
                "rotorlab._kernels._midpoint",
                ["src/rotorlab/_kernels/_midpoint.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )


class optional_build_ext(build_ext):
    """Give up on compiler errors instead of failing the whole install."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001 - any build failure is non-fatal
            print(f"compiled kernel skipped ({exc}); using pure-Python fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            print(f"compiled kernel skipped ({exc}); using pure-Python fallback")


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
