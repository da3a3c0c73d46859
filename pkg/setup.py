import os
import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Build the compiled kernels if possible, fall back to pure Python."""

    def run(self):
        try:
            super().run()
        except Exception as exc:
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        sys.stderr.write(
            "warning: compiled kernels unavailable, installing pure-Python "
            f"fallback only ({exc})\n"
        )


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    if not os.path.exists("src/nckit/_kernel/_ckernel.pyx"):
        return []
    return cythonize(
        [Extension("nckit._kernel._ckernel", ["src/nckit/_kernel/_ckernel.pyx"])],
        compiler_directives={"language_level": "3"},
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
