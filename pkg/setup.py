"""Build script: compiles the optional rasterizer kernel.

The package works without the compiled extension (a numpy fallback is
selected at import), so any build failure here downgrades to a warning
instead of aborting the install.
"""

import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # missing compiler etc.
            print(f"warning: compiled kernels skipped ({exc}); "
                  "falling back to pure Python", file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: {ext.name} skipped ({exc}); "
                  "falling back to pure Python", file=sys.stderr)


def extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "aav._kernels._rasterize",
        ["src/aav/_kernels/_rasterize.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        # -O2 without -ffast-math: the fallback kernel must stay bit-identical
        extra_compile_args=["-O2"],
    )
    return cythonize([ext], language_level=3)


setup(
    ext_modules=extensions(),
    cmdclass={"build_ext": optional_build_ext},
)
