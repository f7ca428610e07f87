"""Build hook for the optional compiled kernel extension.

The package is pure Python plus one Cython extension holding the hot
per-cell field kernels.  If the extension cannot be built the install
still succeeds and the numpy fallback is used at import time.
"""
import sys

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "su11_phase_lab._kernels_cy",
                ["src/su11_phase_lab/_kernels_cy.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    sys.stderr.write(f"su11-phase-lab: skipping compiled kernels ({exc})\n")

setup(ext_modules=ext_modules)
