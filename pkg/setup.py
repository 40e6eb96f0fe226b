"""Build script: compiles the optional fast tape evaluator.

The package is fully functional without the extension (a numpy fallback is
selected at import time), so a failed Cython/C build only costs speed.
"""
from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/kyforms/exprs/_speval.pyx",
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except Exception as exc:  # pragma: no cover - build environment dependent
    print(f"kyforms: skipping compiled evaluator ({exc}); pure fallback will be used")

setup(ext_modules=ext_modules)
