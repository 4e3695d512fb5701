"""Build the optional compiled kernels.

The package works without them: ``memline._backend`` falls back to the
pure-Python loops when ``memline._ckernels`` cannot be imported.  Set
``MEMLINE_NO_EXT=1`` to skip the extension build entirely.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("MEMLINE_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "memline._ckernels",
                    ["src/memline/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    # no FMA contraction: results must match the Python loops bit for bit
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
