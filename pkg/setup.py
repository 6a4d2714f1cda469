import os

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

# -ffp-contract=off keeps a*b+c unfused so the compiled kernels match the
# pure-Python fallback bit for bit.
extensions = [
    Extension(
        "intervalqs._ckernels",
        ["src/intervalqs/_ckernels.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O2", "-ffp-contract=off", "-fno-fast-math"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        optional=True,
    )
]

ext_modules = []
if cythonize is not None and not os.environ.get("INTERVALQS_PURE_PYTHON"):
    ext_modules = cythonize(extensions, compiler_directives={"language_level": "3"})

setup(ext_modules=ext_modules)
