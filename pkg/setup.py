import numpy as np
from setuptools import Extension, setup
from Cython.Build import cythonize

ext = Extension(
    "netopinion._core",
    ["src/netopinion/_core.pyx"],
    include_dirs=[np.get_include()],
    # -ffp-contract=off keeps the compiled kernels bit-identical to the
    # numpy fallback (no FMA contraction).
    extra_compile_args=["-O3", "-ffp-contract=off"],
    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
)

setup(ext_modules=cythonize([ext], language_level=3))
