from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

# The compiled kernels are an optional accelerator; the package falls back
# to the numpy implementation when the extension is absent.
extensions = [
    Extension(
        "cadnet.nn._ckernels",
        ["src/cadnet/nn/_ckernels.pyx"],
        extra_compile_args=["-O3", "-march=native"],
    )
]

setup(ext_modules=cythonize(extensions, language_level=3) if cythonize else [])
