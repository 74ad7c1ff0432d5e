from setuptools import Extension, setup

# The compiled kernels are optional: the package falls back to the numpy
# implementations in dyadicproj._core_py when the extension is missing.
try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "dyadicproj._core",
                ["src/dyadicproj/_core.pyx"],
                # -ffp-contract=off keeps pair predicates bit-identical to the
                # numpy fallback (no FMA contraction of x*x + y*y).
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
