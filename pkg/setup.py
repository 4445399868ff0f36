from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "bridgelaw._kernel",
                ["src/bridgelaw/_kernel.pyx"],
                # -ffp-contract=off: no FMA contraction, so the compiled
                # kernel is bit-identical to the pure-Python twin.
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        language_level=3,
    )
except ImportError:
    # The package still works without the compiled core: a pure-Python
    # twin of the kernel is selected at import time.
    extensions = []

setup(ext_modules=extensions)
