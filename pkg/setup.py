from setuptools import Extension, setup
from Cython.Build import cythonize

setup(
    ext_modules=cythonize(
        [
            Extension(
                "accept._spentset",
                ["src/accept/_spentset.pyx"],
                extra_compile_args=["-O2"],
            )
        ],
        language_level=3,
    )
)
