""" setup.py - Distutils setup file for pyctc2d package

    the pyctc2d developers
    March 2, 2026
"""

from setuptools import setup, find_packages
import pyctc2d

setup(
    name="pyctc2d",
    version=pyctc2d.__version__,
    packages=find_packages(exclude=["tests", "examples*"]),
    include_package_data=True,
    package_data={"pyctc2d": ["configs/*.yaml"]},
    license="BSD",
    description="Two dimensional connectionist temporal classification (2D CTC) loss and decoding, written in Python.",
    long_description=open("README.md").read(),
    long_description_content_type="text/markdown",
    author="the pyctc2d developers",
    python_requires=">=3.7",
    install_requires=[
        "numpy>=1.17",
        "scipy",
        "traits",
        "pyyaml",
    ],
    extras_require={
        "test": ["pytest", "pytest-cov", "hypothesis"],
    },
    entry_points={
        "console_scripts": [
            "pyctc2d = pyctc2d.cli:main",
        ]
    },
    keywords=["ctc", "scene text", "sequence recognition", "loss"],
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Environment :: Console",
        "Intended Audience :: Developers",
        "Intended Audience :: Education",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: BSD License",
        "Operating System :: OS Independent",
        "Programming Language :: Python",
        "Programming Language :: Python :: 3.7",
        "Topic :: Scientific/Engineering",
        "Topic :: Scientific/Engineering :: Artificial Intelligence",
        "Topic :: Scientific/Engineering :: Image Recognition",
        "Topic :: Utilities"
    ],
)
