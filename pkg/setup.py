#!/usr/bin/env python3
"""
Setup script for weakvalue, the exact Stern-Gerlach weak-measurement toolkit
"""

from pathlib import Path

from setuptools import find_packages, setup

from src import __description__, __version__

readme = Path(__file__).parent / "README.md"

setup(
    name="weakvalue",
    version=__version__,
    description=__description__,
    long_description=readme.read_text() if readme.exists() else __description__,
    long_description_content_type="text/markdown",
    packages=find_packages(include=["src", "src.*"]),
    py_modules=["main"],
    python_requires=">=3.8",
    install_requires=[
        "numpy>=1.22",
        "scipy>=1.9",
    ],
    extras_require={
        "test": ["pytest>=7"],
    },
    entry_points={
        "console_scripts": [
            "weakvalue=main:main",
        ],
    },
)
