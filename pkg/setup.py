"""
consensus-lab

Stability analysis, critical network size sweeps and simulation of n-th order
distributed consensus on weighted directed graphs.

Install using

    pip install consensus-lab

Find usage instructions in the README and the documentation in ``docs/``.
"""
import re

from setuptools import find_packages, setup

PACKAGE_NAME = "consensus-lab"
DESCRIPTION = (
    "Routh-Hurwitz stability, critical network size and simulation of "
    "higher-order consensus on weighted digraphs"
)
KEYWORDS = [
    "consensus",
    "multi-agent systems",
    "graph laplacian",
    "routh hurwitz",
    "algebraic connectivity",
]
AUTHOR = "consensus-lab developers"
LICENSE = "3-Clause BSD License"
CLASSIFIERS = [
    "Development Status :: 4 - Beta",
    "Intended Audience :: Science/Research",
    "License :: OSI Approved :: BSD License",
    "Operating System :: OS Independent",
    "Programming Language :: Python :: 3.8",
    "Programming Language :: Python :: 3.9",
    "Programming Language :: Python :: 3.10",
    "Topic :: Scientific/Engineering :: Mathematics",
]
REQUIREMENTS_INSTALL = [
    "numpy>=1.20",
    "scipy>=1.8",
    "pandas>=1.5",
    "networkx>=2.5",
    "pandas-datapackage-reader",
    "PyYAML",
]
REQUIREMENTS_PLOTS = ["matplotlib"]
REQUIREMENTS_TESTS = [
    "pytest>=6",
    "pytest-benchmark",
    "pytest-cov",
    "pytest-mock",
    "pytest-xdist",
    "goodtables",
]
REQUIREMENTS_DOCS = [
    "sphinx>2.1",
    "sphinx_rtd_theme",
    "sphinx-autodoc-typehints",
]
REQUIREMENTS_DEPLOY = ["setuptools>=38.6.0", "twine>=1.11.0", "wheel>=0.31.0"]
REQUIREMENTS_DEV = (
    [
        "bandit",
        "black",
        "flake8",
        "isort>=5",
        "mypy",
        "pydocstyle",
        "pylint",
    ]
    + REQUIREMENTS_PLOTS
    + REQUIREMENTS_TESTS
    + REQUIREMENTS_DOCS
    + REQUIREMENTS_DEPLOY
)

README = "README.rst"

REQUIREMENTS_EXTRAS = {
    "plots": REQUIREMENTS_PLOTS,
    "docs": REQUIREMENTS_DOCS,
    "tests": REQUIREMENTS_TESTS,
    "deploy": REQUIREMENTS_DEPLOY,
    "dev": REQUIREMENTS_DEV,
}

PACKAGE_DATA = {"consensus_lab": ["definitions/*.csv", "definitions/*.json"]}


def _readme_section(name):
    """Lines of README between the ``sec-begin-<name>`` and ``sec-end-<name>`` markers"""
    with open(README, "r", encoding="utf-8") as f:
        text = f.read()

    section = re.search(
        r"^\.\. sec-begin-{0}\n(.*?)^\.\. sec-end-{0}$".format(name), text, re.M | re.S
    )
    return section.group(1).splitlines()


README_LINES = ["consensus-lab", "=============", ""] + _readme_section(
    "long-description"
)

with open("consensus_lab/_version.py", "r", encoding="utf-8") as f:
    VERSION = re.search(r'^__version__ = "(.+)"$', f.read(), re.M).group(1)

setup(
    name=PACKAGE_NAME,
    version=VERSION,
    description=DESCRIPTION,
    long_description="\n".join(README_LINES),
    long_description_content_type="text/x-rst",
    author=AUTHOR,
    license=LICENSE,
    keywords=KEYWORDS,
    classifiers=CLASSIFIERS,
    packages=find_packages(exclude=["tests"]),
    package_data=PACKAGE_DATA,
    include_package_data=True,
    python_requires=">=3.8",
    install_requires=REQUIREMENTS_INSTALL,
    extras_require=REQUIREMENTS_EXTRAS,
    entry_points={"console_scripts": ["consensus-lab = consensus_lab.cli:main"]},
)
