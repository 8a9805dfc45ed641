# -*- coding: utf-8 -*-
#
# Configuration file for the Sphinx documentation builder.
#
# Only a selection of the most common options is set here. For a full list see
# the documentation: http://www.sphinx-doc.org/en/master/config

# -- Path setup --------------------------------------------------------------

import os
import re
import sys

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, ROOT)

with open(os.path.join(ROOT, "consensus_lab", "_version.py"), encoding="utf-8") as f:
    _VERSION = re.search(r'^__version__ = "(.+)"$', f.read(), re.M).group(1)

# -- Project information -----------------------------------------------------

project = "consensus-lab"
copyright = "consensus-lab developers"
author = "consensus-lab developers"

# The short X.Y version
version = _VERSION
# The full version, including alpha/beta/rc tags
release = version

# -- General configuration ---------------------------------------------------

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.autosummary",
    "sphinx.ext.coverage",
    "sphinx.ext.intersphinx",
    "sphinx.ext.mathjax",
    "sphinx.ext.viewcode",
    "sphinx.ext.napoleon",
    "sphinx_autodoc_typehints",
]

autodoc_default_options = {
    "members": None,
    "show-inheritance": None,
    "undoc-members": None,
}

templates_path = ["templates"]
source_suffix = ".rst"
master_doc = "index"
language = "en"
exclude_patterns = ["build", "Thumbs.db", ".DS_Store"]
pygments_style = "sphinx"

# -- Options for HTML output -------------------------------------------------

html_theme = "sphinx_rtd_theme"
htmlhelp_basename = "consensus-labdoc"

# -- Options for LaTeX output ------------------------------------------------

latex_documents = [
    (master_doc, "consensus-lab.tex", "consensus-lab Documentation", author, "manual")
]

# -- Options for manual page output ------------------------------------------

man_pages = [(master_doc, "consensus-lab", "consensus-lab Documentation", [author], 1)]

# -- Extension configuration -------------------------------------------------

coverage_write_headline = False  # do not write headlines.

intersphinx_mapping = {
    "networkx": ("https://networkx.org/documentation/stable", None),
    "numpy": ("https://numpy.org/doc/stable", None),
    "pandas": ("https://pandas.pydata.org/pandas-docs/stable", None),
    "python": ("https://docs.python.org/3", None),
    "scipy": ("https://docs.scipy.org/doc/scipy", None),
}

napoleon_google_docstring = False
napoleon_numpy_docstring = True
set_type_checking_flag = False
