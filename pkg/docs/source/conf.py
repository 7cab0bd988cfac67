# -*- coding: utf-8 -*-
#
# pyctc2d documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.
#
# All configuration values have a default; values that are commented out
# serve to show the default.

import os
import sys

sys.path.insert(0, os.path.abspath("../.."))

# -- General configuration ------------------------------------------------

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.viewcode",
    "sphinx.ext.napoleon",
    "sphinx.ext.mathjax",
]

templates_path = ["_templates"]

source_suffix = [".rst", ".md"]

master_doc = "index"

# General information about the project.
project = u"pyctc2d"
copyright = u"2026, the pyctc2d developers"
author = u"the pyctc2d developers"

# The short X.Y version.
version = u"1.0"
# The full version, including alpha/beta/rc tags.
release = u"1.0.0"

language = None

exclude_patterns = ["../build", "Thumbs.db", ".DS_Store"]

pygments_style = "sphinx"

todo_include_todos = False

# -- Options for HTML output ----------------------------------------------

html_theme = "alabaster"

html_static_path = ["_static"]

htmlhelp_basename = "pyctc2ddoc"

# -- Options for LaTeX output ---------------------------------------------

latex_elements = {}

latex_documents = [(master_doc, "pyctc2d.tex", u"pyctc2d Documentation", author, "manual")]

# -- Options for manual page output ---------------------------------------

man_pages = [(master_doc, "pyctc2d", u"pyctc2d Documentation", [author], 1)]
