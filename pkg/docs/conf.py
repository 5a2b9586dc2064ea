#!/usr/bin/env python
#
# nftcast documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.
import os
import sys

sys.path.insert(0, os.path.abspath("../src"))

# -- General configuration ---------------------------------------------

extensions = ["sphinx.ext.autodoc", "sphinx.ext.viewcode"]

templates_path = ["_templates"]

source_suffix = ".rst"

master_doc = "index"

project = "nftcast"
copyright = "2026, nftcast developers"
author = "nftcast developers"

language = "en"

exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]

pygments_style = "sphinx"

todo_include_todos = False

autodoc_member_order = "bysource"

# -- Options for HTML output -------------------------------------------

html_theme = "sphinx_rtd_theme"

htmlhelp_basename = "nftcastdoc"

# -- Options for LaTeX output ------------------------------------------

latex_documents = [(master_doc, "nftcast.tex", "nftcast Documentation", author, "manual")]

# -- Options for manual page output ------------------------------------

man_pages = [(master_doc, "nftcast", "nftcast Documentation", [author], 1)]
