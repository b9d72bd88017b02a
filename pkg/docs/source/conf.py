# Configuration file for the Sphinx documentation builder.
#
# https://www.sphinx-doc.org/en/master/usage/configuration.html
from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path("../..").resolve()))

import bhinfer  # noqa: E402

# -- Project information -----------------------------------------------------

project = "bh-infer-tools"
_copyright = "2024, bh-infer-tools developers"
author = "bh-infer-tools developers"
release = bhinfer.__version__

# -- General configuration ---------------------------------------------------

extensions = [
    "sphinx.ext.napoleon",  # numpy-style docstrings
    "sphinx.ext.mathjax",
    "myst_parser",  # markdown pages
    "autoapi.extension",  # API section
    "sphinx_copybutton",
]

# -- sphinx-autoapi extension -----------------------------------------------
autoapi_type = "python"
autoapi_dirs = ["../../bhinfer"]
autoapi_ignore = ["*tests*"]
autoapi_python_class_content = "both"

exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]
html_static_path = ["_static"]
templates_path = ["_templates"]

default_role = "code"

# -- Options for HTML output -------------------------------------------------

html_theme = "pydata_sphinx_theme"
html_theme_options = {
    "logo": {
        "text": "bh-infer-tools documentation",
    },
}
html_context = {
    "default_mode": "light",
}

pygments_style = "friendly"
