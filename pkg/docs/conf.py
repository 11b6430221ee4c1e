#
# optimal-cbf documentation build configuration file.
#
# This file is execfile()d with the current directory set to its containing dir.

import os
import sys
from datetime import date

try:
    import sphinx_rtd_theme
except ImportError:
    sphinx_rtd_theme = False

sys.path.insert(0, os.path.abspath(".."))  # noqa

# -- General configuration -----------------------------------------------------

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.autosummary",
    "sphinx.ext.napoleon",
    "sphinx.ext.mathjax",
]

templates_path = ["_templates"]
source_suffix = ".rst"
master_doc = "index"

project = "optimal-cbf"
copyright = "2023-{0}, optimal-cbf contributors".format(date.today().year)

# The short X.Y version and the full version, including alpha/beta/rc tags.
version = "0.1.0a1.dev"
release = "0.1.0a1.dev"

exclude_patterns = ["_build"]
pygments_style = "sphinx"

autodoc_default_options = {"members": True, "undoc-members": True}
autodoc_member_order = "groupwise"
autoclass_content = "both"
autodoc_mock_imports = ["matplotlib"]

# -- Options for HTML output ---------------------------------------------------

html_theme = "sphinx_rtd_theme" if sphinx_rtd_theme else "default"
htmlhelp_basename = "OptimalCbfDocs"

napoleon_use_ivar = True
default_domain = "py"
