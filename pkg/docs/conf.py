# Sphinx configuration for the forge documentation.
# Options reference: https://www.sphinx-doc.org/en/master/usage/configuration.html
from datetime import date
from pathlib import Path

from forge import MODULE_ROOT, PROGRAM_NAME, PROGRAM_OWNER_NAME, PROGRAM_OWNER_USER

project = PROGRAM_NAME
author = PROGRAM_OWNER_NAME
copyright = f"{date.today().year}, {author}"

# noinspection SpellCheckingInspection
extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.intersphinx",
    "sphinx.ext.mathjax",
    "sphinx.ext.inheritance_diagram",
    "sphinx_autodoc_typehints",
    "sphinx_rtd_theme",
    "autodocsumm",
]

exclude_patterns = ["_build", f"reference/{MODULE_ROOT}.rst"]

# API reference
# noinspection SpellCheckingInspection
autodoc_member_order = "groupwise"
# noinspection SpellCheckingInspection
autodoc_default_options = {
    "members": True,
    "show-inheritance": True,
    "autosummary": True,
}
typehints_defaults = "comma"
typehints_use_rtype = False
always_use_bars_union = True

intersphinx_mapping = {
    "python": ("https://docs.python.org/3", None),
    "numpy": ("https://numpy.org/doc/stable", None),
    "scipy": ("https://docs.scipy.org/doc/scipy", None),
}

suppress_warnings = ["sphinx_autodoc_typehints.forward_reference"]

# Inheritance diagrams for the processor and exception hierarchies
graphviz_output_format = "svg"
inheritance_graph_attrs = {"rankdir": "LR", "fontsize": 10}
inheritance_node_attrs = {"shape": "box", "fontname": "monospace", "fontsize": 9}

# HTML
html_theme = "sphinx_rtd_theme"
html_title = f"{project} documentation"
html_theme_options = {"navigation_depth": 3, "collapse_navigation": False}
html_context = {
    "display_github": True,
    "github_user": PROGRAM_OWNER_USER,
    "github_repo": MODULE_ROOT,
    "github_version": "HEAD",
    "conf_py_path": f"/{Path(__file__).parent.name}/",
}
