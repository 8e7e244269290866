# -*- coding: utf-8 -*-
"""
Sphinx settings for the ShiftLab API reference.

Build with ``sphinx-build -b html docs docs/_build`` after installing the
``docs`` extra.
"""
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from ShiftLab.pkg_info import __version__  # noqa: E402

# ================================== PROJECT ===================================

project = 'ShiftLab'
author = 'ShiftLab contributors'
copyright = 'ShiftLab contributors'
release = __version__
version = '.'.join(__version__.split('.')[:2])

# ================================= EXTENSIONS =================================

extensions = [
    'autodocsumm',
    'sphinx.ext.autodoc',
    'sphinx.ext.autosummary',
    'sphinx.ext.intersphinx',
    'sphinx.ext.mathjax',
    'sphinx.ext.napoleon',
    'sphinxawesome_theme',
]

intersphinx_mapping = {
    'python': ('https://docs.python.org/3', None),
    'numpy': ('https://numpy.org/doc/stable/', None),
    'scipy': ('https://docs.scipy.org/doc/scipy/', None),
}

autodoc_default_options = {
    'autosummary': True,
    'members': True,
    'member-order': 'bysource',
}
autodoc_typehints = 'description'
autosummary_generate = True
napoleon_google_docstring = True
napoleon_numpy_docstring = False

rst_prolog = '.. |version_str| replace:: v{}\n'.format(release)

master_doc = 'index'
language = 'en'
exclude_patterns = ['_build']

# ==================================== HTML ====================================

html_theme = 'sphinxawesome_theme'
html_title = 'ShiftLab {}'.format(release)
html_show_sphinx = False
html_copy_source = False
html_theme_options = {
    'show_prev_next': True,
    'show_scrolltop': True,
}
