#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
# netroute documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.

import sys
import os

# Document the package from the source tree.
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

import netroute

# -- General configuration ------------------------------------------------

extensions = [
    'recommonmark',
    'sphinx.ext.autodoc',
    'sphinx.ext.doctest',
    # Add a .nojekyll file required for hosting files with a leading '_' on github-pages.
    # https://help.github.com/en/articles/files-that-start-with-an-underscore-are-missing
    'sphinx.ext.githubpages',
    'sphinx.ext.intersphinx',
]

intersphinx_mapping = {
    'python': ('https://docs.python.org/3', None),
    'numpy': ('https://numpy.org/doc/stable/', None),
}

source_suffix = {
    '.rst': 'restructuredtext',
    '.md': 'markdown',
}

# numpy's docs do not index every name used in the parameter docs.
nitpick_ignore = [
    ('py:class', 'numpy.ndarray'),
    ('py:class', 'numpy.random.Generator'),
]

templates_path = ['_templates']

suppress_warnings = ['image.nonlocal_uri']

master_doc = 'index'

project = 'netroute'
copyright = '2026-, Kodda Labs, Inc.'
author = 'Chad Ongstad'

version = '.'.join(str(ver) for ver in netroute.version_info[:2])
release = '.'.join(str(ver) for ver in netroute.version_info)

language = 'en'

exclude_patterns = ['_build']

pygments_style = 'sphinx'

todo_include_todos = False

# -- Options for HTML output ----------------------------------------------

on_rtd = os.environ.get('READTHEDOCS', None) == 'True'

if not on_rtd:  # only import and set the theme if we're building docs locally
    html_theme = 'sphinx_rtd_theme'

htmlhelp_basename = 'netroutedoc'

# -- Options for LaTeX output ---------------------------------------------

latex_elements = {
}

latex_documents = [
  (master_doc, 'netroute.tex', 'netroute Documentation',
   'Chad Ongstad', 'manual'),
]

# -- Options for manual page output ---------------------------------------

man_pages = [
    (master_doc, 'netroute', 'netroute Documentation',
     [author], 1)
]

# -- Options for Texinfo output -------------------------------------------

texinfo_documents = [
  (master_doc, 'netroute', 'netroute Documentation',
   author, 'netroute', 'Single-net routing with a fully convolutional network.',
   'Miscellaneous'),
]
