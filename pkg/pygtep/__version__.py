# -*- coding: utf-8 -*-
"""Metadata of the package."""

__title__ = "pygtep"
__description__ = "Two-stage stochastic expansion planning of coupled electricity and gas systems."
__url__ = "https://github.com/pygtep/pygtep.git"
__version__ = "0.1.0"
__author__ = "The pygtep developers"
__author_email__ = "pygtep@users.noreply.github.com"
__license__ = "LGPL-3.0-or-later"
__copyright__ = "2024 The pygtep developers"
