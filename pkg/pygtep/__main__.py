# -*- coding: utf-8 -*-
"""Entry point of ``python -m pygtep``."""
from pygtep.cli import run

if __name__ == "__main__":
    run()
