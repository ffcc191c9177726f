#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
opcalc: exact homological algebra of operads with multiplication.
Validates endomorphism operads of finite-dimensional algebras, their
modules and Cartan calculi, and computes Hochschild and cyclic
(co)homology together with their Gerstenhaber, BV and cyclic brackets.
"""

import logging

__version__ = "0.1.0"
__author__ = "opcalc developers"

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    handlers=[logging.StreamHandler()]
)


def load_instance(path, field=None, n_max=5):
    """Algebra, its endomorphism operad (cyclic when a form is given) and the normalized operad."""
    from opcalc.runner import Instance
    return Instance.load(path, field, n_max)
