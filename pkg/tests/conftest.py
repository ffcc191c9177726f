#!/usr/bin/env python
# -*- coding: utf-8 -*-

import itertools
import os
import sys

import numpy as np
import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
CORPUS = os.path.join(ROOT, "corpus")

if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from opcalc.exact_linalg import rank  # noqa: E402
from opcalc.runner import Instance  # noqa: E402


def corpus_path(name):
    return os.path.join(CORPUS, f"{name}.json")


def load_instance(name, n_max, field=None):
    return Instance.load(corpus_path(name), field, n_max)


def bar_boundary(alg, n):
    """Hochschild b: A^{⊗ n+1} -> A^{⊗ n} written from the bar formula."""
    d, mul = alg.dim, alg.mul
    src = list(itertools.product(range(d), repeat=n + 1))
    index = {t: k for k, t in enumerate(itertools.product(range(d), repeat=n))}
    out = np.zeros((d ** n, len(src)), dtype=object)
    for col, a in enumerate(src):
        for i in range(n):
            for k in range(d):
                c = mul[a[i], a[i + 1], k]
                if c:
                    out[index[a[:i] + (k,) + a[i + 2:]], col] += (-1) ** i * c
        for k in range(d):
            c = mul[a[n], a[0], k]
            if c:
                out[index[(k,) + a[1:n]], col] += (-1) ** n * c
    return out


def bar_hochschild_dims(alg, top):
    """dim HH_n(A) for n < top without any operad machinery."""
    d, f = alg.dim, alg.field
    ranks = {0: 0}
    for n in range(1, top + 1):
        ranks[n] = rank(bar_boundary(alg, n), f)
    return [d ** (n + 1) - ranks[n] - ranks[n + 1] for n in range(top)]


@pytest.fixture(scope="module")
def q2():
    return load_instance("q", 2)


@pytest.fixture(scope="module")
def dual2():
    return load_instance("dualnumbers", 2)


@pytest.fixture(scope="module")
def dual3():
    return load_instance("dualnumbers", 3)


@pytest.fixture(scope="module")
def qxq3():
    return load_instance("qxq", 3)


@pytest.fixture(scope="module")
def q3():
    return load_instance("q", 3)
