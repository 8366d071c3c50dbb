"""Odometers, Toeplitz arrays and invariant measures over free and free-abelian groups."""

import json
from fractions import Fraction

from ._core import Chain, Error, Group, Subgroup, ToeplitzSpec, factor_between
from ._core import run as _run

__all__ = [
    "Chain",
    "Error",
    "Group",
    "Subgroup",
    "ToeplitzSpec",
    "eigenvalues",
    "factor_between",
    "haar_cylinder",
    "run",
]


def _frac(pair):
    return Fraction(pair[0], pair[1])


def eigenvalues(chain, n):
    """Characters trivial on level n, as tuples of Fractions, plus the free rank."""
    chars, free_rank = chain.eigenvalues(n)
    return [tuple(_frac(q) for q in chi) for chi in chars], free_rank


def haar_cylinder(chain, n):
    return _frac(chain.haar_cylinder(n))


def run(config, verb="all", out=""):
    """Run a CLI verb on a config file. Returns (exit_code, report body as dict)."""
    code, body = _run(str(config), verb, str(out))
    return code, json.loads(body)
