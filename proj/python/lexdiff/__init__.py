"""Semantic comparison of legal-provision formalizations.

Documents may be passed as JSON text or as already-decoded dicts.
"""

import json as _json

from . import _lexdiff
from ._lexdiff import LexdiffError

__all__ = [
    "LexdiffError",
    "analyze_pair",
    "check_formalization",
    "jaccard",
    "representatives",
    "spearman",
]


def _text(doc):
    return doc if isinstance(doc, str) else _json.dumps(doc)


def check_formalization(doc):
    """Structural violations of a formalization, e.g. ``["Cycle(r)"]``."""
    return _lexdiff.check_formalization(_text(doc))


def analyze_pair(formalizations, matching, tree_a, tree_b, cap=None):
    """Interface, equivalence and edge-case cover of one pair."""
    args = [[_text(f) for f in formalizations], _text(matching), tree_a, tree_b]
    if cap is not None:
        args.append(cap)
    return _json.loads(_lexdiff.analyze_pair(*args))


def representatives(formalizations, matching, **options):
    """Representative edge cases over every pair of the provision."""
    docs = [_text(f) for f in formalizations]
    return _json.loads(_lexdiff.representatives(docs, _text(matching), **options))


def jaccard(matchings, formalizations):
    """Agreement of repeated matching runs; None when undefined."""
    return _lexdiff.jaccard([_text(m) for m in matchings], [_text(f) for f in formalizations])


def spearman(xs, ys):
    """Rank correlation with average ranks for ties; None for constant input."""
    return _lexdiff.spearman(list(xs), list(ys))
