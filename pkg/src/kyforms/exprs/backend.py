"""Evaluator backend selection.

The compiled Cython kernel is preferred; the numpy fallback is used when the
extension is missing or when KYFORMS_BACKEND=python is set.  Both execute
identical instruction tapes, so verdicts do not depend on the backend.
"""
from __future__ import annotations

import os

_choice = os.environ.get("KYFORMS_BACKEND", "auto")

if _choice not in ("auto", "compiled", "python"):
    raise RuntimeError(f"KYFORMS_BACKEND must be auto|compiled|python, got {_choice!r}")

if _choice in ("auto", "compiled"):
    try:
        from ._speval import BACKEND, eval_tape  # noqa: F401
    except ImportError:
        if _choice == "compiled":
            raise
        from ._pyeval import BACKEND, eval_tape  # noqa: F401
else:
    from ._pyeval import BACKEND, eval_tape  # noqa: F401


def active_backend() -> str:
    return BACKEND
