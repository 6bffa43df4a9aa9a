"""Consistency checking of conditional-independence statements and checked PC runs.

Statements are dicts ``{"x": [...], "y": [...], "z": [...], "independent": bool}``
over variable names, the same records the command-line tool reads as JSONL.
"""

import json

from . import _cicheck
from ._cicheck import ParseError, SolverConfigError, ValidationError

__all__ = [
    "ParseError",
    "SolverConfigError",
    "ValidationError",
    "check",
    "chi2_test",
    "d_separated",
    "emit_smtlib",
    "generate",
    "run_pc",
]


def _jsonl(statements):
    if isinstance(statements, str):
        return statements
    return "".join(json.dumps(s, separators=(",", ":")) + "\n" for s in statements)


def _dag_json(dag):
    return dag if isinstance(dag, str) else json.dumps(dag)


def check(statements, *, o1=True, o2=True, witness=True, o3=True, full=True, timeout_ms=60000, solver=None):
    """Decide whether the statements are jointly consistent. Returns verdict and trace."""
    return json.loads(_cicheck.check(_jsonl(statements), o1, o2, witness, o3, full, timeout_ms, solver))


def emit_smtlib(statements, form="standard"):
    return _cicheck.emit_smtlib(_jsonl(statements), form)


def d_separated(dag, x, y, z=()):
    """dag: {"n", "names", "edges"} (or its JSON text); x, y, z: lists of names."""
    return _cicheck.d_separated(_dag_json(dag), list(x), list(y), list(z))


def generate(n, p=0.4, alpha=1.0, m=1000, seed=0, card=2):
    """Random network, its DAG and a forward-sampled dataset (CSV text)."""
    out = _cicheck.generate(n, p, alpha, m, seed, card)
    return {"network": json.loads(out["network"]), "dag": json.loads(out["dag"]), "csv": out["csv"]}


def run_pc(dag, checker="off", ed_policy="abort", inject=None, seed=0, max_order=-1):
    """PC with a perfect oracle for `dag`, optionally checked and with injected errors."""
    return json.loads(_cicheck.run_pc(_dag_json(dag), checker, ed_policy, inject or "", seed, max_order))


def chi2_test(csv, x, y, z=(), alpha=0.05):
    return _cicheck.chi2_test(csv, list(x), list(y), list(z), alpha)
