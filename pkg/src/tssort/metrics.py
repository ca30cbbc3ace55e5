"""Edge-level confusion counts and F1 between binary graph stacks."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import ShapeMismatch

EVAL_MODES = ("overall", "contemp", "lagged", "summary")


def f1_score(tp: int, fp: int, fn: int) -> float:
    if tp == 0 and fp == 0 and fn == 0:
        return 1.0
    return tp / (tp + 0.5 * (fp + fn))


@dataclass(frozen=True)
class EvalReport:
    mode: str
    tp: int
    fp: int
    fn: int

    @property
    def f1(self) -> float:
        return f1_score(self.tp, self.fp, self.fn)

    def to_dict(self) -> dict:
        return {**asdict(self), "f1": self.f1}


def _as_stack(x) -> np.ndarray:
    a = np.asarray(x) != 0
    if a.ndim == 2:
        a = a[None]
    if a.ndim != 3 or a.shape[1] != a.shape[2]:
        raise ShapeMismatch(f"expected (lags, d, d) or (d, d), got {np.shape(x)}")
    return a


def _counts(est, truth, mode):
    tp = int(np.sum(est & truth))
    fp = int(np.sum(est & ~truth))
    fn = int(np.sum(~est & truth))
    return EvalReport(mode, tp, fp, fn)


def evaluate(est, truth, mode: str = "overall", summary_diagonal: bool = False) -> EvalReport:
    """Compare boolean stacks indexed ``[lag, src, dst]``.

    A 2-D input is treated as a single slice; in summary mode that is the
    summary adjacency itself. Summary mode ignores the diagonal unless
    ``summary_diagonal`` is set.
    """
    if mode not in EVAL_MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {EVAL_MODES}")
    e, t = _as_stack(est), _as_stack(truth)
    if e.shape[1] != t.shape[1]:
        raise ShapeMismatch(f"node counts differ: {e.shape[1]} vs {t.shape[1]}")
    if mode == "summary":
        es, ts = e.any(axis=0), t.any(axis=0)
        if not summary_diagonal:
            off = ~np.eye(es.shape[0], dtype=bool)
            es, ts = es[off], ts[off]
        return _counts(es, ts, mode)
    if e.shape != t.shape:
        raise ShapeMismatch(f"stack shapes differ: {e.shape} vs {t.shape}")
    if mode == "contemp":
        return _counts(e[0], t[0], mode)
    if mode == "lagged":
        return _counts(e[1:], t[1:], mode)
    return _counts(e, t, mode)


def evaluate_all(est, truth, modes=EVAL_MODES) -> dict[str, EvalReport]:
    return {m: evaluate(est, truth, m) for m in modes}
