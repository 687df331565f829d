"""Standalone numeric inequalities backing the guarantee exponents.

Two parametric inequalities are checked, plus the supremum scan that pins
down the exponent cap:

* ``check_ineq_avg``: for a, b >= 0 and x, y >= 1 with a*x^p >= b*y^p
  (p = log2(3) - 1), it holds that a*x^p + 2*b*y^p <= (a+b)*(x+y)^p.
* ``check_ineq_2``: for a nondecreasing list a_1..a_l with a_i >= 1, l >= 2,
  and any p at least max over i in 2..l of log_i(2i-2), it holds that
  a_l^p + a_{l-1}^p + 2*(a_1^p + ... + a_{l-2}^p) <= (a_1 + ... + a_l)^p.
* ``alpha_sup``: log_i(2i-2) over i >= 2 is maximised at i = 4 with value
  log_4(6); the tail is dominated via 1 + 1/log2(i) < log_4(6) for i >= 11
  (base-2 logs -- the bound is false in other bases).

Inputs outside an inequality's hypothesis raise ``InapplicableSample`` (a
skip signal, distinct from a counterexample).  All exponents are ratios of
natural logs; verdicts allow a 1e-9 relative slack.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .metric_core import PreconditionError

__all__ = [
    "InapplicableSample",
    "IneqSample",
    "BatchIneqResult",
    "AlphaSupResult",
    "P_AVG",
    "ALPHA_CAP",
    "ineq2_threshold",
    "check_ineq_avg",
    "check_ineq_2",
    "alpha_sup",
    "sample_ineq_avg",
    "sample_ineq_2",
]

P_AVG = math.log(3) / math.log(2) - 1
ALPHA_CAP = math.log(6) / math.log(4)
TAU_INEQ = 1e-9


class InapplicableSample(Exception):
    """The inputs violate the inequality's hypothesis: skip, not a failure."""


@dataclass(frozen=True)
class IneqSample:
    inputs: dict
    lhs: float
    rhs: float
    holds: bool
    slack: float          # rhs - lhs; negative beyond tolerance => failure

    def to_row(self) -> dict:
        row = {f"in_{k}": v for k, v in self.inputs.items()}
        row.update(lhs=self.lhs, rhs=self.rhs, holds=self.holds, slack=self.slack)
        return row


def _verdict(inputs: dict, lhs: float, rhs: float, tol: float) -> IneqSample:
    holds = lhs <= rhs + tol * max(abs(lhs), abs(rhs))
    return IneqSample(inputs=inputs, lhs=lhs, rhs=rhs, holds=holds,
                      slack=rhs - lhs)


def check_ineq_avg(a: float, b: float, x: float, y: float,
                   tol: float = TAU_INEQ) -> IneqSample:
    """One sample of the averaged-weight inequality at p = log2(3) - 1."""
    if a < 0 or b < 0:
        raise PreconditionError("a and b must be nonnegative")
    if x < 1 or y < 1:
        raise PreconditionError("x and y must be at least 1")
    if a * x ** P_AVG < b * y ** P_AVG:
        raise InapplicableSample(
            f"hypothesis a*x^p >= b*y^p fails: {a * x ** P_AVG!r} < {b * y ** P_AVG!r}"
        )
    lhs = a * x ** P_AVG + 2 * b * y ** P_AVG
    rhs = (a + b) * (x + y) ** P_AVG
    return _verdict({"a": a, "b": b, "x": x, "y": y}, lhs, rhs, tol)


def ineq2_threshold(length: int) -> float:
    """max over i in 2..length of log_i(2i-2): 1, then log_3(4), then log_4(6)."""
    if length < 2:
        raise PreconditionError("need length >= 2")
    if length == 2:
        return 1.0
    if length == 3:
        return math.log(4) / math.log(3)
    return ALPHA_CAP


def check_ineq_2(a, p: float, tol: float = TAU_INEQ) -> IneqSample:
    """One sample of the sorted-list inequality at exponent p."""
    a = list(a)
    if len(a) < 2:
        raise PreconditionError("need at least two values")
    if any(v < 1 for v in a):
        raise PreconditionError("all values must be at least 1")
    if any(a[i] > a[i + 1] for i in range(len(a) - 1)):
        raise PreconditionError("values must be nondecreasing")
    if p < ineq2_threshold(len(a)):
        raise InapplicableSample(
            f"p={p!r} is below the exponent threshold {ineq2_threshold(len(a))!r}"
        )
    lhs = a[-1] ** p + a[-2] ** p + 2 * math.fsum(v ** p for v in a[:-2])
    rhs = math.fsum(a) ** p
    return _verdict({"a": tuple(a), "p": p}, lhs, rhs, tol)


@dataclass(frozen=True)
class AlphaSupResult:
    i_max: int
    argmax: int
    value: float
    tail_ok: bool


def alpha_sup(i_max: int) -> AlphaSupResult:
    """Scan log_i(2i-2) for 2 <= i <= i_max and dominate the tail.

    Returns the maximiser (expected: 4), the supremum (log_4(6)), and whether
    the tail domination 1 + 1/log2(i) < log_4(6) held for all 11 <= i <= i_max.
    """
    if i_max < 4:
        raise PreconditionError("need i_max >= 4 to see the maximiser")
    i = np.arange(2, i_max + 1, dtype=np.float64)
    vals = np.log(2 * i - 2) / np.log(i)
    argmax = int(i[int(np.argmax(vals))])
    value = float(vals.max())
    tail_ok = True
    if i_max >= 11:
        j = np.arange(11, i_max + 1, dtype=np.float64)
        tail_ok = bool(np.all(1.0 + 1.0 / np.log2(j) < ALPHA_CAP))
    return AlphaSupResult(i_max=i_max, argmax=argmax, value=value, tail_ok=tail_ok)


@dataclass
class BatchIneqResult:
    name: str
    samples: int
    failures: list[IneqSample] = field(default_factory=list)
    extremes: list[IneqSample] = field(default_factory=list)
    min_rel_slack: float = math.inf

    @property
    def ok(self) -> bool:
        return not self.failures


def sample_ineq_avg(n_samples: int, seed: int = 0, tol: float = TAU_INEQ,
                    n_extremes: int = 10) -> BatchIneqResult:
    """Vectorised batch of admissible averaged-weight samples.

    Draws (a, b) >= 0 and (x, y) >= 1 over mixed scales and swaps the pairs
    wherever needed so the hypothesis holds, so every drawn sample counts.
    Every 100th sample probes the symmetric near-equality region a=b, x=y.
    """
    if n_samples < 1:
        raise PreconditionError("n_samples must be positive")
    rng = np.random.default_rng(seed)
    a = rng.uniform(0.0, 10.0, n_samples) * 10.0 ** rng.integers(-2, 3, n_samples)
    b = rng.uniform(0.0, 10.0, n_samples) * 10.0 ** rng.integers(-2, 3, n_samples)
    x = 1.0 + rng.uniform(0.0, 9.0, n_samples) * 10.0 ** rng.integers(-2, 3, n_samples)
    y = 1.0 + rng.uniform(0.0, 9.0, n_samples) * 10.0 ** rng.integers(-2, 3, n_samples)
    probe = np.arange(n_samples) % 100 == 0
    b[probe] = a[probe]
    y[probe] = x[probe]
    xp, yp = x ** P_AVG, y ** P_AVG
    swap = a * xp < b * yp
    a[swap], b[swap] = b[swap], a[swap].copy()
    x[swap], y[swap] = y[swap], x[swap].copy()
    xp, yp = x ** P_AVG, y ** P_AVG
    lhs = a * xp + 2 * b * yp
    rhs = (a + b) * (x + y) ** P_AVG
    return _batch_result("ineq-avg", lhs, rhs, tol, n_extremes, {
        "a": a, "b": b, "x": x, "y": y,
    })


def sample_ineq_2(n_samples: int, seed: int = 0, tol: float = TAU_INEQ,
                  max_len: int = 10, n_extremes: int = 10) -> BatchIneqResult:
    """Vectorised batch of admissible sorted-list samples.

    Lengths are uniform in 2..max_len; values uniform in [1, 10]; exponents
    mix the exact threshold (the equality-prone edge), the cap log_4(6), and
    a random surplus above the threshold.
    """
    if n_samples < 1:
        raise PreconditionError("n_samples must be positive")
    if max_len < 2:
        raise PreconditionError("max_len must be at least 2")
    rng = np.random.default_rng(seed)
    lengths = rng.integers(2, max_len + 1, n_samples)
    result = BatchIneqResult(name="ineq-2", samples=n_samples)
    for ell in range(2, max_len + 1):
        m = int((lengths == ell).sum())
        if m == 0:
            continue
        vals = np.sort(rng.uniform(1.0, 10.0, (m, ell)), axis=1)
        ones = rng.random(m) < 0.1
        vals[ones] = 1.0
        thr = ineq2_threshold(ell)
        mode = rng.integers(0, 4, m)
        p = np.where(mode == 0, thr,
                     np.where(mode == 1, max(thr, ALPHA_CAP),
                              thr + rng.uniform(0.0, 2.0, m)))
        powed = vals ** p[:, None]
        lhs = powed[:, -1] + powed[:, -2] + 2 * powed[:, :-2].sum(axis=1)
        rhs = vals.sum(axis=1) ** p
        part = _batch_result("ineq-2", lhs, rhs, tol, n_extremes, {
            "a": vals, "p": p,
        })
        result.failures.extend(part.failures)
        result.extremes.extend(part.extremes)
        result.min_rel_slack = min(result.min_rel_slack, part.min_rel_slack)
    result.extremes.sort(key=lambda s: s.slack / max(1.0, abs(s.rhs)))
    result.extremes = result.extremes[:n_extremes]
    return result


def _batch_result(name: str, lhs: np.ndarray, rhs: np.ndarray, tol: float,
                  n_extremes: int, inputs: dict) -> BatchIneqResult:
    holds = lhs <= rhs + tol * np.maximum(np.abs(lhs), np.abs(rhs))
    rel_slack = (rhs - lhs) / np.maximum(1.0, np.abs(rhs))
    result = BatchIneqResult(name=name, samples=len(lhs),
                             min_rel_slack=float(rel_slack.min()))

    def mk(i: int) -> IneqSample:
        ins = {}
        for key, arr in inputs.items():
            v = arr[i]
            ins[key] = tuple(float(z) for z in v) if getattr(v, "ndim", 0) \
                else float(v)
        return IneqSample(inputs=ins, lhs=float(lhs[i]), rhs=float(rhs[i]),
                          holds=bool(holds[i]), slack=float(rhs[i] - lhs[i]))

    for i in np.flatnonzero(~holds):
        result.failures.append(mk(int(i)))
    for i in np.argsort(rel_slack)[:n_extremes]:
        result.extremes.append(mk(int(i)))
    return result
