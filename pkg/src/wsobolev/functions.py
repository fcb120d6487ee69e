"""Test functions on the half line: evaluator, optional derivative, support.

Evaluators are numpy-vectorized; scalar-only callables can be wrapped with
``vectorized=False``.  Breakpoints are the kink locations that quadrature
panels must not straddle.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class HalfLineFunction:
    evaluate: Callable
    derivative: Callable | None = None
    support: tuple[float, float] | None = None
    label: str = ""
    breakpoints: tuple = ()
    vectorized: bool = True

    def __post_init__(self):
        if not self.vectorized:
            object.__setattr__(self, "evaluate", np.vectorize(self.evaluate, otypes=[float]))
            if self.derivative is not None:
                object.__setattr__(self, "derivative", np.vectorize(self.derivative, otypes=[float]))
            object.__setattr__(self, "vectorized", True)
        if self.support is not None:
            lo, hi = self.support
            if not (0.0 <= lo < hi):
                raise ValueError(f"bad support {self.support}")

    def __call__(self, x):
        return self.evaluate(np.asarray(x, dtype=float))

    def d(self, x):
        if self.derivative is None:
            raise ValueError(f"function {self.label!r} declares no derivative")
        return self.derivative(np.asarray(x, dtype=float))

    @property
    def has_derivative(self) -> bool:
        return self.derivative is not None

    def scaled(self, lam: float) -> "HalfLineFunction":
        f, df = self.evaluate, self.derivative
        return replace(
            self,
            evaluate=lambda x: lam * f(x),
            derivative=(None if df is None else (lambda x: lam * df(x))),
            label=f"{lam:g}*{self.label}",
        )


def zero_function(label: str = "0") -> HalfLineFunction:
    return HalfLineFunction(
        evaluate=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        derivative=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        support=(1.0, 2.0), label=label, breakpoints=(1.0, 2.0))


def hat(left: float, peak: float, right: float, height: float = 1.0,
        label: str = "") -> HalfLineFunction:
    """Piecewise-linear hat: 0 at left/right, ``height`` at peak."""
    if not (left < peak < right):
        raise ValueError("need left < peak < right")
    s_up = height / (peak - left)
    s_dn = -height / (right - peak)

    def f(x):
        x = np.asarray(x, dtype=float)
        up = s_up * (x - left)
        dn = height + s_dn * (x - peak)
        return np.where((x > left) & (x <= peak), up,
                        np.where((x > peak) & (x < right), dn, 0.0))

    def df(x):
        x = np.asarray(x, dtype=float)
        return np.where((x > left) & (x <= peak), s_up,
                        np.where((x > peak) & (x < right), s_dn, 0.0))

    return HalfLineFunction(f, df, support=(left, right),
                            label=label or f"hat[{left:g},{peak:g},{right:g}]x{height:g}",
                            breakpoints=(left, peak, right))


def bump(left: float, right: float, height: float = 1.0,
         label: str = "") -> HalfLineFunction:
    """C^1 quartic bump: height*(1-u^2)^2 on [left, right], u the affine map to [-1, 1]."""
    if not (left < right):
        raise ValueError("need left < right")
    mid = 0.5 * (left + right)
    halfw = 0.5 * (right - left)

    def f(x):
        x = np.asarray(x, dtype=float)
        u = (x - mid) / halfw
        inside = np.abs(u) < 1.0
        return np.where(inside, height * (1.0 - u**2) ** 2, 0.0)

    def df(x):
        x = np.asarray(x, dtype=float)
        u = (x - mid) / halfw
        inside = np.abs(u) < 1.0
        return np.where(inside, -4.0 * height * u * (1.0 - u**2) / halfw, 0.0)

    return HalfLineFunction(f, df, support=(left, right),
                            label=label or f"bump[{left:g},{right:g}]x{height:g}",
                            breakpoints=(left, right))


def indicator(lo: float, hi: float, height: float = 1.0,
              label: str = "") -> HalfLineFunction:
    """height * characteristic function of [lo, hi] (no derivative declared)."""
    if not (lo < hi):
        raise ValueError("need lo < hi")

    def f(x):
        x = np.asarray(x, dtype=float)
        return np.where((x >= lo) & (x <= hi), height, 0.0)

    return HalfLineFunction(f, None, support=(lo, hi),
                            label=label or f"chi[{lo:g},{hi:g}]x{height:g}",
                            breakpoints=(lo, hi))


def from_callable(fn: Callable, support: tuple[float, float], dfn: Callable | None = None,
                  breakpoints=(), label: str = "fn", vectorized: bool = True) -> HalfLineFunction:
    """Wrap ``fn`` restricted to ``support`` (forced to zero outside)."""
    lo, hi = support

    def f(x):
        x = np.asarray(x, dtype=float)
        inside = (x >= lo) & (x <= hi)
        return np.where(inside, np.asarray(fn(x), dtype=float), 0.0)

    df = None
    if dfn is not None:
        def df(x):
            x = np.asarray(x, dtype=float)
            inside = (x > lo) & (x < hi)
            return np.where(inside, np.asarray(dfn(x), dtype=float), 0.0)

    g = HalfLineFunction(f, df, support=support, label=label,
                         breakpoints=tuple(sorted({lo, hi, *breakpoints})),
                         vectorized=vectorized)
    return g


def lincomb(terms: list[tuple[float, HalfLineFunction]], label: str = "") -> HalfLineFunction:
    """Linear combination of functions, merging supports and breakpoints."""
    terms = [(c, g) for c, g in terms if c != 0.0]
    if not terms:
        return zero_function()
    lo = min(g.support[0] for _, g in terms if g.support)
    hi = max(g.support[1] for _, g in terms if g.support)
    bks = tuple(sorted({b for _, g in terms for b in g.breakpoints}))
    have_d = all(g.has_derivative for _, g in terms)

    def f(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for c, g in terms:
            out = out + c * g.evaluate(x)
        return out

    df = None
    if have_d:
        def df(x):
            x = np.asarray(x, dtype=float)
            out = np.zeros_like(x)
            for c, g in terms:
                out = out + c * g.derivative(x)
            return out

    return HalfLineFunction(f, df, support=(lo, hi),
                            label=label or "+".join(f"{c:g}*{g.label}" for c, g in terms),
                            breakpoints=bks)


def restrict(g: HalfLineFunction, lo: float, hi: float, label: str = "") -> HalfLineFunction:
    """g * chi_[lo, hi] with adjusted support metadata."""
    if g.support is not None:
        lo = max(lo, g.support[0])
        hi = min(hi, g.support[1])
    if hi <= lo:
        return zero_function(label or f"{g.label}|0")
    gf = g.evaluate

    def f(x):
        x = np.asarray(x, dtype=float)
        return np.where((x >= lo) & (x <= hi), gf(x), 0.0)

    bks = tuple(sorted({lo, hi, *(b for b in g.breakpoints if lo < b < hi)}))
    return HalfLineFunction(f, None, support=(lo, hi),
                            label=label or f"{g.label}|[{lo:g},{hi:g}]",
                            breakpoints=bks)
