"""
Concave, non-decreasing functions g used to build the robust loss F = g o sqrt.

Every penalty is a small frozen dataclass exposing ``value`` and
``supergradient``; both accept scalars or numpy arrays. The module-level
functions (``g_value``, ``g_supergradient``, ``f_value``, ``weight``) are thin
wrappers that add input validation.

At a kink the supergradient returned is the right-sided slope limit.
"""
from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Union

import numpy as np

from .errors import DomainError

ArrayLike = Union[float, np.ndarray]

DEFAULT_R_FLOOR = 1e-8
DEFAULT_W_MAX = 1e8


def _as_float(x):
    arr = np.asarray(x, dtype=float)
    return arr


def _out(arr, like):
    if np.ndim(like) == 0:
        return float(arr)
    return arr


@dataclass(frozen=True)
class Identity:
    name = "identity"

    def value(self, u):
        return u

    def supergradient(self, u):
        return np.ones_like(u)


@dataclass(frozen=True)
class Lq:
    q: float

    name = "lq"

    def __post_init__(self):
        if not (0.0 < self.q <= 1.0):
            raise DomainError(f"lq penalty needs 0 < q <= 1, got q={self.q}")

    def value(self, u):
        return np.power(u, self.q)

    def supergradient(self, u):
        if self.q == 1.0:
            return np.ones_like(u)
        with np.errstate(divide="ignore"):
            return self.q * np.power(u, self.q - 1.0)


@dataclass(frozen=True)
class Log:
    eps: float

    name = "log"

    def __post_init__(self):
        if not self.eps > 0.0:
            raise DomainError(f"log penalty needs eps > 0, got eps={self.eps}")

    def value(self, u):
        return np.log(self.eps + u)

    def supergradient(self, u):
        return 1.0 / (self.eps + u)


@dataclass(frozen=True)
class CappedL1:
    eps: float

    name = "capped"

    def __post_init__(self):
        if not self.eps > 0.0:
            raise DomainError(f"capped penalty needs eps > 0, got eps={self.eps}")

    def value(self, u):
        return np.minimum(u, self.eps)

    def supergradient(self, u):
        # right limit at the kink u == eps is 0
        return np.where(u < self.eps, 1.0, 0.0)


@dataclass(frozen=True)
class Scad:
    """SCAD of Fan & Li, normalised so that g(0) = 0."""

    lam: float
    a: float = 3.7

    name = "scad"

    def __post_init__(self):
        if not self.lam > 0.0:
            raise DomainError(f"scad penalty needs lambda > 0, got {self.lam}")
        if not self.a > 2.0:
            raise DomainError(f"scad penalty needs a > 2, got {self.a}")

    def value(self, u):
        lam, a = self.lam, self.a
        mid = (2.0 * a * lam * u - u * u - lam * lam) / (2.0 * (a - 1.0))
        tail = lam * lam * (a + 1.0) / 2.0
        return np.where(u <= lam, lam * u, np.where(u <= a * lam, mid, tail))

    def supergradient(self, u):
        lam, a = self.lam, self.a
        mid = (a * lam - u) / (a - 1.0)
        return np.where(u <= lam, lam, np.where(u < a * lam, mid, 0.0))


@dataclass(frozen=True)
class Mcp:
    """Minimax concave penalty of Zhang."""

    lam: float
    gamma: float = 2.0

    name = "mcp"

    def __post_init__(self):
        if not self.lam > 0.0:
            raise DomainError(f"mcp penalty needs lambda > 0, got {self.lam}")
        if not self.gamma > 1.0:
            raise DomainError(f"mcp penalty needs gamma > 1, got {self.gamma}")

    def value(self, u):
        lam, gamma = self.lam, self.gamma
        knot = gamma * lam
        return np.where(u <= knot, lam * u - u * u / (2.0 * gamma), gamma * lam * lam / 2.0)

    def supergradient(self, u):
        lam, gamma = self.lam, self.gamma
        return np.where(u < gamma * lam, lam - u / gamma, 0.0)


ConcavePenalty = Union[Identity, Lq, Log, CappedL1, Scad, Mcp]

# name -> (class, {cli key: field name})
_REGISTRY = {
    "identity": (Identity, {}),
    "lq": (Lq, {"q": "q"}),
    "log": (Log, {"eps": "eps"}),
    "capped": (CappedL1, {"eps": "eps"}),
    "scad": (Scad, {"lambda": "lam", "a": "a"}),
    "mcp": (Mcp, {"lambda": "lam", "gamma": "gamma"}),
}


def _check_arg(u, allow_zero=True):
    arr = _as_float(u)
    if not np.all(np.isfinite(arr)):
        raise DomainError("penalty argument must be finite")
    if np.any(arr < 0.0) or (not allow_zero and np.any(arr == 0.0)):
        raise DomainError("penalty argument must be positive")
    return arr


def g_value(p: ConcavePenalty, u: ArrayLike) -> ArrayLike:
    """Evaluate g(u) for u >= 0."""
    arr = _check_arg(u)
    return _out(p.value(arr), u)


def g_supergradient(p: ConcavePenalty, u: ArrayLike) -> ArrayLike:
    """A nonnegative supergradient of g at u (right slope limit at kinks)."""
    arr = _check_arg(u)
    return _out(p.supergradient(arr), u)


def f_value(p: ConcavePenalty, v: ArrayLike) -> ArrayLike:
    """Composed loss F(v) = g(sqrt(v)) of a squared residual norm v."""
    arr = _check_arg(v)
    return _out(p.value(np.sqrt(arr)), v)


def f_supergradient(p: ConcavePenalty, v: ArrayLike) -> ArrayLike:
    """Chain-rule supergradient g'(sqrt(v)) / (2 sqrt(v)) of F at v > 0."""
    arr = _check_arg(v, allow_zero=False)
    root = np.sqrt(arr)
    return _out(p.supergradient(root) / (2.0 * root), v)


def weight(
    p: ConcavePenalty,
    r: ArrayLike,
    r_floor: float = DEFAULT_R_FLOOR,
    w_max: float = DEFAULT_W_MAX,
) -> ArrayLike:
    """
    Per-sample MM weight from a residual norm ``r`` (not squared).

    Returns ``min(g'(rc) / (2 rc), w_max)`` with ``rc = max(r, r_floor)``.
    """
    if not r_floor > 0.0:
        raise DomainError("r_floor must be positive")
    arr = _check_arg(r)
    rc = np.maximum(arr, r_floor)
    w = np.minimum(p.supergradient(rc) / (2.0 * rc), w_max)
    return _out(w, r)


def parse_penalty(text: str) -> ConcavePenalty:
    """
    Parse a descriptor such as ``log:eps=1.0`` or ``scad:lambda=1.0,a=3.7``.

    >>> parse_penalty("lq:q=0.5")
    Lq(q=0.5)
    """
    name, _, rest = text.strip().partition(":")
    name = name.strip().lower()
    if name not in _REGISTRY:
        raise DomainError(
            f"unknown penalty {name!r}; choose from {', '.join(sorted(_REGISTRY))}"
        )
    cls, keys = _REGISTRY[name]
    kwargs = {}
    if rest.strip():
        for item in rest.split(","):
            key, eq, val = item.partition("=")
            key = key.strip()
            if not eq or key not in keys:
                raise DomainError(f"bad parameter {item!r} for penalty {name!r}")
            try:
                kwargs[keys[key]] = float(val)
            except ValueError:
                raise DomainError(f"parameter {key!r} is not a number: {val!r}") from None
    try:
        return cls(**kwargs)
    except TypeError:
        required = ", ".join(keys)
        raise DomainError(f"penalty {name!r} requires parameters: {required}") from None


def format_penalty(p: ConcavePenalty) -> str:
    """Inverse of :func:`parse_penalty`."""
    _, keys = _REGISTRY[p.name]
    if not keys:
        return p.name
    inv = {v: k for k, v in keys.items()}
    parts = [f"{inv[f.name]}={getattr(p, f.name)!r}" for f in fields(p)]
    return f"{p.name}:" + ",".join(parts)
