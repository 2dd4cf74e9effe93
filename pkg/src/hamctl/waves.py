"""Finite trigonometric polynomials on extended phase space and their Poisson bracket.

Observables are finite sums ``V(q, p, tau) = sum_Delta c(Delta) exp(i Delta.x)``
over wavevectors ``Delta = (n, m, k)`` with ``n, m`` real (conjugate to ``q, p``)
and ``k`` integer (conjugate to the torus time channels ``tau``).  Reality is
kept as the Hermitian symmetry ``c(-Delta) == conj(c(Delta))``.

The bracket convention is fixed so that for the special energy channel
(handled in :mod:`hamctl.hamops`) the Liouville operator is ``d/dtau`` and
``{p}V = +dV/dq``.  On exponentials this reads

    {e^(i Delta'.x)} e^(i Delta.x) = sigma(Delta', Delta) e^(i (Delta'+Delta).x)

with ``sigma(Delta', Delta) = n'.m - m'.n``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

# Relative amplitude below which a term is dropped after every operation.
PRUNE_REL = 1e-15


class DimensionMismatchError(ValueError):
    """Two observables (or an observable and a point) disagree on (d, r)."""


@dataclass(frozen=True)
class WaveVector:
    """Exact wavevector key (n, m, k); closed under +/- only."""

    n: tuple[float, ...]
    m: tuple[float, ...]
    k: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "n", tuple(float(x) for x in self.n))
        object.__setattr__(self, "m", tuple(float(x) for x in self.m))
        object.__setattr__(self, "k", tuple(int(x) for x in self.k))
        if len(self.n) != len(self.m):
            raise ValueError("n and m must have equal length d")

    @property
    def d(self) -> int:
        return len(self.n)

    @property
    def r(self) -> int:
        return len(self.k)

    def __neg__(self) -> "WaveVector":
        return WaveVector(tuple(-x for x in self.n), tuple(-x for x in self.m), tuple(-x for x in self.k))

    def __add__(self, other: "WaveVector") -> "WaveVector":
        return WaveVector(
            tuple(a + b for a, b in zip(self.n, other.n)),
            tuple(a + b for a, b in zip(self.m, other.m)),
            tuple(a + b for a, b in zip(self.k, other.k)),
        )

    def __sub__(self, other: "WaveVector") -> "WaveVector":
        return self + (-other)

    def is_zero(self) -> bool:
        return not any(self.n) and not any(self.m) and not any(self.k)

    def phase(self, q, p, tau) -> float:
        """Delta.x = n.q + m.p + k.tau at a phase point."""
        s = 0.0
        for a, b in zip(self.n, q):
            s += a * b
        for a, b in zip(self.m, p):
            s += a * b
        for a, b in zip(self.k, tau):
            s += a * b
        return s


def sigma(dp: WaveVector, dv: WaveVector) -> float:
    """Symplectic pairing n(dp).m(dv) - m(dp).n(dv) of the bracket rule."""
    s = 0.0
    for a, b in zip(dp.n, dv.m):
        s += a * b
    for a, b in zip(dp.m, dv.n):
        s -= a * b
    return s


def sigma_sup(support_a: Iterable[WaveVector], support_b: Iterable[WaveVector]) -> float:
    """max |sigma| over the product of two wavevector sets (0 if either empty)."""
    sb = list(support_b)
    best = 0.0
    for da in support_a:
        for db in sb:
            v = abs(sigma(da, db))
            if v > best:
                best = v
    return best


def band_sum(support_a: Iterable[WaveVector], support_b: Iterable[WaveVector]) -> frozenset[WaveVector]:
    """Minkowski sum of two supports (bracket output band)."""
    return frozenset(a + b for a in support_a for b in support_b)


class WaveObservable:
    """Immutable real trigonometric observable with finite wavevector support."""

    __slots__ = ("d", "r", "_terms")

    def __init__(self, d: int, r: int, terms: Mapping[WaveVector, complex] | None = None, _checked: bool = False):
        if d < 1 or r < 0:
            raise ValueError("need d >= 1 and r >= 0")
        self.d = int(d)
        self.r = int(r)
        cleaned = _prune(dict(terms or {}))
        for delta in cleaned:
            if delta.d != self.d or delta.r != self.r:
                raise DimensionMismatchError(f"wavevector dims {(delta.d, delta.r)} != {(d, r)}")
        if not _checked:
            _check_reality(cleaned)
        self._terms = cleaned

    # -- construction -----------------------------------------------------

    @classmethod
    def zero(cls, d: int, r: int) -> "WaveObservable":
        return cls(d, r, {}, _checked=True)

    @classmethod
    def sin_wave(cls, d: int, r: int, n, m, k, amp: float = 1.0) -> "WaveObservable":
        """amp * sin(n.q + m.p + k.tau) as a conjugate pair of exponentials."""
        delta = WaveVector(_as_tuple(n, d), _as_tuple(m, d), _as_tuple(k, r))
        if delta.is_zero():
            return cls.zero(d, r)
        c = amp / 2j
        return cls(d, r, {delta: c, -delta: -c}, _checked=True)

    @classmethod
    def cos_wave(cls, d: int, r: int, n, m, k, amp: float = 1.0) -> "WaveObservable":
        delta = WaveVector(_as_tuple(n, d), _as_tuple(m, d), _as_tuple(k, r))
        if delta.is_zero():
            return cls(d, r, {delta: complex(amp)}, _checked=True)
        return cls(d, r, {delta: amp / 2.0, -delta: amp / 2.0}, _checked=True)

    # -- views ------------------------------------------------------------

    @property
    def terms(self) -> Mapping[WaveVector, complex]:
        return MappingProxyType(self._terms)

    @property
    def support(self) -> frozenset[WaveVector]:
        return frozenset(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def amp_norm(self) -> float:
        """l1 norm of the complex amplitudes (the uniform-weight algebra norm)."""
        return sum(abs(c) for c in self._terms.values())

    def max_amp(self) -> float:
        return max((abs(c) for c in self._terms.values()), default=0.0)

    def __repr__(self):
        return f"WaveObservable(d={self.d}, r={self.r}, nterms={len(self._terms)})"

    # -- linear structure ---------------------------------------------------

    def _require_same_dims(self, other: "WaveObservable"):
        if self.d != other.d or self.r != other.r:
            raise DimensionMismatchError(f"dims {(self.d, self.r)} != {(other.d, other.r)}")

    def __add__(self, other: "WaveObservable") -> "WaveObservable":
        self._require_same_dims(other)
        out = dict(self._terms)
        for delta, c in other._terms.items():
            out[delta] = out.get(delta, 0.0) + c
        return WaveObservable(self.d, self.r, out, _checked=True)

    def __sub__(self, other: "WaveObservable") -> "WaveObservable":
        return self + other.scale(-1.0)

    def scale(self, a: float) -> "WaveObservable":
        return WaveObservable(self.d, self.r, {delta: a * c for delta, c in self._terms.items()}, _checked=True)

    def __mul__(self, a: float) -> "WaveObservable":
        return self.scale(a)

    __rmul__ = __mul__

    def __neg__(self) -> "WaveObservable":
        return self.scale(-1.0)

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, q, p, tau) -> float:
        """Real value at a phase point (imaginary residue cancels by reality)."""
        q, p, tau = self._point(q, p, tau)
        total = 0.0 + 0.0j
        for delta, c in self._terms.items():
            total += c * np.exp(1j * delta.phase(q, p, tau))
        return float(total.real)

    def gradient(self, q, p, tau) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(dV/dq, dV/dp, dV/dtau), each termwise exact."""
        q, p, tau = self._point(q, p, tau)
        dq = np.zeros(self.d)
        dp = np.zeros(self.d)
        dt = np.zeros(self.r)
        for delta, c in self._terms.items():
            w = c * np.exp(1j * delta.phase(q, p, tau)) * 1j
            dq += (w * np.asarray(delta.n)).real
            dp += (w * np.asarray(delta.m)).real
            dt += (w * np.asarray(delta.k, dtype=float)).real
        return dq, dp, dt

    def _point(self, q, p, tau):
        q = np.atleast_1d(np.asarray(q, dtype=float))
        p = np.atleast_1d(np.asarray(p, dtype=float))
        tau = np.atleast_1d(np.asarray(tau, dtype=float)) if self.r else np.zeros(0)
        if q.shape != (self.d,) or p.shape != (self.d,) or tau.shape != (self.r,):
            raise DimensionMismatchError("phase point does not match (d, r)")
        return q, p, tau


def wave_add(u: WaveObservable, v: WaveObservable) -> WaveObservable:
    return u + v


def wave_scale(a: float, v: WaveObservable) -> WaveObservable:
    return v.scale(a)


def poisson_bracket(w: WaveObservable, v: WaveObservable) -> WaveObservable:
    """{W}V by the convolution rule on exponentials; preserves reality."""
    w._require_same_dims(v)
    out: dict[WaveVector, complex] = {}
    for dw, cw in w._terms.items():
        for dv, cv in v._terms.items():
            s = sigma(dw, dv)
            if s == 0.0:
                continue
            key = dw + dv
            out[key] = out.get(key, 0.0) + s * cw * cv
    return WaveObservable(w.d, w.r, out, _checked=True)


@dataclass(frozen=True)
class PolynomialScalar:
    """Real multivariate polynomial h(A), stored as exponent-tuple -> coefficient."""

    nvars: int
    coeffs: Mapping[tuple[int, ...], float]

    def __post_init__(self):
        clean = {}
        for expo, c in self.coeffs.items():
            expo = tuple(int(e) for e in expo)
            if len(expo) != self.nvars:
                raise ValueError("exponent length != nvars")
            if any(e < 0 for e in expo):
                raise ValueError("negative exponent")
            if c != 0.0:
                clean[expo] = clean.get(expo, 0.0) + float(c)
        object.__setattr__(self, "coeffs", MappingProxyType(clean))

    def degree(self) -> int:
        return max((sum(e) for e in self.coeffs), default=0)

    def eval(self, a) -> float:
        a = np.atleast_1d(np.asarray(a, dtype=float))
        total = 0.0
        for expo, c in self.coeffs.items():
            total += c * float(np.prod([a[i] ** e for i, e in enumerate(expo)])) if expo else c
        return total

    def gradient_at(self, a) -> np.ndarray:
        a = np.atleast_1d(np.asarray(a, dtype=float))
        g = np.zeros(self.nvars)
        for expo, c in self.coeffs.items():
            for i, e in enumerate(expo):
                if e == 0:
                    continue
                term = c * e
                for j, ej in enumerate(expo):
                    pw = ej - 1 if j == i else ej
                    term *= a[j] ** pw
                g[i] += term
        return g

    def taylor_coeffs(self, a0) -> dict[tuple[int, ...], float]:
        """Coefficients of h(a0 + A) as a polynomial in A (exact binomial shift)."""
        a0 = np.atleast_1d(np.asarray(a0, dtype=float))
        out: dict[tuple[int, ...], float] = {}
        for expo, c in self.coeffs.items():
            per_var = []
            for i, e in enumerate(expo):
                per_var.append([(j, math.comb(e, j) * a0[i] ** (e - j)) for j in range(e + 1)])
            for combo in itertools.product(*per_var) if per_var else [()]:
                key = tuple(j for j, _ in combo)
                coef = c
                for _, w in combo:
                    coef *= w
                if len(key) != self.nvars:
                    key = tuple(list(key) + [0] * (self.nvars - len(key)))
                out[key] = out.get(key, 0.0) + coef
        return out


@dataclass(frozen=True)
class LocalizationReport:
    """Frequency, rescaling parameter and quadratic-remainder bound near A0."""

    omega: np.ndarray
    epsilon: float
    quadratic_remainder_bound: float


def localize(h: PolynomialScalar, a0, norm_of_v: float) -> LocalizationReport:
    """Report omega = grad h(A0), epsilon = ||V||^(1/2) and a bound on the
    rescaled quadratic remainder sup_{|A|_inf <= 1} |q(eps A)| / eps^2.

    Justifies modelling the integrable part as omega.A near A0; does not
    transform V.
    """
    if h.degree() < 1:
        raise ValueError("h must have degree >= 1 (no frequency otherwise)")
    if norm_of_v <= 0:
        raise ValueError("normOfV must be positive")
    omega = h.gradient_at(a0)
    eps = math.sqrt(norm_of_v)
    shifted = h.taylor_coeffs(a0)
    bound = 0.0
    for expo, c in shifted.items():
        deg = sum(expo)
        if deg >= 2:
            bound += abs(c) * eps ** (deg - 2)
    return LocalizationReport(omega=omega, epsilon=eps, quadratic_remainder_bound=bound)


# -- internals --------------------------------------------------------------


def _as_tuple(x, length: int) -> tuple:
    if np.isscalar(x):
        if length != 1:
            raise ValueError(f"scalar given where length-{length} vector expected")
        return (x,)
    t = tuple(x)
    if len(t) != length:
        raise ValueError(f"expected length {length}, got {len(t)}")
    return t


def _prune(terms: dict[WaveVector, complex]) -> dict[WaveVector, complex]:
    if not terms:
        return {}
    cutoff = PRUNE_REL * max(abs(c) for c in terms.values())
    return {delta: complex(c) for delta, c in terms.items() if abs(c) > cutoff and c != 0.0}


def _check_reality(terms: dict[WaveVector, complex]):
    scale = max((abs(c) for c in terms.values()), default=0.0)
    tol = 1e-12 * scale
    for delta, c in terms.items():
        partner = terms.get(-delta)
        if partner is None or abs(partner - c.conjugate()) > tol:
            raise ValueError(f"reality violated at {delta}: c(-Delta) != conj(c(Delta))")
