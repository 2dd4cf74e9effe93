"""Finite-dimensional operator algebra: dense complex matrices, the scaled
commutator bracket, and spectral-block decomposition relative to a diagonal
Hamiltonian."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .waves import DimensionMismatchError


class MatrixObservable:
    """Immutable D x D complex matrix element of the operator algebra."""

    __slots__ = ("entries",)

    def __init__(self, entries):
        a = np.array(entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("entries must be a square matrix")
        if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
            raise ValueError("entries must be finite")
        a.setflags(write=False)
        self.entries = a

    @classmethod
    def zero(cls, dim: int) -> "MatrixObservable":
        return cls(np.zeros((dim, dim), dtype=complex))

    @classmethod
    def identity(cls, dim: int) -> "MatrixObservable":
        return cls(np.eye(dim, dtype=complex))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def is_zero(self) -> bool:
        return not np.any(self.entries)

    def _require_same_dim(self, other: "MatrixObservable"):
        if self.dim != other.dim:
            raise DimensionMismatchError(f"matrix dims {self.dim} != {other.dim}")

    def __add__(self, other: "MatrixObservable") -> "MatrixObservable":
        self._require_same_dim(other)
        return MatrixObservable(self.entries + other.entries)

    def __sub__(self, other: "MatrixObservable") -> "MatrixObservable":
        self._require_same_dim(other)
        return MatrixObservable(self.entries - other.entries)

    def scale(self, a: float) -> "MatrixObservable":
        return MatrixObservable(a * self.entries)

    def __mul__(self, a: float) -> "MatrixObservable":
        return self.scale(a)

    __rmul__ = __mul__

    def __neg__(self) -> "MatrixObservable":
        return self.scale(-1.0)

    def frobenius(self) -> float:
        return float(np.linalg.norm(self.entries))

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        scale = max(np.abs(self.entries).max(initial=0.0), 1.0)
        return bool(np.abs(self.entries - self.entries.conj().T).max(initial=0.0) <= tol * scale)

    def __repr__(self):
        return f"MatrixObservable(dim={self.dim})"


def commutator_bracket(w: MatrixObservable, v: MatrixObservable, hbar: float = 1.0) -> MatrixObservable:
    """{W}V = i (WV - VW) / hbar."""
    w._require_same_dim(v)
    if hbar <= 0:
        raise ValueError("hbar must be positive")
    a, b = w.entries, v.entries
    return MatrixObservable(1j * (a @ b - b @ a) / hbar)


@dataclass(frozen=True)
class SpectralPartition:
    """Eigenvalue list h(A) with indices grouped into spectral classes.

    Classes are built by single-linkage on the sorted eigenvalues: indices
    whose eigenvalues differ by at most ``gap_tol`` are chained together.
    Across classes the gap exceeds ``gap_tol``; the within-class spread is
    required not to exceed it (raises otherwise).
    """

    eigenvalues: tuple[float, ...]
    gap_tol: float
    classes: tuple[tuple[int, ...], ...] = field(default=None)
    floquet: bool = False

    def __post_init__(self):
        vals = tuple(float(v) for v in self.eigenvalues)
        if not vals:
            raise ValueError("empty eigenvalue list")
        object.__setattr__(self, "eigenvalues", vals)
        if self.classes is None:
            object.__setattr__(self, "classes", _single_linkage(vals, self.gap_tol))
        flat = sorted(i for cls in self.classes for i in cls)
        if flat != list(range(len(vals))):
            raise ValueError("classes must partition the index set")
        for cls in self.classes:
            vs = [vals[i] for i in cls]
            if max(vs) - min(vs) > self.gap_tol:
                raise ValueError("within-class eigenvalue spread exceeds gap_tol")

    @classmethod
    def from_eigenvalues(cls, eigenvalues, gap_tol: float | None = None, floquet: bool = False) -> "SpectralPartition":
        vals = [float(v) for v in eigenvalues]
        if gap_tol is None:
            gap_tol = 1e-9 * (max(vals) - min(vals)) if len(vals) > 1 else 0.0
        return cls(eigenvalues=tuple(vals), gap_tol=float(gap_tol), floquet=floquet)

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    @property
    def class_values(self) -> tuple[float, ...]:
        return tuple(float(np.mean([self.eigenvalues[i] for i in cls])) for cls in self.classes)

    @property
    def class_of(self) -> tuple[int, ...]:
        out = [0] * self.dim
        for ci, cls in enumerate(self.classes):
            for i in cls:
                out[i] = ci
        return tuple(out)

    def h_matrix(self) -> MatrixObservable:
        return MatrixObservable(np.diag(np.asarray(self.eigenvalues, dtype=complex)))


def _single_linkage(vals: tuple[float, ...], gap_tol: float) -> tuple[tuple[int, ...], ...]:
    order = sorted(range(len(vals)), key=lambda i: vals[i])
    groups: list[list[int]] = [[order[0]]]
    for prev, cur in zip(order, order[1:]):
        if vals[cur] - vals[prev] <= gap_tol:
            groups[-1].append(cur)
        else:
            groups.append([cur])
    return tuple(tuple(sorted(g)) for g in groups)


@dataclass(frozen=True)
class SpectralBlock:
    """One block V(A, Delta) = P_(A+Delta) V P_A of a decomposition."""

    a_value: float
    delta: float
    row_class: int
    col_class: int
    matrix: np.ndarray


def block_decompose(v: MatrixObservable, partition: SpectralPartition) -> list[SpectralBlock]:
    """All nonzero blocks P_(A+Delta) V P_A; reassembly reproduces V exactly."""
    if v.dim != partition.dim:
        raise DimensionMismatchError(f"matrix dim {v.dim} != partition dim {partition.dim}")
    vals = partition.class_values
    out = []
    for bi, rows in enumerate(partition.classes):
        for ai, cols in enumerate(partition.classes):
            block = v.entries[np.ix_(rows, cols)]
            if not np.any(block):
                continue
            out.append(
                SpectralBlock(
                    a_value=vals[ai],
                    delta=vals[bi] - vals[ai],
                    row_class=bi,
                    col_class=ai,
                    matrix=block,
                )
            )
    return out


def reassemble(blocks: list[SpectralBlock], partition: SpectralPartition) -> MatrixObservable:
    out = np.zeros((partition.dim, partition.dim), dtype=complex)
    for blk in blocks:
        rows = partition.classes[blk.row_class]
        cols = partition.classes[blk.col_class]
        out[np.ix_(rows, cols)] = blk.matrix
    return MatrixObservable(out)


def floquet_hamiltonian(hcore, kmax: int, gap_tol: float | None = None) -> SpectralPartition:
    """Floquet spectrum {k + h(A) : |k| <= kmax}, flattened k-major."""
    hcore = [float(v) for v in hcore]
    if not hcore:
        raise ValueError("empty hcore")
    if kmax < 0:
        raise ValueError("kmax must be >= 0")
    vals = [k + h for k in range(-kmax, kmax + 1) for h in hcore]
    return SpectralPartition.from_eigenvalues(vals, gap_tol=gap_tol, floquet=True)


def matrix_exp(a: np.ndarray) -> np.ndarray:
    """Verification oracle: scaling-and-squaring Pade exponential (never used
    inside series code)."""
    return scipy.linalg.expm(a)


def conjugate_by_exp(generator: MatrixObservable, x: MatrixObservable, hbar: float = 1.0) -> MatrixObservable:
    """Oracle for e^{{S}}X = e^(iS/hbar) X e^(-iS/hbar)."""
    u = matrix_exp(1j * generator.entries / hbar)
    uinv = matrix_exp(-1j * generator.entries / hbar)
    return MatrixObservable(u @ x.entries @ uinv)
