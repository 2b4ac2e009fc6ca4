"""Catalog operators on a finite Hilbert space and the vectorized expectation.

The composite space is ``C^d (x) C^m``: Clifford representation first,
Hilbert factor second, so ``kron(A, B)`` has ``A`` acting on the
representation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import Multivector
from .representation import CliffordRep, to_matrix

DEFAULT_HILBERT_DIM = 4


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        a = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if abs(np.linalg.norm(a) - 1.0) > 1e-12:
            raise ValueError(f"state must have unit norm, got {np.linalg.norm(a)!r}")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    @classmethod
    def random(cls, m: int, rng: np.random.Generator) -> StateVector:
        v = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        return cls(v / np.linalg.norm(v))


def spinor_columns(F: Multivector, r: CliffordRep) -> list[np.ndarray]:
    """Columns ``psi_A`` of the matrix image of ``F``."""
    M = to_matrix(F, r)
    return [M[:, A].copy() for A in range(r.dim)]


def partial_trace_cliff(M: np.ndarray, r: CliffordRep | int) -> np.ndarray:
    """Trace out the ``d``-dimensional Clifford factor of a ``(d m) x (d m)`` matrix."""
    d = r if isinstance(r, int) else r.dim
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] % d:
        raise DimensionError(f"matrix of shape {M.shape} is not (d*m) x (d*m) with d={d}")
    m = M.shape[0] // d
    return np.einsum("aiaj->ij", M.reshape(d, m, d, m))


def vectorized_expectation(F: Multivector, O: Multivector, r: CliffordRep) -> float:
    """``Re sum_A psi_A^dagger O psi_A / d``, which equals ``<~F O F>_0``."""
    Om = to_matrix(O, r)
    total = sum(np.vdot(psi, Om @ psi) for psi in spinor_columns(F, r))
    return float(np.real(total) / r.dim)


def catalog_operator(F: Multivector, a_ops: Sequence[np.ndarray], r: CliffordRep) -> np.ndarray:
    """Square catalog map ``sum_J b_J s_J (x) a_J`` on the composite space.

    ``a_ops`` holds one ``m x m`` operator per basis blade (8 of them), or a
    single operator used for all blades.
    """
    ops = [np.asarray(a, dtype=complex) for a in a_ops]
    if len(ops) == 1:
        ops = ops * 8
    if len(ops) != 8:
        raise DimensionError(f"need 8 Hilbert operators (one per blade), got {len(ops)}")
    m = ops[0].shape[0]
    for a in ops:
        if a.shape != (m, m):
            raise DimensionError("Hilbert operators must all be m x m")
    b = F.coefficients
    return sum(b[J] * np.kron(r.basis_images[J], ops[J]) for J in range(8))


def catalog_columns(F: Multivector, a_ops: Sequence[np.ndarray], r: CliffordRep) -> list[np.ndarray]:
    """Rectangular ``(d m) x m`` blocks ``psi_hat_A``, one per matrix column."""
    big = catalog_operator(F, a_ops, r)
    d = r.dim
    m = big.shape[0] // d
    blocks = big.reshape(d, m, d, m)
    # column A of the Clifford factor: rows (a, i), columns j of block A
    return [blocks[:, :, A, :].reshape(d * m, m) for A in range(d)]


def catalog_roundtrip(
    F: Multivector,
    a_ops: Sequence[np.ndarray],
    psi: StateVector,
    O: Multivector,
    r: CliffordRep,
) -> float:
    """``<Psi| Tr_s[F^dagger (O x 1) F] |Psi> + h.c.``, the conjugate added as ``2 Re``.

    With every ``a_J`` the identity this is ``2 d <~F O F>_0``.
    """
    big = catalog_operator(F, a_ops, r)
    if big.shape[0] != r.dim * psi.dim:
        raise DimensionError(f"state has dimension {psi.dim}, operators act on {big.shape[0] // r.dim}")
    Ob = np.kron(to_matrix(O, r), np.eye(psi.dim))
    reduced = partial_trace_cliff(big.conj().T @ Ob @ big, r)
    v = psi.amplitudes
    return float(2.0 * np.real(np.vdot(v, reduced @ v)))


def catalog_roundtrip_columns(
    F: Multivector,
    a_ops: Sequence[np.ndarray],
    psi: StateVector,
    O: Multivector,
    r: CliffordRep,
) -> float:
    """Same quantity through the column blocks: ``2 Re sum_A <Psi|psi_A^dagger O psi_A|Psi>``."""
    Ob = np.kron(to_matrix(O, r), np.eye(psi.dim))
    v = psi.amplitudes
    total = 0.0
    for blk in catalog_columns(F, a_ops, r):
        w = blk @ v
        total += np.vdot(w, Ob @ w)
    return float(2.0 * np.real(total))


def random_diagonal_unitary(m: int, rng: np.random.Generator) -> np.ndarray:
    return np.diag(np.exp(1j * rng.uniform(0, 2 * np.pi, size=m)))
