"""Complex matrix representations of Cl3(R) and trace-based grade projections."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import GRADES, TOL, Multivector

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


class RepresentationError(ValueError):
    """Structurally malformed representation (wrong shapes)."""


class InvalidRepresentationError(ValueError):
    """A representation failed validation and cannot be used for conversion."""


class NotInImageError(ValueError):
    """Matrix lies outside the image of the algebra in this representation."""

    def __init__(self, residual: float) -> None:
        super().__init__(f"matrix is not the image of a real multivector (residual {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True)
class RepDiagnostics:
    """Largest violation of each defining identity."""

    identity: float
    anticommutation: float
    orientation: float  # s1 s2 = i s3
    pseudoscalar: float  # -i s1 s2 s3 = s0
    hermitian: float
    unitary: float
    tol: float = TOL

    @property
    def accepted(self) -> bool:
        return self.max_violation <= self.tol

    @property
    def max_violation(self) -> float:
        return max(self.identity, self.anticommutation, self.orientation, self.pseudoscalar, self.hermitian, self.unitary)

    def as_dict(self) -> dict[str, float]:
        return {
            "identity": self.identity,
            "anticommutation": self.anticommutation,
            "orientation": self.orientation,
            "pseudoscalar": self.pseudoscalar,
            "hermitian": self.hermitian,
            "unitary": self.unitary,
        }


def _freeze(m) -> np.ndarray:
    m = np.array(m, dtype=complex)
    m.setflags(write=False)
    return m


@dataclass(frozen=True, eq=False)
class CliffordRep:
    """Four ``d x d`` matrices ``(s0, s1, s2, s3)`` standing for ``1, e1, e2, e3``.

    Diagnostics are computed once on construction. Conversion functions refuse
    a representation whose diagnostics were not accepted.
    """

    name: str
    sigma: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]
    diagnostics: RepDiagnostics = field(init=False, repr=False)
    basis_images: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        mats = tuple(_freeze(m) for m in self.sigma)
        if len(mats) != 4:
            raise RepresentationError("a representation needs exactly four matrices")
        d = mats[0].shape[0] if mats[0].ndim == 2 else -1
        for m in mats:
            if m.ndim != 2 or m.shape != (d, d):
                raise RepresentationError(f"matrices must all be square {d}x{d}; got {m.shape}")
        object.__setattr__(self, "sigma", mats)
        object.__setattr__(self, "diagnostics", _diagnose(mats))
        s0, s1, s2, s3 = mats
        images = np.stack([s0, s1, s2, s3, s2 @ s3, s3 @ s1, s1 @ s2, s1 @ s2 @ s3])
        images.setflags(write=False)
        object.__setattr__(self, "basis_images", images)

    @property
    def dim(self) -> int:
        return self.sigma[0].shape[0]

    @property
    def valid(self) -> bool:
        return self.diagnostics.accepted

    def require_valid(self) -> None:
        if not self.valid:
            raise InvalidRepresentationError(
                f"representation {self.name!r} failed validation "
                f"(max violation {self.diagnostics.max_violation:.3e})"
            )


def _maxabs(m: np.ndarray) -> float:
    return float(np.max(np.abs(m))) if m.size else 0.0


def _diagnose(mats) -> RepDiagnostics:
    s0, s1, s2, s3 = mats
    eye = np.eye(s0.shape[0])
    vec = (s1, s2, s3)
    anti = 0.0
    for i in range(3):
        for j in range(3):
            target = 2.0 * eye if i == j else 0.0 * eye
            anti = max(anti, _maxabs(vec[i] @ vec[j] + vec[j] @ vec[i] - target))
    return RepDiagnostics(
        identity=_maxabs(s0 - eye),
        anticommutation=anti,
        orientation=_maxabs(s1 @ s2 - 1j * s3),
        pseudoscalar=_maxabs(-1j * s1 @ s2 @ s3 - s0),
        hermitian=max(_maxabs(s - s.conj().T) for s in vec),
        unitary=max(_maxabs(s @ s.conj().T - eye) for s in vec),
    )


def validate_rep(r: CliffordRep) -> RepDiagnostics:
    return r.diagnostics


def pauli_rep() -> CliffordRep:
    return CliffordRep("pauli-2x2", (np.eye(2), *PAULI))


def block_rep_4x4() -> CliffordRep:
    """The reducible 4x4 representation with ``s1 = sigma1 (+) sigma2``."""
    s1 = [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1j], [0, 0, 1j, 0]]
    s2 = [[0, 0, 1, 0], [0, 0, 0, 1j], [1, 0, 0, 0], [0, -1j, 0, 0]]
    s3 = [[0, 0, 0, 1], [0, 0, -1j, 0], [0, 1j, 0, 0], [1, 0, 0, 0]]
    return CliffordRep("block-4x4", (np.eye(4), s1, s2, s3))


def builtin_reps() -> list[CliffordRep]:
    return [pauli_rep(), block_rep_4x4()]


# --------------------------------------------------------------------------- #
# conversion
# --------------------------------------------------------------------------- #


def to_matrix(a: Multivector | np.ndarray, r: CliffordRep) -> np.ndarray:
    """``b0 s0 + b_i s_i + b_jk s_j s_k + b123 s1 s2 s3``.

    Accepts a :class:`Multivector` or a raw ``(..., 8)`` coefficient array.
    """
    r.require_valid()
    c = a.coefficients if isinstance(a, Multivector) else np.asarray(a, dtype=float)
    return np.tensordot(c, r.basis_images, axes=([-1], [0]))


def _coefficients(M: np.ndarray, r: CliffordRep) -> np.ndarray:
    # Re Tr(B_J^dagger M)/d; the basis images are orthonormal for this pairing
    return np.real(np.einsum("jab,...ab->...j", r.basis_images.conj(), M)) / r.dim


def residual_norm(M: np.ndarray, r: CliffordRep) -> float:
    """Distance from ``M`` to the image subalgebra."""
    r.require_valid()
    M = np.asarray(M, dtype=complex)
    return float(np.linalg.norm(M - to_matrix(_coefficients(M, r), r)))


def from_matrix(M: np.ndarray, r: CliffordRep, tol: float = 1e-10) -> Multivector:
    """Inverse of :func:`to_matrix`, via trace inner products.

    Raises :class:`NotInImageError` if ``M`` is not the image of a real
    multivector (possible for the reducible 4x4 representation, or for any
    matrix with the wrong phases).
    """
    r.require_valid()
    M = np.asarray(M, dtype=complex)
    if M.shape != (r.dim, r.dim):
        raise RepresentationError(f"expected a {r.dim}x{r.dim} matrix, got {M.shape}")
    c = _coefficients(M, r)
    res = float(np.linalg.norm(M - to_matrix(c, r)))
    if res > tol * max(1.0, float(np.linalg.norm(M))):
        raise NotInImageError(res)
    return Multivector(c)


def grade0_via_trace(a: Multivector, r: CliffordRep) -> float:
    """``Re Tr(A)/d``; the real part drops the pseudoscalar's ``i * identity``."""
    A = to_matrix(a, r)
    return float(np.real(np.trace(A)) / r.dim)


def grade_k_via_trace(a: Multivector, k: int, r: CliffordRep) -> Multivector:
    """Grade-``k`` part from ``sum_J e_J <a ~e_J>_0``, each term by a trace."""
    if k not in (0, 1, 2, 3):
        raise ValueError(f"grade must be one of 0, 1, 2, 3; got {k!r}")
    A = to_matrix(a, r)
    c = np.zeros(8)
    for J in np.flatnonzero(GRADES == k):
        # image of the reverse is the Hermitian conjugate
        BJ_rev = r.basis_images[J].conj().T
        c[J] = np.real(np.trace(A @ BJ_rev)) / r.dim
    return Multivector(c)


def describe(r: CliffordRep) -> str:
    lines = [f"{r.name} (d={r.dim})"]
    for i, m in enumerate(r.sigma):
        lines.append(f"  s{i} =")
        for row in m:
            lines.append("    [" + "  ".join(_fmt_complex(z) for z in row) + "]")
    return "\n".join(lines)


def _fmt_complex(z: complex) -> str:
    re, im = z.real, z.imag
    if im == 0:
        return f"{re:+.0f}  "
    if re == 0:
        return f"{im:+.0f}i "
    return f"{re:+g}{im:+g}i"

