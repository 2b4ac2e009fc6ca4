"""Dense arithmetic in the geometric algebra of three-dimensional Euclidean space.

Coefficients are stored in the fixed order

    (1, e1, e2, e3, e23, e31, e12, e123)

so that bivector ``e_jk`` sits in the slot dual to ``e_i`` (``e23 <-> e1`` and so
on). The geometric product is driven by a structure-constant table generated
from ``e_i e_j + e_j e_i = 2 delta_ij`` when the module is imported.

Two layers are provided: array functions (``gp``, ``rev``, ``grade``) that
operate on the trailing axis of any ``(..., 8)`` array and are used by the
lattice code, and the immutable :class:`Multivector` value type.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

TOL = 1e-12

BLADES: tuple[tuple[int, ...], ...] = (
    (),
    (1,),
    (2,),
    (3,),
    (2, 3),
    (3, 1),
    (1, 2),
    (1, 2, 3),
)
BLADE_NAMES = ("1", "e1", "e2", "e3", "e23", "e31", "e12", "e123")
GRADES = np.array([len(b) for b in BLADES])
REVERSE_SIGNS = np.array([1.0 if g in (0, 1) else -1.0 for g in GRADES])


def _sort_blade(factors: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Reduce a word of basis vectors to (sign, sorted blade).

    Distinct vectors anticommute and ``e_i e_i = 1``.
    """
    word = list(factors)
    sign = 1
    # bubble sort, one sign flip per transposition of distinct neighbours
    changed = True
    while changed:
        changed = False
        i = 0
        while i < len(word) - 1:
            if word[i] > word[i + 1]:
                word[i], word[i + 1] = word[i + 1], word[i]
                sign = -sign
                changed = True
            elif word[i] == word[i + 1]:
                del word[i : i + 2]
                changed = True
                continue
            i += 1
    return sign, tuple(word)


def _build_tables() -> tuple[np.ndarray, np.ndarray]:
    canonical = {}
    for idx, blade in enumerate(BLADES):
        s, key = _sort_blade(blade)
        canonical[key] = (idx, s)
    index = np.zeros((8, 8), dtype=np.intp)
    sign = np.zeros((8, 8))
    for i, a in enumerate(BLADES):
        for j, b in enumerate(BLADES):
            s, key = _sort_blade(a + b)
            k, s_k = canonical[key]
            index[i, j] = k
            sign[i, j] = s * s_k
    index.setflags(write=False)
    sign.setflags(write=False)
    return index, sign


#: ``e_I e_J = PRODUCT_SIGN[I, J] * e_{PRODUCT_INDEX[I, J]}``
PRODUCT_INDEX, PRODUCT_SIGN = _build_tables()


# --------------------------------------------------------------------------- #
# array layer
# --------------------------------------------------------------------------- #


def _product_terms() -> tuple[tuple[tuple[int, int, bool], ...], ...]:
    terms: list[list[tuple[int, int, bool]]] = [[] for _ in range(8)]
    for i in range(8):
        for j in range(8):
            terms[PRODUCT_INDEX[i, j]].append((i, j, PRODUCT_SIGN[i, j] > 0))
    return tuple(tuple(t) for t in terms)


_TERMS = _product_terms()


def gp(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Geometric product over the trailing axis, broadcasting the leading axes."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    shape = np.broadcast_shapes(a.shape, b.shape)
    # component-major copies make every slice below contiguous
    A = np.ascontiguousarray(np.moveaxis(a, -1, 0))
    B = np.ascontiguousarray(np.moveaxis(b, -1, 0))
    out = np.empty((8,) + shape[:-1])
    for k, terms in enumerate(_TERMS):
        acc = np.zeros(shape[:-1])
        for i, j, positive in terms:
            if positive:
                acc += A[i] * B[j]
            else:
                acc -= A[i] * B[j]
        out[k] = acc
    return np.moveaxis(out, 0, -1)


def rev(a: np.ndarray) -> np.ndarray:
    return np.asarray(a) * REVERSE_SIGNS


def grade(a: np.ndarray, k: int) -> np.ndarray:
    if k not in (0, 1, 2, 3):
        raise ValueError(f"grade must be one of 0, 1, 2, 3; got {k!r}")
    return np.asarray(a) * (GRADES == k)


def rotor_array(theta: np.ndarray) -> np.ndarray:
    """Closed-form ``exp(1/2 (t1 e23 + t2 e31 + t3 e12))`` for ``theta[..., 3]``."""
    theta = np.asarray(theta, dtype=float)
    phi = np.sqrt(np.sum(theta**2, axis=-1))
    half = 0.5 * phi
    # sin(phi/2)/phi with the removable singularity at phi = 0
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(phi > 1e-8, np.sin(half) / np.where(phi > 0, phi, 1.0), 0.5 - phi**2 / 48.0)
    out = np.zeros(theta.shape[:-1] + (8,))
    out[..., 0] = np.cos(half)
    out[..., 4:7] = ratio[..., None] * theta
    return out


# --------------------------------------------------------------------------- #
# value type
# --------------------------------------------------------------------------- #


class PreconditionError(ValueError):
    """An operation was called with an argument violating its precondition."""


class CyclicityError(ArithmeticError):
    """Grade-0 projection of a product changed under a cyclic rotation."""


class Multivector:
    """Immutable element of Cl3(R) with eight real coefficients.

    ``*`` is the geometric product, ``~a`` is the reverse, and ``a[k]`` reads a
    coefficient by slot number or blade name (``a["e12"]``).
    """

    __slots__ = ("_c",)

    def __init__(self, coefficients: Iterable[float] | np.ndarray = ()) -> None:
        c = np.array(list(coefficients) if not isinstance(coefficients, np.ndarray) else coefficients, dtype=float)
        if c.size == 0:
            c = np.zeros(8)
        if c.shape != (8,):
            raise ValueError(f"a multivector needs 8 coefficients, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("multivector coefficients must be finite")
        c.setflags(write=False)
        self._c = c

    @classmethod
    def scalar(cls, value: float) -> Multivector:
        c = np.zeros(8)
        c[0] = value
        return cls(c)

    @classmethod
    def blade(cls, name: str, value: float = 1.0) -> Multivector:
        c = np.zeros(8)
        c[BLADE_NAMES.index(name)] = value
        return cls(c)

    @property
    def coefficients(self) -> np.ndarray:
        return self._c

    def __getitem__(self, key: int | str) -> float:
        if isinstance(key, str):
            key = BLADE_NAMES.index(key)
        return float(self._c[key])

    # arithmetic ----------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return Multivector(self._c + other._c)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return Multivector(self._c - other._c)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return Multivector(other._c - self._c)

    def __neg__(self) -> Multivector:
        return Multivector(-self._c)

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Multivector(self._c * float(other))
        if isinstance(other, Multivector):
            return Multivector(gp(self._c, other._c))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Multivector(self._c * float(other))
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Multivector(self._c / float(other))
        return NotImplemented

    def __invert__(self) -> Multivector:
        return Multivector(rev(self._c))

    def __eq__(self, other) -> bool:
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return bool(np.array_equal(self._c, other._c))

    def __hash__(self) -> int:
        return hash(self._c.tobytes())

    def isclose(self, other: Multivector | float, tol: float = TOL) -> bool:
        other = _coerce(other)
        return bool(np.max(np.abs(self._c - other._c)) <= tol)

    def grade(self, k: int) -> Multivector:
        return Multivector(grade(self._c, k))

    @property
    def scalar_part(self) -> float:
        return float(self._c[0])

    def norm2(self) -> float:
        """``<a ~a>_0``, the Euclidean norm squared of the coefficients."""
        return float(np.dot(self._c, self._c))

    def __repr__(self) -> str:
        parts = []
        for name, v in zip(BLADE_NAMES, self._c):
            if v == 0:
                continue
            mag = f"{abs(v):.6g}"
            body = mag if name == "1" else (name if mag == "1" else f"{mag}*{name}")
            parts.append(("-" if v < 0 else "+", body))
        if not parts:
            return "Multivector(0)"
        text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        text += "".join(f" {sign} {body}" for sign, body in parts[1:])
        return f"Multivector({text})"


def _coerce(x) -> Multivector | None:
    if isinstance(x, Multivector):
        return x
    if isinstance(x, (int, float, np.floating, np.integer)):
        return Multivector.scalar(float(x))
    return None


ONE = Multivector.scalar(1.0)
E1, E2, E3 = (Multivector.blade(n) for n in ("e1", "e2", "e3"))
E23, E31, E12 = (Multivector.blade(n) for n in ("e23", "e31", "e12"))
E123 = Multivector.blade("e123")
BASIS = tuple(Multivector.blade(n) for n in BLADE_NAMES)
VECTORS = (E1, E2, E3)


class Rotor(Multivector):
    """Unit even multivector (scalar plus bivector)."""

    __slots__ = ()

    def __init__(self, coefficients, tol: float = TOL) -> None:
        super().__init__(coefficients)
        c = self._c
        if np.any(np.abs(c[[1, 2, 3, 7]]) > tol):
            raise PreconditionError("a rotor has only scalar and bivector parts")
        if abs(np.dot(c, c) - 1.0) > tol:
            raise PreconditionError(f"rotor is not unit: S ~S = {np.dot(c, c)!r}")


class BoostParavector(Multivector):
    """``exp(1/2 w_i e_i)``; scalar plus vector, its own reverse."""

    __slots__ = ("rapidity",)

    def __init__(self, coefficients, rapidity: Sequence[float]) -> None:
        super().__init__(coefficients)
        if np.any(self._c[4:] != 0):
            raise PreconditionError("a boost paravector has only scalar and vector parts")
        object.__setattr__(self, "rapidity", tuple(float(w) for w in rapidity))


# --------------------------------------------------------------------------- #
# operations
# --------------------------------------------------------------------------- #


def geometric_product(a: Multivector, b: Multivector) -> Multivector:
    return a * b


def reverse(a: Multivector) -> Multivector:
    return ~a


def grade_projection(a: Multivector, k: int) -> Multivector:
    """Grade-``k`` part of ``a``; ``k`` outside 0..3 is a domain error."""
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)):
        raise TypeError("grade must be an integer")
    return a.grade(int(k))


def product(factors: Sequence[Multivector]) -> Multivector:
    out = ONE
    for f in factors:
        out = out * f
    return out


def grade0_cyclic_check(factors: Sequence[Multivector], tol: float = TOL) -> float:
    """Return ``<f1 f2 ... fn>_0`` after confirming every cyclic rotation agrees."""
    factors = list(factors)
    if not factors:
        raise ValueError("need at least one factor")
    values = [product(factors[i:] + factors[:i]).scalar_part for i in range(len(factors))]
    scale = max(1.0, max(abs(v) for v in values))
    spread = max(values) - min(values)
    if spread > tol * scale:
        raise CyclicityError(f"grade-0 value varies by {spread:.3e} across cyclic rotations")
    return values[0]


def rotor_exp(theta: Sequence[float]) -> Rotor:
    """Rotor ``exp(1/4 eps_ijk theta_i e_j e_k) = exp(1/2 (t1 e23 + t2 e31 + t3 e12))``.

    With this orientation, ``theta = (0, 0, t)`` sends ``e1`` to
    ``cos(t) e1 - sin(t) e2`` under ``sandwich``: a positive angle turns the
    ``e1 e2`` plane from ``e2`` towards ``e1``.
    """
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (3,) or not np.all(np.isfinite(theta)):
        raise ValueError("theta must be three finite angles")
    return Rotor(rotor_array(theta))


def is_unit(S: Multivector, tol: float = TOL) -> bool:
    return (S * ~S).isclose(ONE, tol)


def sandwich(S: Multivector, a: Multivector, tol: float = TOL) -> Multivector:
    """``S a ~S`` for a unit rotor ``S``."""
    if not is_unit(S, tol):
        raise PreconditionError("sandwich needs a unit rotor (S ~S = 1)")
    return S * a * ~S


def boost(w: Sequence[float]) -> BoostParavector:
    """Boost paravector ``exp(1/2 w_i e_i) = cosh(|w|/2) + sinh(|w|/2) w/|w|``."""
    w = np.asarray(w, dtype=float)
    if w.shape != (3,) or not np.all(np.isfinite(w)):
        raise ValueError("rapidity must be three finite numbers")
    r = float(np.linalg.norm(w))
    c = np.zeros(8)
    c[0] = math.cosh(0.5 * r)
    if r > 0:
        c[1:4] = math.sinh(0.5 * r) * w / r
    return BoostParavector(c, w)


def boost_volume(B: Multivector, d3x: Multivector) -> Multivector:
    """Volume element under a boost: two unreversed paravector factors."""
    return B * d3x * B


def random_multivector(rng: np.random.Generator, scale: float = 1.0) -> Multivector:
    return Multivector(scale * rng.standard_normal(8))


def random_rotor(rng: np.random.Generator) -> Rotor:
    return rotor_exp(rng.uniform(-math.pi, math.pi, size=3))
