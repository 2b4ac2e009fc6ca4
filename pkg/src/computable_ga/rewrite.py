"""Symbolic transformation laws, normalization and the computability verdict.

A basis rotation replaces every tagged factor by its image (covariant fields
``X -> S X ~S``, connections ``W_k -> S W_k ~S - S dS~_k``, reference elements
unchanged) and distributes derivatives over the image by the product rule.
:func:`normalize` then rewrites to a fixed point:

1. a derivative of a constant factor (``e^k``, ``I``, ``d3x``) kills the term;
2. ``S ~S`` and ``~S S`` cancel;
3. grade-0/3 factors move left past rotor symbols;
4. ``dS~_k S -> -~S dS_k`` (differentiated ``~S S = 1``);
5. ``S dS~_k -> -~S dS_k`` as printed in the source derivation, or
   ``-dS_k ~S`` with ``rule="derived"``;
6. a leading ``S`` and trailing ``~S`` cancel under the grade-0 projection;
7. like terms merge (up to cyclic rotation when the order is free).

An expression containing a right-acting derivative keeps its factor order;
otherwise any cyclic ordering may be evaluated, so a rotor symbol surviving
anywhere can be rotated into an outer position.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as cartesian
from typing import Callable, Literal

from .expressions import (
    Factor,
    GaExpr,
    Tag,
    Term,
    deriv,
    displacement,
    is_central,
    reverse_word,
    rotor,
    units,
)

Word = tuple[Factor, ...]
Alternatives = list[tuple[float, Word]]
Rule = Literal["printed", "derived"]
Kind = Literal["identity", "basis-rotation", "coordinate-rotation", "translation", "gauge"]

MAX_PASSES = 64
WEIGHT_EPS = 1e-12


class RewriteLimitError(RuntimeError):
    """Normalization did not reach a fixed point within the pass budget."""


# --------------------------------------------------------------------------- #
# transformation images
# --------------------------------------------------------------------------- #

S = rotor()
S_REV = rotor(rev=True)
R = rotor(symbol="R")
R_REV = rotor(rev=True, symbol="R")


def _prime(index: str) -> str:
    return index if index.endswith("'") else index + "'"


def _image_basis(atom: Factor) -> Alternatives:
    if atom.tag in (Tag.COVARIANT_FIELD, Tag.COVARIANT_CONNECTION, Tag.VOLUME):
        return [(1.0, (S, atom, S_REV))]
    if atom.tag is Tag.CONNECTION:
        return [(1.0, (S, atom, S_REV)), (-1.0, (S, rotor(rev=True, derivs=(atom.index,))))]
    return [(1.0, (atom,))]


def _image_gauge(atom: Factor) -> Alternatives:
    if atom.tag is Tag.COVARIANT_FIELD and atom.symbol == "F":
        return [(1.0, (atom, S))]
    if atom.tag is Tag.CONNECTION:
        return [(1.0, (S_REV, atom, S)), (-1.0, (S_REV, rotor(derivs=(atom.index,))))]
    return [(1.0, (atom,))]


def _image_coordinate(atom: Factor) -> Alternatives:
    if atom.tag is Tag.CONNECTION:
        return [(1.0, (Factor(atom.symbol, atom.tag, _prime(atom.index)),))]
    if atom.tag is Tag.COVARIANT_CONNECTION:
        return [
            (1.0, (Factor(atom.symbol, atom.tag, _prime(atom.index)),)),
            (-1.0, (R_REV, rotor(derivs=(atom.index,), symbol="R"))),
        ]
    return [(1.0, (atom,))]


def _translation_image(dummy: str) -> Callable[[Factor], Alternatives]:
    def image(atom: Factor) -> Alternatives:
        if atom.tag in (Tag.CONNECTION, Tag.COVARIANT_CONNECTION):
            moved = Factor(atom.symbol, atom.tag, dummy)
            return [
                (1.0, (atom,)),
                (-1.0, (displacement(dummy), deriv(dummy), atom)),
                (-1.0, (deriv(atom.index), displacement(dummy), moved)),
            ]
        if atom.tag is Tag.COVARIANT_FIELD:
            return [(1.0, (atom,)), (-1.0, (displacement(dummy), deriv(dummy), atom))]
        return [(1.0, (atom,))]

    return image


def _image_unit(unit: Word, base: Callable[[Factor], Alternatives], drop_rotor_derivs: bool) -> Alternatives:
    *ds, atom = unit
    if atom.rev:
        plain = Factor(atom.symbol, atom.tag, atom.index, False, atom.derivs)
        alts = []
        for w, word in base(plain):
            s, rw = reverse_word(word)
            alts.append((w * s, rw))
    else:
        alts = base(atom)
    # innermost derivative first
    for d in reversed(ds):
        alts = [x for w, word in alts for x in _differentiate(d.index, w, word, drop_rotor_derivs)]
    return alts


def _differentiate(index: str, weight: float, word: Word, drop_rotor_derivs: bool) -> Alternatives:
    """Product rule over the units of ``word``."""
    us = units(word)
    out: Alternatives = []
    for i, u in enumerate(us):
        atom = u[-1]
        if atom.tag is Tag.ROTOR:
            if drop_rotor_derivs:
                continue
            du: Word = u[:-1] + (rotor(atom.rev, atom.derivs + (index,), atom.symbol),)
        elif atom.symbol in ("e", "I", "d3x"):
            continue
        else:
            du = (deriv(index),) + u
        new = tuple(f for v in us[:i] for f in v) + du + tuple(f for v in us[i + 1 :] for f in v)
        out.append((weight, new))
    return out


def _transform(e: GaExpr, base: Callable[[Factor], Alternatives], drop_rotor_derivs: bool = False) -> GaExpr:
    terms: list[Term] = []
    for t in e.terms:
        per_unit = [_image_unit(u, base, drop_rotor_derivs) for u in t.units()]
        for combo in cartesian(*per_unit):
            w = t.weight
            word: Word = ()
            for cw, cword in combo:
                w *= cw
                word += cword
            if drop_rotor_derivs and any(f.is_rotor and f.derivs for f in word):
                continue
            terms.append(Term(w, word))
    return GaExpr(tuple(terms))


def apply_basis_rotation(e: GaExpr, homogeneous: bool = False) -> GaExpr:
    """Image under a local rotation of the Clifford basis (no simplification).

    With ``homogeneous=True`` the rotor is constant and every ``dS`` term is dropped.
    """
    return _transform(e, _image_basis, drop_rotor_derivs=homogeneous)


def _unused_index(e: GaExpr) -> str:
    used = {f.index for t in e.terms for f in t.factors if f.index} | {
        i for t in e.terms for f in t.factors for i in f.derivs
    }
    for c in "nmpqrs":
        if c not in used:
            return c
    raise ValueError("no free dummy index")


def transform_under(e: GaExpr, kind: Kind, homogeneous: bool = False) -> GaExpr:
    """Image of ``e`` under one of the supported transformation laws.

    ``translation`` is the infinitesimal shift ``x -> x + eps`` kept to first
    order in ``eps``; ``gauge`` is ``F -> F S``, ``W -> ~S W S - ~S dS``;
    ``coordinate-rotation`` primes one-form indices and gives ``w`` its
    ``-~R dR`` term.
    """
    if kind == "identity":
        return e
    if kind == "basis-rotation":
        return apply_basis_rotation(e, homogeneous)
    if kind == "gauge":
        return _transform(e, _image_gauge, drop_rotor_derivs=homogeneous)
    if kind == "coordinate-rotation":
        return _transform(e, _image_coordinate)
    if kind == "translation":
        out = _transform(e, _translation_image(_unused_index(e)))
        first_order = [t for t in out.terms if sum(f.symbol == "eps" for f in t.factors) <= 1]
        return GaExpr(tuple(first_order))
    raise ValueError(f"unsupported transformation kind {kind!r}")


# --------------------------------------------------------------------------- #
# normalization
# --------------------------------------------------------------------------- #


def _inverse_pair(a: Factor, b: Factor) -> bool:
    return a.is_plain_rotor and b.is_plain_rotor and a.symbol == b.symbol and a.rev != b.rev


def _flatten(us: list[Word]) -> Word:
    return tuple(f for u in us for f in u)


def _rule_constant_derivative(t: Term, rule: Rule) -> Term | None:
    for u in t.units():
        if len(u) > 1 and u[-1].symbol in ("e", "I", "d3x"):
            return None
    return t


def _rule_cancel(t: Term, rule: Rule) -> Term | None:
    us = t.units()
    for i in range(len(us) - 1):
        if len(us[i]) == 1 and len(us[i + 1]) == 1 and _inverse_pair(us[i][0], us[i + 1][0]):
            return Term(t.weight, _flatten(us[:i] + us[i + 2 :]))
    return t


def _rule_central(t: Term, rule: Rule) -> Term | None:
    us = t.units()
    for i in range(1, len(us)):
        if is_central(us[i]) and us[i - 1][-1].is_rotor:
            us[i - 1], us[i] = us[i], us[i - 1]
            return Term(t.weight, _flatten(us))
    return t


def _single_deriv(f: Factor) -> bool:
    return f.is_rotor and len(f.derivs) == 1


def _rule_dS_rev_S(t: Term, rule: Rule) -> Term | None:
    fs = t.factors
    for i in range(len(fs) - 1):
        a, b = fs[i], fs[i + 1]
        if _single_deriv(a) and a.rev and b.is_plain_rotor and not b.rev and a.symbol == b.symbol:
            new = (rotor(True, symbol=a.symbol), rotor(False, a.derivs, a.symbol))
            return Term(-t.weight, fs[:i] + new + fs[i + 2 :])
    return t


def _rule_S_dS_rev(t: Term, rule: Rule) -> Term | None:
    fs = t.factors
    for i in range(len(fs) - 1):
        a, b = fs[i], fs[i + 1]
        if a.is_plain_rotor and not a.rev and _single_deriv(b) and b.rev and a.symbol == b.symbol:
            if rule == "printed":
                new = (rotor(True, symbol=a.symbol), rotor(False, b.derivs, a.symbol))
            else:
                new = (rotor(False, b.derivs, a.symbol), rotor(True, symbol=a.symbol))
            return Term(-t.weight, fs[:i] + new + fs[i + 2 :])
    return t


def _rule_outer_pair(t: Term, rule: Rule) -> Term | None:
    us = t.units()
    lead = 0
    while lead < len(us) and is_central(us[lead]):
        lead += 1
    core = us[lead:]
    if len(core) >= 2 and len(core[0]) == 1 and len(core[-1]) == 1 and _inverse_pair(core[0][0], core[-1][0]):
        return Term(t.weight, _flatten(us[:lead] + core[1:-1]))
    return t


RULES = (
    _rule_constant_derivative,
    _rule_cancel,
    _rule_central,
    _rule_dS_rev_S,
    _rule_S_dS_rev,
    _rule_outer_pair,
)


def _step(t: Term, rule: Rule) -> Term | None:
    """One rewrite: the highest-priority rule that matches, at its leftmost match."""
    for r in RULES:
        out = r(t, rule)
        if out is not t:
            return out
    return t


def _cyclic_key(t: Term) -> tuple[str, ...]:
    words = [" ".join(f.text() for f in u) for u in t.units()]
    if not words:
        return ()
    return min(tuple(words[i:] + words[:i]) for i in range(len(words)))


def _merge(terms: list[Term], fixed_order: bool) -> tuple[Term, ...]:
    weights: dict[object, float] = {}
    first: dict[object, Word] = {}
    for t in terms:
        key = t.factors if fixed_order else _cyclic_key(t)
        if key not in weights:
            weights[key] = 0.0
            first[key] = t.factors
        weights[key] += t.weight
    return tuple(Term(w, first[k]) for k, w in weights.items() if abs(w) > WEIGHT_EPS)


def normalize(e: GaExpr, rule: Rule = "printed", max_passes: int = MAX_PASSES, fixed_order: bool | None = None) -> GaExpr:
    """Rewrite to a fixed point (see the module docstring for the rule list).

    Each pass makes one rewrite step per term and then merges like terms;
    :class:`RewriteLimitError` is raised after ``max_passes`` passes.
    """
    if rule not in ("printed", "derived"):
        raise ValueError(f"unknown rotor-derivative rule {rule!r}")
    order = e.fixed_order if fixed_order is None else fixed_order
    current = GaExpr(_merge(list(e.terms), order))
    for _ in range(max_passes):
        rewritten = []
        for t in current.terms:
            t = _step(t, rule)
            if t is not None:
                rewritten.append(t)
        nxt = GaExpr(_merge(rewritten, order))
        if nxt == current:
            return current
        current = nxt
    raise RewriteLimitError(f"no fixed point after {max_passes} passes")


# --------------------------------------------------------------------------- #
# computability
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class OuterOperator:
    """A rotor symbol found next to the state vector."""

    term: int  # index into the normalized expression
    ordering: int  # 1 = the order as written; k = rotated left by k-1 units
    position: Literal["first", "last"]
    factor: Factor

    def describe(self) -> str:
        return f"outer {self.factor.pretty()} in ordering #{self.ordering}"


@dataclass(frozen=True)
class ComputabilityReport:
    computable: bool
    residual: tuple[OuterOperator, ...]
    normalized: GaExpr
    transformed: GaExpr
    fixed_order: bool

    @property
    def verdict(self) -> str:
        return "computable" if self.computable else "not-computable"

    def summary(self) -> str:
        if self.computable:
            return "computable"
        first = self.residual[0]
        extra = f", term {first.term + 1}" if len(self.normalized) > 1 else ""
        return f"not-computable ({first.describe()}{extra})"


def _outer_scan(t: Term, ti: int, fixed_order: bool) -> list[OuterOperator]:
    core = [u for u in t.units() if not is_central(u)]
    if not core:
        return []
    rotations = [core] if fixed_order else [core[i:] + core[:i] for i in range(len(core))]
    found = []
    for n, seq in enumerate(rotations, start=1):
        if seq[0][-1].is_rotor:
            found.append(OuterOperator(ti, n, "first", seq[0][-1]))
        if seq[-1][-1].is_rotor and (len(seq) > 1 or not seq[0][-1].is_rotor):
            found.append(OuterOperator(ti, n, "last", seq[-1][-1]))
    return found


def check_computable(e: GaExpr, rule: Rule = "printed", max_passes: int = MAX_PASSES) -> ComputabilityReport:
    """Apply an inhomogeneous basis rotation, normalize, then scan outer positions.

    With a fixed order only the written order is scanned; otherwise every
    cyclic ordering is. The sum is computable iff no term has an outer rotor.
    """
    fixed = e.fixed_order
    transformed = apply_basis_rotation(e, homogeneous=False)
    normal = normalize(transformed, rule, max_passes, fixed_order=fixed)
    residual = [op for i, t in enumerate(normal.terms) for op in _outer_scan(t, i, fixed)]
    return ComputabilityReport(not residual, tuple(residual), normal, transformed, fixed)


#: The five expressions whose verdicts are fixed by the source derivation.
CANONICAL = {
    "covariant-observable": ("<F~ O F>0", True),
    "reference-vector": ("<F~ e^i F>0", False),
    "free-hamiltonian": ("<d3x F~ e^k d_k F>0", False),
    "h-plus": ("<d3x F~ e^k d_k F>0 + <d3x F~ e^k [F, W_k]>0 + <d3x F~ e^k W_k F>0", True),
    "h-minus": ("<d3x F~ e^k d_k F>0 + <d3x F~ e^k [F, W_k]>0 - <d3x F~ e^k W_k F>0", True),
}
