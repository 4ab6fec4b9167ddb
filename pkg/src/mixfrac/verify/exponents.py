"""Exponent algebra for fractional integrals and their commutators.

All arithmetic is carried out on exact rationals, so residuals of the
proportionality check below are exactly zero when the relation holds for
rational input.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import InvalidArgument
from ..mixed_norms import ExponentVector, exact_exponent

__all__ = ["ExponentPair", "RelationResult", "NogayamaCheck", "exponent_relation", "nogayama_relation_check"]


def _vectors(p, q):
    p, q = ExponentVector(p), ExponentVector(q)
    if p.n != q.n:
        raise InvalidArgument(f"exponent vectors have different dimensions ({p.n} and {q.n})")
    return p, q


def _inv_sum(v: ExponentVector) -> Fraction:
    return sum((1 / e for e in v.exact), Fraction(0))


@dataclass(frozen=True)
class RelationResult:
    """``alpha = sum 1/p_i - sum 1/q_i (- beta)`` with admissibility flags.

    ``flags`` holds ``ordered`` (``p_i <= q_i`` for all ``i``), ``distinct``
    (``p != q``), ``alpha_in_range`` (``0 < alpha < n``) and, when ``beta`` is
    given, ``beta_in_range`` (``0 < beta < 1``) and ``sum_in_range``
    (``alpha + beta < n``).  ``boundary`` marks admissible pairs with
    ``p_i = q_i`` for some ``i``.
    """

    alpha_exact: Fraction
    n: int
    flags: dict
    beta: Fraction | None = None

    @property
    def alpha(self) -> float:
        return float(self.alpha_exact)

    def __float__(self):
        return self.alpha

    @property
    def admissible(self) -> bool:
        return all(v for k, v in self.flags.items() if k != "boundary")

    @property
    def boundary_admissible(self) -> bool:
        return self.admissible and self.flags["boundary"]

    @property
    def tag(self) -> str:
        if not self.admissible:
            return "inadmissible"
        return "boundary-admissible" if self.flags["boundary"] else "admissible"

    def to_dict(self) -> dict:
        d = {"alpha": self.alpha, "alpha_exact": str(self.alpha_exact), "tag": self.tag, "flags": dict(self.flags)}
        if self.beta is not None:
            d["beta"] = float(self.beta)
        return d


def exponent_relation(p, q, beta=None) -> RelationResult:
    """Order ``alpha`` of the fractional integral balancing ``L^p -> L^q``.

    With ``beta`` (Lipschitz order) the returned ``alpha`` is
    ``sum 1/p_i - sum 1/q_i - beta``.
    """
    p, q = _vectors(p, q)
    n = p.n
    alpha = _inv_sum(p) - _inv_sum(q)
    flags = {
        "ordered": all(a <= b for a, b in zip(p.exact, q.exact)),
        "distinct": p.exact != q.exact,
    }
    b = None
    if beta is not None:
        b = exact_exponent(beta)
        alpha = alpha - b
        flags["beta_in_range"] = 0 < b < 1
        flags["sum_in_range"] = alpha + b < n
    flags["alpha_in_range"] = 0 < alpha < n
    flags["boundary"] = any(a == c for a, c in zip(p.exact, q.exact))
    return RelationResult(alpha, n, flags, b)


@dataclass(frozen=True)
class NogayamaCheck:
    """Outcome of the proportionality check ``p_j sum 1/p = q_j sum 1/q``."""

    holds: bool
    residuals: tuple
    companion: dict = field(default_factory=dict)

    def __bool__(self):
        return self.holds

    def to_dict(self) -> dict:
        return {"holds": self.holds, "residuals": list(self.residuals), "companion": dict(self.companion)}


def nogayama_relation_check(p, q, tol: float = 1e-12) -> NogayamaCheck:
    """Check ``p_j * sum_i 1/p_i == q_j * sum_i 1/q_i`` for every ``j``.

    ``companion`` records the consequence that must follow whenever the
    relation holds with a positive ``alpha``: ``sum 1/p > sum 1/q`` and
    ``p_j < q_j`` for every ``j``.
    """
    p, q = _vectors(p, q)
    sp, sq = _inv_sum(p), _inv_sum(q)
    residuals = tuple(float(a * sp - b * sq) for a, b in zip(p.exact, q.exact))
    holds = all(abs(r) <= tol for r in residuals)
    applies = holds and sp - sq > 0
    companion = {"applies": applies}
    if applies:
        companion["sum_strict"] = sp > sq
        companion["componentwise_strict"] = all(a < b for a, b in zip(p.exact, q.exact))
        companion["holds"] = companion["sum_strict"] and companion["componentwise_strict"]
    return NogayamaCheck(holds, residuals, companion)


@dataclass(frozen=True)
class ExponentPair:
    """Exponent pair ``(p, q)`` with the derived ``alpha`` and an optional Lipschitz order ``beta``.

    ``stated_alpha``, when given, is checked against the derived value: the
    relation result then carries a ``relation`` flag that is false unless the
    two agree exactly.
    """

    p: ExponentVector
    q: ExponentVector
    beta: float | None = None
    stated_alpha: float | None = None

    def __post_init__(self):
        p, q = _vectors(self.p, self.q)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        if self.beta is not None:
            object.__setattr__(self, "beta", exact_exponent(self.beta))
        if self.stated_alpha is not None:
            object.__setattr__(self, "stated_alpha", exact_exponent(self.stated_alpha))

    @property
    def relation(self) -> RelationResult:
        rel = exponent_relation(self.p, self.q, self.beta)
        if self.stated_alpha is not None:
            rel.flags["relation"] = rel.alpha_exact == self.stated_alpha
        return rel

    @property
    def alpha(self) -> float:
        return self.relation.alpha

    @property
    def n(self) -> int:
        return self.p.n

    @property
    def admissible(self) -> bool:
        return self.relation.admissible

    def require_admissible(self) -> RelationResult:
        rel = self.relation
        if not rel.admissible:
            bad = sorted(k for k, v in rel.flags.items() if k != "boundary" and not v)
            raise InvalidArgument(f"inadmissible exponent pair (failed: {', '.join(bad)}; alpha = {rel.alpha_exact})")
        return rel

    def to_dict(self) -> dict:
        d = self.relation.to_dict()
        d["p"] = [str(v) for v in self.p.exact]
        d["q"] = [str(v) for v in self.q.exact]
        if self.beta is not None:
            d["beta"] = str(self.beta)
        if self.stated_alpha is not None:
            d["stated_alpha"] = str(self.stated_alpha)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExponentPair":
        return cls(ExponentVector(d["p"]), ExponentVector(d["q"]), d.get("beta"), d.get("stated_alpha"))
