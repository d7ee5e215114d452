"""Dynamical degrees of automorphisms constrained by non-vanishing conditions.

Profiles come in three modes:

* ``multiplicative``: exact values ``λ_0, ..., λ_k``;
* ``exponent``: ``λ_p = λ_1**e_p`` with rational ``e_p`` under ``λ_1 > 1``;
* ``additive``: polynomial growth exponents ``m_p`` (when every ``λ_p = 1``).

Exponent and additive profiles obey the same linear inequalities, so the
rigidity argument is written once over exponents and read in either mode.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from .errors import MathError
from .exact import as_rational, format_rational

MULTIPLICATIVE = "multiplicative"
EXPONENT = "exponent"
ADDITIVE = "additive"
MODES = (MULTIPLICATIVE, EXPONENT, ADDITIVE)

RULES = ("gate", "eigen-class powering", "log-concavity equalization", "duality flip",
         "comparison", "contradiction", "cited-external")

NO_CONCLUSION = "hypotheses unmet, no conclusion"


@dataclass(frozen=True)
class DegreeProfile:
    values: tuple[Fraction, ...]
    mode: str = MULTIPLICATIVE
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        if self.mode not in MODES:
            raise MathError(f"unknown profile mode {self.mode!r}")
        vals = tuple(as_rational(v) for v in self.values)
        if len(vals) < 2:
            raise MathError("a profile needs at least lambda_0 and lambda_k")
        if self.mode == MULTIPLICATIVE and any(v <= 0 for v in vals):
            raise MathError("dynamical degrees must be positive")
        object.__setattr__(self, "values", vals)

    @property
    def k(self) -> int:
        return len(self.values) - 1

    def to_dict(self) -> dict:
        out = {"mode": self.mode, "values": [format_rational(v) for v in self.values]}
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def duality_flip(profile: DegreeProfile) -> DegreeProfile:
    """Profile of the inverse map: ``λ_p(f**-1) = λ_(k-p)(f)``."""
    return DegreeProfile(tuple(reversed(profile.values)), profile.mode, profile.notes)


def hyperkahler_profile(l: int, lambda1) -> DegreeProfile:
    """``λ_p = λ_1**min(p, 2l-p)`` on a 2l-dimensional manifold."""
    if l < 1:
        raise MathError("l must be positive")
    lam = as_rational(lambda1)
    if lam < 1:
        raise MathError("the first dynamical degree of an automorphism is at least 1")
    vals = tuple(lam ** min(p, 2 * l - p) for p in range(2 * l + 1))
    return DegreeProfile(vals, MULTIPLICATIVE, (f"lambda_1(f^-1) = lambda_1(f) = {format_rational(lam)}",))


def check_log_concavity(profile: DegreeProfile) -> bool:
    v = profile.values
    if profile.mode == MULTIPLICATIVE:
        return all(v[p - 1] * v[p + 1] <= v[p] ** 2 for p in range(1, len(v) - 1))
    return all(v[p - 1] + v[p + 1] <= 2 * v[p] for p in range(1, len(v) - 1))


@dataclass(frozen=True)
class EntropyReport:
    """Entropy is ``log(entropy_base)`` (multiplicative) or ``entropy_factor * log λ_1`` (exponent)."""

    entropy_base: Fraction | None
    entropy_factor: Fraction | None
    cohomologically_hyperbolic: bool
    dominant_index: int | None

    @property
    def expression(self) -> str:
        if self.entropy_base is not None:
            return "0" if self.entropy_base == 1 else f"log({format_rational(self.entropy_base)})"
        if self.entropy_factor is not None:
            return "0" if self.entropy_factor == 0 else f"{format_rational(self.entropy_factor)}*log(lambda_1)"
        return "0"

    def to_dict(self) -> dict:
        return {
            "entropy": self.expression,
            "entropy_log_of": None if self.entropy_base is None else format_rational(self.entropy_base),
            "cohomologically_hyperbolic": self.cohomologically_hyperbolic,
            "dominant_index": self.dominant_index,
        }


def entropy_and_hyperbolicity(profile: DegreeProfile) -> EntropyReport:
    """Gromov-Yomdin entropy ``max_p log λ_p`` and the uniqueness of the maximum."""
    vals = profile.values
    if profile.mode == ADDITIVE:
        # every dynamical degree equals 1
        return EntropyReport(Fraction(1), None, False, None)
    top = max(vals[1:])
    hits = [p for p in range(1, len(vals)) if vals[p] == top]
    # the maximum must also beat λ_0 = 1 (exponent 0) to be dominant
    base = vals[0]
    unique = len(hits) == 1 and top > base
    dominant = hits[0] if unique else None
    if profile.mode == MULTIPLICATIVE:
        return EntropyReport(top, None, unique, dominant)
    return EntropyReport(None, top, unique, dominant)


@dataclass(frozen=True)
class DerivationStep:
    rule: str
    relation: str
    justification: str

    def __post_init__(self):
        if self.rule not in RULES:
            raise ValueError(f"unregistered derivation rule {self.rule!r}")

    def to_dict(self) -> dict:
        return {"rule": self.rule, "relation": self.relation, "justification": self.justification}


@dataclass(frozen=True)
class DerivationTrace:
    k: int
    r: int
    q: int
    mode: str
    steps: tuple[DerivationStep, ...]
    verdict: str
    lower_bounds: tuple[tuple[int, int], ...] = ()

    @property
    def concluded(self) -> bool:
        return self.verdict != NO_CONCLUSION

    def to_dict(self) -> dict:
        return {
            "k": self.k, "r": self.r, "q": self.q, "mode": self.mode,
            "steps": [s.to_dict() for s in self.steps],
            "verdict": self.verdict,
            "exponent_lower_bounds": {str(p): e for p, e in self.lower_bounds},
        }


def derive_rigidity(k: int, r: int, q: int, mode: str = MULTIPLICATIVE, inverse: bool = False) -> DerivationTrace:
    """Show ``λ_1 = 1`` (or ``m_1 = 0``) from a condition ``C(r, q)`` on a k-fold.

    The argument runs over exponents ``e_p``: ``λ_p = λ_1**e_p`` when
    ``λ_1 > 1`` (multiplicative reading) or ``e_p = m_p`` for the polynomial
    growth of ``f*`` (additive reading).  With ``inverse=True`` the chain is
    written for ``f**-1`` first and transported back by duality.
    """
    if mode == EXPONENT:
        mode = MULTIPLICATIVE
    if mode not in (MULTIPLICATIVE, ADDITIVE):
        raise MathError(f"unknown rigidity mode {mode!r}")
    if k < 1:
        raise MathError("dimension must be positive")
    if not -1 <= r <= k - 1:
        raise MathError(f"r = {r} out of range for dimension {k}")
    if not 0 <= q <= k - r - 1:
        raise MathError(f"q = {q} out of range")
    n = k - r - 1 - q
    lo, hi = r + 1, k - r - 1
    sym = "m" if mode == ADDITIVE else "e"
    g, h = ("f^-1", "f") if inverse else ("f", "f^-1")
    gate1, gate2 = k > 2 * r + 2, n > r + 1
    steps = [
        DerivationStep("gate", f"k = {k} {'>' if gate1 else '<='} 2r+2 = {2 * r + 2}",
                       "the indices r+1 and k-r-1 must be distinct"),
        DerivationStep("gate", f"n = k-r-1-q = {n} {'>' if gate2 else '<='} r+1 = {r + 1}",
                       "the eigenclass power must exceed r+1"),
    ]
    if not (gate1 and gate2):
        return DerivationTrace(k, r, q, mode, tuple(steps), NO_CONCLUSION)
    hyp = "lambda_1 > 1" if mode == MULTIPLICATIVE else "m_1 > 0"
    steps += [
        DerivationStep("eigen-class powering",
                       f"{sym}_{lo}({g}) = {lo}, ..., {sym}_{n}({g}) = {n}  ({sym}_j = j for j <= n)",
                       f"assume {hyp}; a nef eigenclass zeta of {g} has zeta^n K^q != 0 by the condition, "
                       "so zeta^j != 0 for j <= n"),
        DerivationStep("log-concavity equalization", f"{sym}_j({g}) <= j {sym}_1({g}) = j",
                       "concavity of p -> " + sym + "_p with " + sym + "_0 = 0 caps the lower bounds"),
        DerivationStep("eigen-class powering", f"{sym}_{hi}({g}) >= {n}",
                       f"K is invariant, so zeta^{n} K^{q} is an eigenclass in degree {hi}"),
        DerivationStep("comparison", f"{sym}_{hi}({g}) >= {n} > {lo} = {sym}_{lo}({g})",
                       f"n = {n} > r+1 = {lo}"),
        DerivationStep("duality flip", f"{sym}_p({h}) = {sym}_(k-p)({g}); {hyp} holds for {h} as well",
                       "Poincaré duality exchanges degrees p and k-p between a map and its inverse"),
        DerivationStep("comparison", f"{sym}_{hi}({h}) > {sym}_{lo}({h}), i.e. {sym}_{lo}({g}) > {sym}_{hi}({g})",
                       f"the same chain applied to {h}"),
        DerivationStep("contradiction", f"{sym}_{hi}({g}) > {sym}_{lo}({g}) and {sym}_{lo}({g}) > {sym}_{hi}({g})",
                       f"so {hyp} is impossible"),
    ]
    if mode == ADDITIVE:
        verdict = "m₁=0"
        steps.append(DerivationStep(
            "cited-external", "Aut(X) has finitely many connected components",
            "Lieberman-type finiteness from m_1 = 0 for every automorphism; cited, not derived"))
    else:
        verdict = "λ₁=1"
    bounds = tuple((j, j) for j in range(1, n + 1))
    if hi > n:
        bounds += ((hi, n),)
    return DerivationTrace(k, r, q, mode, tuple(steps), verdict, bounds)
