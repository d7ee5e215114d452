"""Non-vanishing conditions A/B/NA/NB(r, q) and their propagation along towers.

A condition ``C(r, q)`` on a ``k``-dimensional manifold asks that a nef class
``ζ`` with ``ζ**(k-r-1-q) · K**q = 0`` be zero (B, NB) or proportional to a
rational class (A, NA).  The letters N restrict ``ζ`` to the Néron-Severi
part.  Certificates record which inheritance rule fired and every geometric
assertion (movability, proper intersection) that had to be taken on trust.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from . import algebra
from .algebra import BaseModel, CenterModel, Tower
from .errors import MathError
from .exact import (
    RootReport,
    UniPoly,
    as_rational,
    binomial,
    classify_real_roots,
    format_rational,
    poly_gcd_many,
    resultant,
)

KINDS = ("A", "B", "NA", "NB")

# kind -> kinds it implies (B is the strongest, NA the weakest)
IMPLIES = {
    "B": frozenset({"B", "A", "NB", "NA"}),
    "A": frozenset({"A", "NA"}),
    "NB": frozenset({"NB", "NA"}),
    "NA": frozenset({"NA"}),
}

HOLDS = "holds"
CONDITIONAL = "holds_conditionally"
NOT_ESTABLISHED = "not_established"

VARIANTS = ("EK-i", "EK-ii", "EK-ii'", "EK-iii'", "COR-i", "COR-ii", "PROBE")
AUTO = "auto"

MOVABLE = "movable_flag"
PROPER = "proper_intersection_level"


@dataclass(frozen=True, order=True)
class ConditionId:
    kind: str
    r: int
    q: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise MathError(f"unknown condition kind {self.kind!r}")
        if self.r < -1:
            raise MathError("r must be at least -1")
        if self.q < 0:
            raise MathError("q must be non-negative")

    @classmethod
    def parse(cls, text: str) -> "ConditionId":
        m = re.fullmatch(r"\s*(NA|NB|A|B)\s*\(\s*(-?\d+)\s*,\s*(\d+)\s*\)\s*", text)
        if not m:
            raise MathError(f"cannot parse condition {text!r}")
        return cls(m.group(1), int(m.group(2)), int(m.group(3)))

    def validate(self, k: int) -> None:
        if not -1 <= self.r <= k - 1:
            raise MathError(f"{self}: r out of range for dimension {k}")
        if not 0 <= self.q <= k - self.r - 1:
            raise MathError(f"{self}: q out of range for dimension {k}")

    def exponent(self, k: int) -> int:
        """The power ``n = k - r - 1 - q`` of the nef class."""
        return k - self.r - 1 - self.q

    def with_kind(self, kind: str) -> "ConditionId":
        return ConditionId(kind, self.r, self.q)

    @property
    def rational_type(self) -> bool:
        """A and NA only ask for proportionality to a rational class."""
        return self.kind in ("A", "NA")

    def __str__(self) -> str:
        return f"{self.kind}({self.r},{self.q})"


@dataclass(frozen=True)
class ConditionCertificate:
    condition: ConditionId
    verdict: str
    assumptions: tuple[str, ...] = ()
    derivation: tuple[str, ...] = ()
    level: int | None = None
    failing_step: int | None = None

    def __post_init__(self):
        if self.verdict not in (HOLDS, CONDITIONAL, NOT_ESTABLISHED):
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.verdict == HOLDS and self.assumptions:
            raise ValueError("a certificate that consumed assertions cannot be unconditional")
        if self.verdict == CONDITIONAL and not self.assumptions:
            raise ValueError("conditional certificate must list its assumptions")

    @property
    def established(self) -> bool:
        return self.verdict != NOT_ESTABLISHED

    def to_dict(self) -> dict:
        out = {
            "condition": str(self.condition),
            "verdict": self.verdict,
            "assumptions": list(self.assumptions),
            "derivation": list(self.derivation),
        }
        if self.level is not None:
            out["level"] = self.level
        if self.failing_step is not None:
            out["failing_step"] = self.failing_step
        return out


def _certificate(cond: ConditionId, ok: bool, assumptions: Iterable[str], derivation: Sequence[str],
                 level: int | None = None, failing_step: int | None = None) -> ConditionCertificate:
    assumptions = tuple(dict.fromkeys(assumptions))
    if not ok:
        return ConditionCertificate(cond, NOT_ESTABLISHED, (), tuple(derivation), level, failing_step)
    return ConditionCertificate(cond, CONDITIONAL if assumptions else HOLDS, assumptions,
                                tuple(derivation), level)


# --------------------------------------------------------------------------
# Base axioms
# --------------------------------------------------------------------------


def base_condition_axioms(base: BaseModel) -> list[ConditionCertificate]:
    """Conditions known to hold on the base manifold itself."""
    k = base.dim
    out: list[ConditionCertificate] = []

    def add(kind, r, q, why):
        out.append(ConditionCertificate(ConditionId(kind, r, q), HOLDS, (), (why,), level=0))

    if base.variant == algebra.PROJECTIVE_SPACE:
        why = "h11 = 1 and K = -(k+1)H: a nonzero nef class aH has a^n (-(k+1))^q H^(n+q) != 0"
        for r in range(0, k - 1):
            for q in range(0, k - r - 1):
                add("B", r, q, why)
    elif base.variant == algebra.PICARD_ONE:
        for r in range(0, k - 1):
            add("NB", r, 0, "Picard number one: a nonzero nef class aH has nonzero powers")
        if base.canonical and base.canonical[0] != 0:
            for r in range(0, k - 1):
                for q in range(1, k - r - 1):
                    add("NB", r, q, "Picard number one with nonzero canonical class")
    elif base.variant == algebra.HYPERKAHLER:
        l = k // 2
        add("B", l - 1, 0, "hyper-Kähler axiom: Beauville-Bogomolov form, Verbitsky's theorem")
    elif base.variant == algebra.MULTI_PROJECTIVE:
        dims = sorted(base.dims)
        for l in range(2, dims[0] + dims[1] + 1):
            if 2 * l <= k + 1:
                add("A", k - l - 1, 0,
                    f"multi-projective: (sum a_i H_i)^{l} = 0 with a_i >= 0 forces one nonzero a_i")
        if dims[0] >= 2:
            k1 = dims[0]
            add("B", k1 - 2, k - 2 * k1 + 1,
                f"multi-projective: zeta^{k1} != 0 for nonzero nef zeta, and -K is ample")
    return out


def _find_established(certs: Iterable[ConditionCertificate], cond: ConditionId) -> ConditionCertificate | None:
    best = None
    for c in certs:
        if (c.condition.r, c.condition.q) != (cond.r, cond.q) or not c.established:
            continue
        if cond.kind not in IMPLIES[c.condition.kind]:
            continue
        if best is None or (best.verdict == CONDITIONAL and c.verdict == HOLDS):
            best = c
    return best


def base_certificate(base: BaseModel, cond: ConditionId) -> ConditionCertificate:
    cond.validate(base.dim)
    found = _find_established(base_condition_axioms(base), cond)
    if found is None:
        return ConditionCertificate(cond, NOT_ESTABLISHED, (), (f"no base axiom yields {cond}",), level=0)
    why = found.derivation[0] if found.derivation else ""
    via = "" if found.condition == cond else f" (implied by {found.condition})"
    return ConditionCertificate(cond, HOLDS, (), (f"base axiom{via}: {why}",), level=0)


# --------------------------------------------------------------------------
# Probe polynomials
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ProbeDescriptor:
    e_power: int
    h_power: int
    stripped: int

    def __str__(self) -> str:
        return f"(w+bE)^n K^q E^{self.e_power} w^{self.h_power} / b^{self.stripped}"


@dataclass(frozen=True)
class ProbeSystem:
    polynomials: tuple[UniPoly, ...]
    provenance: tuple[ProbeDescriptor, ...]
    step: int
    r: int
    q: int
    n: int
    canonical_coeff: Fraction = Fraction(0)

    def to_dict(self) -> dict:
        return {
            "step": self.step,
            "r": self.r,
            "q": self.q,
            "n": self.n,
            "canonical_restricted": format_rational(self.canonical_coeff),
            "probes": [
                {"polynomial": [format_rational(c) for c in p.coeffs], "pretty": p.pretty("b"),
                 "e_power": d.e_power, "h_power": d.h_power, "stripped_b_power": d.stripped}
                for p, d in zip(self.polynomials, self.provenance)
            ],
        }


def raw_probe(center: CenterModel, n: int, q: int, e_power: int, h_power: int,
              kappa: Fraction = Fraction(0)) -> UniPoly:
    """``(-1)**(s-1) ∫ (w + bE)**n · K**q · E**e_power · w**h_power`` as a polynomial in ``b``.

    ``w`` is an ample class restricting to ``h`` on the center and
    ``K = π*K_Y + (s-1)E`` with ``K_Y|_V = kappa·h``.
    """
    s, t = center.codim_s, center.dim_v
    S = center.segre()
    coeffs = [Fraction(0)] * (n + 1)
    for a in range(n + 1):
        total = Fraction(0)
        for c in range(q + 1):
            m = a + c + e_power
            j = m - s
            deg_h = (n - a) + h_power + (q - c)
            if j < 0 or j > t or deg_h + j != t:
                continue
            signed = (-1) ** j * S[j]
            total += binomial(q, c) * kappa ** (q - c) * Fraction(s - 1) ** c * signed
        coeffs[a] = binomial(n, a) * total * center.top
    return UniPoly(coeffs)


def build_probe_system(tower: Tower, step, r: int, q: int) -> ProbeSystem:
    i = tower.step_index(step)
    k = tower.k
    ConditionId("NA", r, q).validate(k)
    n = k - r - 1 - q
    if n < 1:
        raise MathError("degenerate exponent: k - r - 1 - q must be at least 1", step=i)
    center = tower.steps[i].center
    kappa = algebra.restricted_canonical(tower, i) if q > 0 else Fraction(0)
    polys, prov = [], []
    for e in range(1, r + 2):
        p = raw_probe(center, n, q, e, r + 1 - e, kappa)
        v = p.valuation() if not p.is_zero() else 0
        polys.append(p.shift_down(v))
        prov.append(ProbeDescriptor(e, r + 1 - e, v))
    return ProbeSystem(tuple(polys), tuple(prov), i, r, q, n, kappa)


@dataclass(frozen=True)
class CommonRoots:
    gcd: UniPoly
    report: RootReport
    resultants: tuple[tuple[int, int, Fraction], ...] = field(default=())

    @property
    def nonzero_real(self) -> int:
        rational = sum(1 for x, _ in self.report.rational_roots if x != 0)
        return rational + self.report.irrational_real_root_count


def common_roots(polys: Sequence[UniPoly]) -> CommonRoots:
    nonzero = [p for p in polys if not p.is_zero()]
    if not nonzero:
        raise MathError("uninformative probe system: every probe vanishes identically")
    res = tuple((a, b, resultant(nonzero[a], nonzero[b])) for a, b in combinations(range(len(nonzero)), 2))
    if any(r != 0 for _, _, r in res):
        g = UniPoly([1])
    else:
        g = poly_gcd_many(nonzero)
    report = classify_real_roots(g) if g.degree >= 1 else RootReport((), 0)
    return CommonRoots(g, report, res)


def probe_verdict(system: ProbeSystem, condition: ConditionId) -> ConditionCertificate:
    """Decide a condition from the common real roots of the probes.

    Any nonzero common real root blocks B/NB; A/NA only needs the common
    roots to be rational.
    """
    roots = common_roots(system.polynomials)
    lines = [f"probe {d}: {p.pretty('b')}" for p, d in zip(system.polynomials, system.provenance)]
    for a, b, r in roots.resultants:
        lines.append(f"resultant(P{a + 1}, P{b + 1}) = {format_rational(r)}")
    lines.append(f"common factor: {roots.gcd.pretty('b')}")
    rational = [x for x, _ in roots.report.rational_roots if x != 0]
    irrational = roots.report.irrational_real_root_count
    if condition.rational_type:
        ok = irrational == 0
        lines.append(
            f"common real roots: rational {[format_rational(x) for x in rational]}, irrational {irrational}; "
            + ("all rational" if ok else "an irrational common root survives"))
    else:
        ok = roots.nonzero_real == 0
        lines.append("no nonzero common real root" if ok
                     else f"{roots.nonzero_real} nonzero common real root(s) survive")
    return _certificate(condition, ok, (), lines)


# --------------------------------------------------------------------------
# Four-dimensional projective space
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class P4Result:
    case: str
    b_values: tuple[Fraction, ...]
    quadratic: UniPoly | None = None
    discriminant: Fraction | None = None
    a_roots: tuple[Fraction, ...] = ()
    real_roots: bool = True

    def to_dict(self) -> dict:
        out = {"case": self.case, "b": [format_rational(b) for b in self.b_values], "real_roots": self.real_roots}
        if self.quadratic is not None:
            out["quadratic"] = [format_rational(c) for c in self.quadratic.coeffs]
            out["discriminant"] = format_rational(self.discriminant)
            out["a_roots"] = [format_rational(a) for a in self.a_roots]
        return out


def lemma_p4_verdict(center: CenterModel) -> P4Result:
    """Constraint on ``b`` for a nef class ``H + bE`` with ``(H + bE)**3 = 0`` on a blown-up ℙ⁴."""
    if center.dim_v + center.codim_s != 4:
        raise MathError("center does not live in a four-dimensional manifold")
    if center.dim_v == 0:
        return P4Result("point", (Fraction(0),))
    if center.dim_v == 1:
        c1 = center.chern[1] * center.top
        if c1 == 0:
            raise MathError("curve with c_1(N) = 0: the positivity argument fails (flagged)")
        return P4Result("curve", (-3 * center.top / c1,))
    if center.dim_v == 2:
        g1, g2 = center.chern[1], center.chern[2]
        quad = UniPoly([g1 * g1 - g2, 3 * g1, 3])
        disc = (3 * g1) ** 2 - 12 * (g1 * g1 - g2)
        report = classify_real_roots(quad)
        a_roots = tuple(x for x, _ in report.rational_roots)
        b_values = tuple(1 / a for a in a_roots if a != 0)
        return P4Result("surface", b_values, quad, disc, a_roots, report.has_real_roots)
    raise MathError(f"center of dimension {center.dim_v} in P^4 is outside the lemma")


# --------------------------------------------------------------------------
# Inheritance under a single blowup
# --------------------------------------------------------------------------


def _normalize_variant(variant: str) -> str:
    v = variant.strip().replace("′", "'").replace("’", "'")
    if v.lower() == AUTO:
        return AUTO
    for known in VARIANTS:
        if known.upper() == v.upper():
            return known
    raise MathError(f"unknown inheritance variant {variant!r}")


def _segre_checks(center: CenterModel, k: int, r: int, lines: list[str]) -> bool:
    """Effectivity of ``(-1)**(j-1) π_*(E**j)`` for ``s <= j <= k-r-1`` and strictness at ``k-r``."""
    s, t = center.codim_s, center.dim_v
    seg = center.segre()
    ok = True
    for j in range(s, k - r):
        coeff = seg[j - s] * center.top
        if coeff < 0:
            lines.append(f"(-1)^{j - 1} pi_*(E^{j}) = {format_rational(coeff)} h^{j - s}: not effective")
            ok = False
    j = k - r
    coeff = seg[j - s] * center.top if 0 <= j - s <= t else Fraction(0)
    if coeff <= 0:
        lines.append(f"(-1)^{j - 1} pi_*(E^{j}) = {format_rational(coeff)} h^{j - s}: not strictly effective")
        ok = False
    if ok:
        lines.append(f"Segre pushforwards effective for j = {s}..{k - r - 1} and strictly effective at j = {k - r}")
    return ok


def _probe_applicable(tower: Tower, i: int, cond: ConditionId, lines: list[str]) -> bool:
    center = tower.steps[i].center
    nb = len(tower.base.generators)
    if not cond.rational_type:
        return True
    if not tower.base.is_picard_one:
        lines.append("rational-type probe needs a Picard-one base")
        return False
    for g in tower.generators_at(tower.steps[i].host_level)[nb:]:
        if center.restrict(g) != 0:
            lines.append(f"center meets {g}; the nef candidate is not determined by one unknown")
            return False
    return True


def check_inheritance(tower: Tower, step, condition: ConditionId, variant: str,
                      host: Sequence[ConditionCertificate] | None = None) -> ConditionCertificate:
    """Does the blowup at ``step`` preserve ``condition``, by the given rule?

    ``host`` holds the certificates of the level below the step; for the
    first step the base axioms are used when it is omitted.
    """
    i = tower.step_index(step)
    k = tower.k
    condition.validate(k)
    variant = _normalize_variant(variant)
    if variant == AUTO:
        return _check_auto(tower, i, condition, host)
    if host is None:
        if i != 0:
            raise MathError("host certificates are required above the first step", step=i)
        host = [base_certificate(tower.base, condition)]
    host_cert = _find_established(host, condition)
    level = i + 1
    if host_cert is None:
        return _certificate(condition, False, (), [f"level {i} does not carry {condition}"], level, i)
    st = tower.steps[i]
    center = st.center
    t, s = center.dim_v, center.codim_s
    r, q = condition.r, condition.q
    lines = [f"step {i} ({st.name}): center dim {t}, codim {s}; rule {variant}"]
    used: list[str] = list(host_cert.assumptions)
    ok = True

    if variant == "EK-i":
        ok = t <= r
        lines.append(f"dim V = {t} {'<=' if ok else '>'} r = {r}")
    elif variant in ("EK-ii", "EK-ii'", "EK-iii'"):
        if variant == "EK-iii'" and q == 0:
            raise MathError(f"{variant} needs q > 0", step=i)
        if variant != "EK-iii'" and q != 0:
            raise MathError(f"{variant} needs q = 0", step=i)
        if t <= r:
            lines.append(f"dim V = {t} <= r = {r}: use EK-i")
            ok = False
        else:
            ok = _segre_checks(center, k, r, lines)
            if variant == "EK-iii'":
                c1 = center.first_chern_restricted()
                if c1.coeff <= 0:
                    lines.append(f"c_1(Y)|_V = {c1} is not ample")
                    ok = False
                else:
                    lines.append(f"c_1(Y)|_V = {c1} is ample")
            if variant == "EK-ii":
                if center.proper_intersection_level is None:
                    lines.append("proper-intersection assertion absent")
                    ok = False
                else:
                    used.append(f"{PROPER}={center.proper_intersection_level} ({st.name})")
            else:
                if not center.movable:
                    lines.append("movability assertion absent")
                    ok = False
                else:
                    used.append(f"{MOVABLE} ({st.name})")
    elif variant in ("COR-i", "COR-ii"):
        if q != 0:
            raise MathError(f"{variant} needs q = 0", step=i)
        if t != r + 1:
            lines.append(f"dim V = {t} != r + 1 = {r + 1}")
            ok = False
        elif variant == "COR-i":
            g1 = center.chern[1] if len(center.chern) > 1 else Fraction(0)
            if g1 >= 0:
                lines.append(f"c_1(N) = {format_rational(g1)} h is psef")
                ok = False
            else:
                lines.append(f"c_1(N) = {format_rational(g1)} h is not psef")
            if not center.movable:
                lines.append("movability assertion absent")
                ok = False
            else:
                used.append(f"{MOVABLE} ({st.name})")
        else:
            j = center.proper_intersection_level
            if j is None or j < 1:
                lines.append("proper-intersection assertion absent")
                ok = False
            else:
                cj = center.chern[j] if j < len(center.chern) else Fraction(0)
                if j > t or cj >= 0:
                    lines.append(f"c_{j}(N) = {format_rational(cj if j <= t else 0)} h^{j} is psef")
                    ok = False
                else:
                    lines.append(f"c_{j}(N) = {format_rational(cj)} h^{j} is not psef")
                used.append(f"{PROPER}={j} ({st.name})")
    else:  # PROBE
        if not _probe_applicable(tower, i, condition, lines):
            ok = False
        else:
            system = build_probe_system(tower, i, r, q)
            cert = probe_verdict(system, condition)
            lines.extend(cert.derivation)
            ok = cert.established

    if ok:
        lines.append(f"{condition} inherited from level {i} ({host_cert.condition}, {host_cert.verdict})")
    return _certificate(condition, ok, used, lines, level, None if ok else i)


def _check_auto(tower, i, condition, host):
    """Try every rule; prefer an unconditional verdict, then a conditional one."""
    tried: list[str] = []
    conditional = None
    for v in VARIANTS:
        try:
            cert = check_inheritance(tower, i, condition, v, host)
        except MathError as exc:
            tried.append(f"{v}: not applicable ({exc.args[0]})")
            continue
        if cert.verdict == HOLDS:
            return cert
        if cert.verdict == CONDITIONAL and conditional is None:
            conditional = cert
        if not cert.established:
            tried.append(f"{v}: " + "; ".join(cert.derivation[1:]))
    if conditional is not None:
        return conditional
    return _certificate(condition, False, (), [f"step {i}: no rule establishes {condition}"] + tried,
                        i + 1, i)


def propagate_conditions(tower: Tower, condition: ConditionId,
                         variants: Sequence[str] | None = None) -> list[ConditionCertificate]:
    """Certificates for ``condition`` on every level, from the base to the top.

    ``variants[i]`` names the rule used at step ``i`` (``"auto"`` tries them
    all).  Once a level is not established every level above it is reported
    not established with the same failing step.
    """
    k = tower.k
    condition.validate(k)
    if variants is None:
        variants = [AUTO] * tower.level
    if len(variants) != tower.level:
        raise MathError(f"expected {tower.level} variant choices, got {len(variants)}")
    certs = [base_certificate(tower.base, condition)]
    for i, v in enumerate(variants):
        prev = certs[-1]
        if not prev.established:
            fail = prev.failing_step
            certs.append(ConditionCertificate(
                condition, NOT_ESTABLISHED, (),
                (f"not established below (failing at {'the base' if fail is None else f'step {fail}'})",),
                level=i + 1, failing_step=fail))
            continue
        certs.append(check_inheritance(tower, i, condition, v, [prev]))
    return certs


# --------------------------------------------------------------------------
# Multi-projective nef powers
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class NefPower:
    vanishes: bool
    support: tuple[int, ...]
    expansion: dict

    def to_dict(self) -> dict:
        return {
            "vanishes": self.vanishes,
            "support": list(self.support),
            "expansion": [{"exponents": list(e), "coeff": format_rational(c)}
                          for e, c in sorted(self.expansion.items())],
        }


def multiproj_nef_power(dims: Sequence[int], coeffs: Sequence, exponent: int) -> NefPower:
    """Expand ``(sum a_i H_i)**exponent`` on ``P^k1 x ... x P^km``; support is 1-based."""
    a = [as_rational(c) for c in coeffs]
    if any(x < 0 for x in a):
        raise MathError("not a nef candidate in this model: negative coefficient")
    if exponent < 0 or exponent > sum(dims):
        raise MathError("exponent out of range")
    expansion = algebra.multinomial_power(dims, a, exponent)
    support = tuple(i + 1 for i, x in enumerate(a) if x != 0)
    return NefPower(not expansion, support, expansion)
