"""Intersection rings of iterated blowups along structured centers.

A :class:`Tower` is a base manifold ``X_0`` together with a sequence of
blowups ``X_n -> ... -> X_1 -> X_0``.  Cohomology classes are polynomials in
the hyperplane classes of the base and the exceptional classes ``E_j``; each
``E_j`` stands for the total transform on the top level of the exceptional
divisor created at step ``j``.

Every center carries a Picard-number-one model of its cohomology: a single
class ``h`` with ``h**(dim V + 1) = 0`` and ``∫_V h**dim V = top``.  Chern
classes of the normal bundle are rational multiples ``c_j = γ_j h**j`` and
each ambient generator restricts to a multiple of ``h``.  That is enough to
evaluate every top-degree monomial through the blowup formula

    ∫ π*(y) E**m = (-1)**(s-1) ∫_V y|_V · S_{m-s}

where ``S_j = (-1)**j s_j`` is the signed Segre class, so ``S_1 = c_1`` and
``S_2 = c_1**2 - c_2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

from .errors import MathError, UnsupportedProduct
from .exact import as_rational, binomial, format_rational, symmetric_function

PROJECTIVE_SPACE = "projective_space"
MULTI_PROJECTIVE = "multi_projective"
PICARD_ONE = "picard_one"
HYPERKAHLER = "hyperkahler"

POINT = "point"
PROJECTIVE_FIBER = "projective_fiber"
CURVE = "curve"
COMPLETE_INTERSECTION = "complete_intersection"


# --------------------------------------------------------------------------
# Cohomology classes
# --------------------------------------------------------------------------


def _trim(exps: Sequence[int]) -> tuple[int, ...]:
    exps = list(exps)
    while exps and exps[-1] == 0:
        exps.pop()
    return tuple(exps)


def _add_exps(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    if len(a) < len(b):
        a, b = b, a
    return tuple(x + (b[i] if i < len(b) else 0) for i, x in enumerate(a))


class CohClass:
    """A rational linear combination of monomials in the tower generators.

    Monomials are exponent tuples aligned with ``Tower.generators``; trailing
    zeros are dropped, so a class built on a lower level of a tower is also a
    class (its pullback) on every higher level.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Sequence[int], object] | None = None):
        clean: dict[tuple[int, ...], Fraction] = {}
        for exps, c in (terms or {}).items():
            c = as_rational(c)
            if c == 0:
                continue
            key = _trim(exps)
            if any(e < 0 for e in key):
                raise MathError("negative exponent in monomial")
            clean[key] = clean.get(key, Fraction(0)) + c
            if clean[key] == 0:
                del clean[key]
        object.__setattr__(self, "_terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("CohClass is immutable")

    @classmethod
    def monomial(cls, exps: Sequence[int], coeff=1) -> "CohClass":
        return cls({tuple(exps): coeff})

    @classmethod
    def one(cls) -> "CohClass":
        return cls({(): 1})

    def terms(self) -> dict[tuple[int, ...], Fraction]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def degrees(self) -> set[int]:
        return {sum(e) for e in self._terms}

    def _coerce(self, other) -> "CohClass":
        if isinstance(other, CohClass):
            return other
        return CohClass({(): other})

    def __add__(self, other) -> "CohClass":
        other = self._coerce(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return CohClass(out)

    __radd__ = __add__

    def __neg__(self) -> "CohClass":
        return CohClass({e: -c for e, c in self._terms.items()})

    def __sub__(self, other) -> "CohClass":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "CohClass":
        return self._coerce(other) - self

    def __mul__(self, other) -> "CohClass":
        if not isinstance(other, CohClass):
            c = as_rational(other)
            return CohClass({e: c * v for e, v in self._terms.items()})
        out: dict[tuple[int, ...], Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = _add_exps(e1, e2)
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return CohClass(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "CohClass":
        if n < 0:
            raise MathError("negative power of a cohomology class")
        result = CohClass.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = CohClass({(): other})
        if not isinstance(other, CohClass):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __repr__(self) -> str:
        return f"CohClass({ {k: format_rational(v) for k, v in sorted(self._terms.items())} })"

    def pretty(self, generators: Sequence[str]) -> str:
        if not self._terms:
            return "0"
        pieces = []
        for exps, c in sorted(self._terms.items(), reverse=True):
            mono = "*".join(
                generators[i] if e == 1 else f"{generators[i]}^{e}"
                for i, e in enumerate(exps)
                if e
            )
            if not mono:
                pieces.append(format_rational(c))
            elif c == 1:
                pieces.append(mono)
            elif c == -1:
                pieces.append(f"-{mono}")
            else:
                pieces.append(f"{format_rational(c)}*{mono}")
        return " + ".join(pieces).replace("+ -", "- ")


# --------------------------------------------------------------------------
# Base manifolds
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class BaseModel:
    """The manifold at the bottom of a tower.

    ``dims`` is ``(k,)`` for single-generator bases and ``(k_1, ..., k_m)``
    for multi-projective space.  ``canonical`` gives ``K`` as a multiple of
    each generator, or ``None`` when the canonical class is not declared.
    """

    variant: str
    dims: tuple[int, ...]
    top_degree: Fraction = Fraction(1)
    canonical: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        if self.variant not in (PROJECTIVE_SPACE, MULTI_PROJECTIVE, PICARD_ONE, HYPERKAHLER):
            raise MathError(f"unknown base variant {self.variant!r}")
        if not self.dims or any(d < 1 for d in self.dims):
            raise MathError("base dimensions must be positive")
        if as_rational(self.top_degree) <= 0:
            raise MathError("top degree must be positive")
        object.__setattr__(self, "top_degree", as_rational(self.top_degree))
        if self.canonical is not None:
            object.__setattr__(self, "canonical", tuple(as_rational(c) for c in self.canonical))

    @classmethod
    def projective_space(cls, k: int) -> "BaseModel":
        return cls(PROJECTIVE_SPACE, (k,), Fraction(1), (Fraction(-(k + 1)),))

    @classmethod
    def multi_projective(cls, *dims: int) -> "BaseModel":
        if len(dims) < 2:
            raise MathError("multi-projective space needs at least two factors")
        return cls(MULTI_PROJECTIVE, tuple(dims), Fraction(1), tuple(Fraction(-(d + 1)) for d in dims))

    @classmethod
    def picard_one(cls, k: int, top_degree=1, canonical=None) -> "BaseModel":
        can = None if canonical is None else (as_rational(canonical),)
        return cls(PICARD_ONE, (k,), as_rational(top_degree), can)

    @classmethod
    def hyperkahler(cls, l: int) -> "BaseModel":
        if l < 1:
            raise MathError("hyper-Kähler half-dimension must be positive")
        # trivial canonical bundle; the ring itself is not modeled
        return cls(HYPERKAHLER, (2 * l,), Fraction(1), ())

    @property
    def dim(self) -> int:
        return sum(self.dims)

    @property
    def generators(self) -> tuple[str, ...]:
        if self.variant == HYPERKAHLER:
            return ()
        if self.variant == MULTI_PROJECTIVE:
            return tuple(f"H{i + 1}" for i in range(len(self.dims)))
        return ("H",)

    @property
    def has_ring(self) -> bool:
        return self.variant != HYPERKAHLER

    @property
    def is_picard_one(self) -> bool:
        return self.variant in (PROJECTIVE_SPACE, PICARD_ONE)

    def integrate_monomial(self, exps: Sequence[int]) -> Fraction:
        if not self.has_ring:
            raise MathError("hyper-Kähler base carries no computable intersection ring")
        exps = tuple(exps) + (0,) * (len(self.generators) - len(exps))
        if self.variant == MULTI_PROJECTIVE:
            return Fraction(1) if exps == self.dims else Fraction(0)
        return self.top_degree if exps[0] == self.dims[0] else Fraction(0)

    def to_dict(self) -> dict:
        if self.variant == PROJECTIVE_SPACE:
            return {"kind": PROJECTIVE_SPACE, "dim": self.dims[0]}
        if self.variant == MULTI_PROJECTIVE:
            return {"kind": MULTI_PROJECTIVE, "dims": list(self.dims)}
        if self.variant == HYPERKAHLER:
            return {"kind": HYPERKAHLER, "l": self.dims[0] // 2}
        out = {"kind": PICARD_ONE, "dim": self.dims[0], "top_degree": format_rational(self.top_degree)}
        if self.canonical is not None:
            out["canonical"] = format_rational(self.canonical[0])
        return out


# --------------------------------------------------------------------------
# Centers
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CenterClass:
    """The class ``coeff * h**degree`` in a center's ring."""

    degree: int
    coeff: Fraction

    def __str__(self) -> str:
        if self.coeff == 0:
            return "0"
        if self.degree == 0:
            return format_rational(self.coeff)
        mono = "h" if self.degree == 1 else f"h^{self.degree}"
        return mono if self.coeff == 1 else f"{format_rational(self.coeff)}*{mono}"


@dataclass(frozen=True)
class CenterModel:
    ring_model: str
    dim_v: int
    codim_s: int
    top: Fraction
    chern: tuple[Fraction, ...]
    restriction: tuple[tuple[str, Fraction | None], ...] = ()
    others_vanish: bool = False
    c1_tangent: Fraction | None = None
    degrees: tuple[Fraction, ...] = ()
    movable: bool = False
    proper_intersection_level: int | None = None
    label: str = ""

    def __post_init__(self):
        if self.ring_model not in (POINT, PROJECTIVE_FIBER, CURVE, COMPLETE_INTERSECTION):
            raise MathError(f"unknown center ring model {self.ring_model!r}")
        if self.dim_v < 0:
            raise MathError("center dimension must be non-negative")
        if self.codim_s < 1:
            raise MathError("center codimension must be positive")
        top = as_rational(self.top)
        if top <= 0:
            raise MathError("degree functional of the center must be positive")
        chern = [as_rational(c) for c in self.chern] or [Fraction(1)]
        if chern[0] != 1:
            raise MathError("chern_normal[0] must be 1")
        if len(chern) > self.codim_s + 1 and any(c != 0 for c in chern[self.codim_s + 1:]):
            raise MathError("normal bundle has Chern classes above its rank")
        chern = (chern + [Fraction(0)] * (self.codim_s + 1))[: self.codim_s + 1]
        # classes above the center's dimension vanish in its ring
        chern = [c if j <= self.dim_v else Fraction(0) for j, c in enumerate(chern)]
        rest = tuple(
            (str(g), None if v is None else as_rational(v)) for g, v in self.restriction
        )
        if len({g for g, _ in rest}) != len(rest):
            raise MathError("duplicate generator in restriction map")
        if self.proper_intersection_level is not None and self.proper_intersection_level < 0:
            raise MathError("proper_intersection_level must be non-negative")
        object.__setattr__(self, "top", top)
        object.__setattr__(self, "chern", tuple(chern))
        object.__setattr__(self, "restriction", rest)
        object.__setattr__(self, "degrees", tuple(as_rational(d) for d in self.degrees))
        if self.c1_tangent is not None:
            object.__setattr__(self, "c1_tangent", as_rational(self.c1_tangent))

    @property
    def restriction_map(self) -> dict[str, Fraction | None]:
        return dict(self.restriction)

    def restrict(self, generator: str) -> Fraction:
        """Coefficient of ``h`` in the restriction of a degree-one generator."""
        if self.dim_v == 0:
            return Fraction(0)
        table = self.restriction_map
        if generator in table:
            value = table[generator]
            if value is None:
                raise UnsupportedProduct(
                    f"restriction of {generator} to center {self.label or self.ring_model} is unknown"
                )
            return value
        if self.others_vanish:
            return Fraction(0)
        raise UnsupportedProduct(f"no restriction data for {generator}")

    def chern_class(self, j: int) -> CenterClass:
        c = self.chern[j] if 0 <= j < len(self.chern) else Fraction(0)
        return CenterClass(j, c if j <= self.dim_v else Fraction(0))

    def segre(self) -> tuple[Fraction, ...]:
        return segre_from_chern(self.chern, self.dim_v)

    def pushforward_exc_power(self, m: int) -> CenterClass:
        """Signed Segre term ``S_(m-s)``, so that ``π_*(E**m) = (-1)**(s-1) S_(m-s)`` on the center."""
        if m <= 0:
            raise MathError("exceptional power must be positive")
        j = m - self.codim_s
        if j < 0 or j > self.dim_v:
            return CenterClass(max(j, 0), Fraction(0))
        s = self.segre()
        return CenterClass(j, (-1) ** j * s[j])

    def first_chern_restricted(self) -> CenterClass:
        """``c_1(Y)|_V = c_1(V) + c_1(N)``."""
        if self.dim_v == 0:
            return CenterClass(1, Fraction(0))
        if self.c1_tangent is None:
            raise MathError(f"center {self.label or self.ring_model} carries no c_1(V) data")
        return CenterClass(1, self.c1_tangent + self.chern[1])

    def to_dict(self) -> dict:
        out = {
            "kind": "custom",
            "ring_model": self.ring_model,
            "dim": self.dim_v,
            "codim": self.codim_s,
            "top": format_rational(self.top),
            "chern": [format_rational(c) for c in self.chern],
            "restriction": {g: None if v is None else format_rational(v) for g, v in self.restriction},
            "others_vanish": self.others_vanish,
        }
        if self.c1_tangent is not None:
            out["c1_tangent"] = format_rational(self.c1_tangent)
        if self.degrees:
            out["degrees"] = [format_rational(d) for d in self.degrees]
        flags = {"movable": self.movable}
        if self.proper_intersection_level is not None:
            flags["proper_intersection_level"] = self.proper_intersection_level
        out["flags"] = flags
        if self.label:
            out["label"] = self.label
        return out


def segre_from_chern(chern: Sequence, dim_v: int) -> tuple[Fraction, ...]:
    """Inverse of the total Chern class, truncated above ``dim_v``.

    The output ``s`` satisfies ``sum_i s_i c_(m-i) = 0`` for ``1 <= m <= dim_v``.
    """
    c = [as_rational(x) for x in chern]
    if not c or c[0] != 1:
        raise MathError("chern[0] must be 1")
    if dim_v < 0:
        raise MathError("dimension must be non-negative")
    s = [Fraction(1)]
    for m in range(1, dim_v + 1):
        s.append(-sum((c[i] if i < len(c) else 0) * s[m - i] for i in range(1, m + 1)))
    return tuple(s)


def chern_normal_ci(degrees: Sequence) -> tuple[Fraction, ...]:
    """Chern coefficients of the normal bundle of a complete intersection."""
    ds = [as_rational(d) for d in degrees]
    if not ds:
        raise MathError("complete intersection needs at least one degree")
    return tuple(symmetric_function(j, ds) for j in range(len(ds) + 1))


def _flags(movable: bool, proper_intersection_level: int | None, label: str) -> dict:
    return {"movable": movable, "proper_intersection_level": proper_intersection_level, "label": label}


def point_center(k: int, *, movable: bool = False, proper_intersection_level=None, label="") -> CenterModel:
    return CenterModel(POINT, 0, k, Fraction(1), (Fraction(1),), others_vanish=True,
                       c1_tangent=Fraction(0), **_flags(movable, proper_intersection_level, label))


def curve_center(k: int, degree, c1_normal, *, restriction: Mapping | None = None,
                 c1_tangent=None, movable: bool = False, proper_intersection_level=None,
                 label="") -> CenterModel:
    """A curve with ``∫ h = degree`` and ``∫ c_1(N) = c1_normal``.

    ``c1_tangent`` is ``∫ c_1(T_C) = 2 - 2g`` when known.  The default
    restriction sends the single base generator ``H`` to ``h``.
    """
    deg = as_rational(degree)
    if deg <= 0:
        raise MathError("curve degree must be positive")
    c1 = as_rational(c1_normal) / deg
    rest = {"H": Fraction(1)} if restriction is None else dict(restriction)
    tangent = None if c1_tangent is None else as_rational(c1_tangent) / deg
    return CenterModel(CURVE, 1, k - 1, deg, (Fraction(1), c1), tuple(rest.items()),
                       c1_tangent=tangent, **_flags(movable, proper_intersection_level, label))


def complete_intersection_center(base: BaseModel, degrees: Sequence, *, top=None,
                                 movable: bool = False, proper_intersection_level=None,
                                 label="") -> CenterModel:
    """A complete intersection of hypersurfaces of the given degrees in a Picard-one base.

    The degree functional is ``d_1 ... d_s * top_degree``; pass ``top`` to
    override it for formal (virtual) degree choices.
    """
    if not base.is_picard_one:
        raise MathError("complete-intersection centers need a Picard-one base")
    ds = tuple(as_rational(d) for d in degrees)
    k = base.dim
    s = len(ds)
    if s > k:
        raise MathError("more hypersurfaces than the base dimension")
    t = k - s
    if top is None:
        top = math.prod(ds, start=Fraction(1)) * base.top_degree
        if top <= 0:
            raise MathError("degenerate degree functional; pass an explicit top for virtual centers")
    chern = chern_normal_ci(ds)
    tangent = None
    if base.canonical is not None:
        # adjunction: c_1(V) = c_1(Y)|_V - c_1(N)
        tangent = -base.canonical[0] - chern[1]
    return CenterModel(COMPLETE_INTERSECTION, t, s, as_rational(top), chern, (("H", Fraction(1)),),
                       c1_tangent=tangent, degrees=ds, **_flags(movable, proper_intersection_level, label))


def fiber_chern(t_codim: int) -> tuple[Fraction, ...]:
    """Coefficients of ``(1 - h)(1 + h)**t_codim``."""
    return tuple(
        Fraction((binomial(t_codim, j) if j <= t_codim else 0) - (binomial(t_codim, j - 1) if 1 <= j <= t_codim + 1 else 0))
        for j in range(t_codim + 2)
    )


def center_in_fiber(k: int, t_codim: int, fiber_dim: int, host_exceptional: str, *,
                    movable: bool = False, proper_intersection_level=None, label="") -> CenterModel:
    """A linear subspace of codimension ``t_codim`` in a fiber of ``host_exceptional``.

    The fiber is a projective space of dimension ``fiber_dim`` over a point of
    the earlier center; the host exceptional class restricts to ``-h`` and
    every class pulled back through that point restricts to zero.
    """
    if not 0 <= t_codim <= fiber_dim:
        raise MathError(f"t_codim={t_codim} out of range for a fiber of dimension {fiber_dim}")
    if fiber_dim >= k:
        raise MathError("fiber dimension must be below the ambient dimension")
    dim_w = fiber_dim - t_codim
    return CenterModel(PROJECTIVE_FIBER, dim_w, k - dim_w, Fraction(1), fiber_chern(t_codim),
                       ((host_exceptional, Fraction(-1)),), others_vanish=True,
                       c1_tangent=Fraction(dim_w + 1), **_flags(movable, proper_intersection_level, label))


def slice_center(base: BaseModel, factor: int, *, movable: bool = False,
                 proper_intersection_level=None, label="") -> CenterModel:
    """``pt x ... x P^(k_i) x ... x pt`` in multi-projective space (trivial normal bundle)."""
    if base.variant != MULTI_PROJECTIVE:
        raise MathError("slice centers live in multi-projective space")
    if not 0 <= factor < len(base.dims):
        raise MathError("factor index out of range")
    d = base.dims[factor]
    rest = tuple((g, Fraction(1) if i == factor else Fraction(0)) for i, g in enumerate(base.generators))
    return CenterModel(PROJECTIVE_FIBER, d, base.dim - d, Fraction(1), (Fraction(1),), rest,
                       c1_tangent=Fraction(d + 1), **_flags(movable, proper_intersection_level, label))


# --------------------------------------------------------------------------
# Towers
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Step:
    center: CenterModel
    name: str
    host_level: int


@dataclass(frozen=True)
class Tower:
    base: BaseModel
    steps: tuple[Step, ...] = ()
    disjoint: frozenset = frozenset()
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    @property
    def k(self) -> int:
        return self.base.dim

    @property
    def level(self) -> int:
        return len(self.steps)

    @property
    def generators(self) -> tuple[str, ...]:
        return self.base.generators + tuple(st.name for st in self.steps)

    def generators_at(self, level: int) -> tuple[str, ...]:
        return self.base.generators + tuple(st.name for st in self.steps[:level])

    def step_index(self, name_or_index) -> int:
        if isinstance(name_or_index, int):
            if not 0 <= name_or_index < len(self.steps):
                raise MathError(f"no step {name_or_index}")
            return name_or_index
        for i, st in enumerate(self.steps):
            if st.name == name_or_index:
                return i
        raise MathError(f"no exceptional class named {name_or_index!r}")

    def gen(self, name: str) -> CohClass:
        gens = self.generators
        if name not in gens:
            raise MathError(f"unknown generator {name!r}")
        exps = [0] * len(gens)
        exps[gens.index(name)] = 1
        return CohClass.monomial(exps)

    def monomial(self, exps: Mapping[str, int], coeff=1) -> CohClass:
        gens = self.generators
        vec = [0] * len(gens)
        for name, e in exps.items():
            if name not in gens:
                raise MathError(f"unknown generator {name!r}")
            vec[gens.index(name)] = int(e)
        return CohClass.monomial(vec, coeff)

    def are_disjoint(self, a: str, b: str) -> bool:
        return frozenset((a, b)) in self.disjoint

    def pretty(self, cls: CohClass) -> str:
        return cls.pretty(self.generators)


def make_base(base: BaseModel) -> Tower:
    return Tower(base)


def blow_up(tower: Tower, center: CenterModel, host_level: int | None = None,
            name: str | None = None, disjoint_from: Iterable[str] = ()) -> Tower:
    """Blow up ``center`` (a submanifold of level ``host_level``) on top of ``tower``.

    A center hosted below the current top level is disjoint from every center
    blown up after its host level; those exceptional classes restrict to zero
    on it.  ``disjoint_from`` declares further disjointness from earlier
    exceptional divisors.
    """
    index = tower.level
    host = index if host_level is None else host_level
    if not 0 <= host <= index:
        raise MathError(f"host level {host} out of range 0..{index}", step=index)
    if center.codim_s < 2:
        raise MathError("divisorial center: codimension must be at least 2", step=index)
    if center.dim_v + center.codim_s != tower.k:
        raise MathError(
            f"center of dimension {center.dim_v} and codimension {center.codim_s} "
            f"does not fit in dimension {tower.k}", step=index)
    name = name or f"E{index + 1}"
    if name in tower.generators:
        raise MathError(f"generator name {name!r} already used", step=index)
    host_gens = tower.generators_at(host)
    table = center.restriction_map
    unknown = [g for g in table if g not in host_gens]
    if unknown:
        raise MathError(f"restriction map mentions generators not present at host level: {unknown}", step=index)
    disjoint_from = tuple(disjoint_from)
    for g in disjoint_from:
        if g not in tower.generators[len(tower.base.generators):]:
            raise MathError(f"cannot declare disjointness from unknown exceptional class {g!r}", step=index)
        if g in host_gens and table.get(g, Fraction(0)) not in (Fraction(0),):
            raise MathError(f"center restricts {g} nontrivially but is declared disjoint from it", step=index)
    if disjoint_from:
        extra = [(g, Fraction(0)) for g in disjoint_from if g in host_gens and g not in table]
        center = replace(center, restriction=center.restriction + tuple(extra))
        table = center.restriction_map
    if center.dim_v > 0 and not center.others_vanish:
        missing = [g for g in host_gens if g not in table]
        if missing:
            raise MathError(f"restriction map missing generator(s) {missing}", step=index)
    pairs = set(tower.disjoint)
    for st in tower.steps[host:]:
        pairs.add(frozenset((st.name, name)))
    for g in disjoint_from:
        pairs.add(frozenset((g, name)))
    return Tower(tower.base, tower.steps + (Step(center, name, host),), frozenset(pairs))


def _integrate_monomial(tower: Tower, exps: tuple[int, ...]) -> Fraction:
    nb = len(tower.base.generators)
    gens = tower.generators
    exps = exps + (0,) * (len(gens) - len(exps))
    for level in range(tower.level, 0, -1):
        idx = nb + level - 1
        m = exps[idx]
        if m == 0:
            continue
        step = tower.steps[level - 1]
        center = step.center
        coeff = Fraction(1)
        for g in range(idx):
            a = exps[g]
            if a == 0:
                continue
            if g >= nb and g - nb >= step.host_level:
                return Fraction(0)
            coeff *= center.restrict(gens[g]) ** a
            if coeff == 0:
                return Fraction(0)
        push = center.pushforward_exc_power(m)
        if push.coeff == 0 or sum(exps[:idx]) + push.degree != center.dim_v:
            return Fraction(0)
        return (-1) ** (center.codim_s - 1) * coeff * push.coeff * center.top
    return tower.base.integrate_monomial(exps[:nb])


def integrate(tower: Tower, cls: CohClass) -> Fraction:
    """Exact degree of a top-degree class on the top level of ``tower``."""
    total = Fraction(0)
    k = tower.k
    ngens = len(tower.generators)
    for exps, c in cls.terms().items():
        if len(exps) > ngens:
            raise MathError("class mentions generators beyond this tower")
        if sum(exps) != k:
            raise MathError(f"integration needs a class of top degree {k}, got degree {sum(exps)}")
        key = exps + (0,) * (ngens - len(exps))
        cache = tower._cache
        if key not in cache:
            cache[key] = _integrate_monomial(tower, key)
        total += c * cache[key]
    return total


def pushforward_exc_power(tower: Tower, step, m: int) -> CenterClass:
    return tower.steps[tower.step_index(step)].center.pushforward_exc_power(m)


def first_chern_restricted(tower: Tower, step) -> CenterClass:
    i = tower.step_index(step)
    try:
        return tower.steps[i].center.first_chern_restricted()
    except MathError as exc:
        raise MathError(str(exc), step=i) from None


def canonical_class(tower: Tower, level: int | None = None) -> CohClass:
    """``K`` on the given level (default: top), via ``K_X = π*K_Y + (s - 1) E``."""
    level = tower.level if level is None else level
    base = tower.base
    if base.canonical is None:
        raise MathError("base carries no declared canonical class")
    k_cls = CohClass()
    for i, c in enumerate(base.canonical):
        exps = [0] * len(base.generators)
        exps[i] = 1
        k_cls = k_cls + CohClass.monomial(exps, c)
    nb = len(base.generators)
    for j, st in enumerate(tower.steps[:level]):
        exps = [0] * (nb + j + 1)
        exps[-1] = 1
        k_cls = k_cls + CohClass.monomial(exps, st.center.codim_s - 1)
    return k_cls


def restricted_canonical(tower: Tower, step) -> Fraction:
    """Coefficient of ``h`` in ``K_Y|_V`` for the ambient ``Y`` of a step."""
    i = tower.step_index(step)
    st = tower.steps[i]
    if st.center.dim_v == 0:
        return Fraction(0)
    try:
        k_cls = canonical_class(tower, st.host_level)
    except MathError:
        return -st.center.first_chern_restricted().coeff
    gens = tower.generators
    total = Fraction(0)
    for exps, c in k_cls.terms().items():
        (g,) = [gi for gi, e in enumerate(exps) if e]
        total += c * st.center.restrict(gens[g])
    return total


def multinomial_power(dims: Sequence[int], coeffs: Sequence, exponent: int) -> dict[tuple[int, ...], Fraction]:
    """``(sum a_i H_i)**exponent`` in ``Q[H_1..H_m]/(H_i**(k_i + 1))``."""
    dims = tuple(dims)
    a = [as_rational(c) for c in coeffs]
    if len(a) != len(dims):
        raise MathError("one coefficient per factor is required")
    out: dict[tuple[int, ...], Fraction] = {}
    for exps in product(*(range(min(d, exponent) + 1) for d in dims)):
        if sum(exps) != exponent:
            continue
        mult = math.factorial(exponent)
        for e in exps:
            mult //= math.factorial(e)
        val = Fraction(mult)
        for ai, e in zip(a, exps):
            val *= ai ** e
        if val:
            out[exps] = val
    return out
