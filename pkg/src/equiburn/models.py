"""Geometric front-ends that produce classes.

Two model kinds: smooth complete fans carrying a diagonal action of a
finite abelian group through a surjective weight map (class computation,
equivariant blow-ups as star subdivisions, fixed-point tests), and formal
atlases of affine charts with boundary flags (the divisorial-index and
standardization loop).

Rays are primitive integer row vectors; a maximal cone lists the indices
of its rays, which must form a basis of the lattice up to sign.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from . import zlat
from .abgrp import (
    AbSubgroup,
    Character,
    FinAbGroup,
    finabgroup_from_json,
    finabgroup_to_json,
    restrict,
)
from .symb import BSymbol, ClassVector, canon_b, generates_dual


class NotGenericallyFree(ValueError):
    pass


class InconsistentCharts(RuntimeError):
    pass


class NotACone(ValueError):
    pass


class RayCone(ValueError):
    pass


class NonTermination(RuntimeError):
    pass


def _primitive(v) -> bool:
    from math import gcd
    from functools import reduce

    g = reduce(gcd, (abs(x) for x in v), 0)
    return g == 1


@dataclass(frozen=True)
class Fan:
    """Smooth complete simplicial fan."""

    dim: int
    rays: tuple[tuple[int, ...], ...]
    max_cones: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "rays", tuple(tuple(r) for r in self.rays))
        object.__setattr__(
            self,
            "max_cones",
            tuple(sorted(tuple(sorted(c)) for c in self.max_cones)),
        )
        self._validate()

    def _validate(self):
        n = self.dim
        if n < 1:
            raise ValueError("fan dimension must be at least 1")
        for r in self.rays:
            if len(r) != n:
                raise ValueError("ray of wrong dimension")
            if not _primitive(r):
                raise ValueError(f"ray {r} is not primitive")
        if len(set(self.rays)) != len(self.rays):
            raise ValueError("duplicate rays")
        if not self.max_cones:
            raise ValueError("no maximal cones")
        for c in self.max_cones:
            if len(c) != n or len(set(c)) != n:
                raise ValueError(f"maximal cone {c} does not have {n} distinct rays")
            if any(not 0 <= i < len(self.rays) for i in c):
                raise ValueError(f"cone {c} references a missing ray")
            if abs(zlat.det([list(self.rays[i]) for i in c])) != 1:
                raise ValueError(f"cone {c} is not smooth")
        self._check_facets()
        self._check_cover()

    def _check_facets(self):
        n = self.dim
        facets: dict[tuple, list[tuple]] = {}
        for c in self.max_cones:
            for i in c:
                facet = tuple(sorted(set(c) - {i}))
                facets.setdefault(facet, []).append(c)
        for facet, cones in facets.items():
            if len(cones) != 2:
                raise ValueError(
                    f"facet {facet} lies in {len(cones)} maximal cones, not 2"
                )
            rows = [list(self.rays[i]) for i in facet]
            signs = []
            for c in cones:
                (extra,) = set(c) - set(facet)
                d = zlat.det(rows + [list(self.rays[extra])])
                signs.append(1 if d > 0 else -1 if d < 0 else 0)
            if 0 in signs or signs[0] == signs[1]:
                raise ValueError(
                    f"maximal cones at facet {facet} do not lie on opposite sides"
                )

    def _check_cover(self):
        # A generic point must lie in exactly one maximal cone.
        rng = random.Random(0x5EED)
        for _ in range(64):
            v = [rng.randint(-10**6, 10**6) for _ in range(self.dim)]
            hits = 0
            degenerate = False
            for c in self.max_cones:
                R = [list(self.rays[i]) for i in c]
                x = zlat.vecmat(v, zlat.inverse_unimodular(R))
                if any(a == 0 for a in x):
                    degenerate = True
                    break
                if all(a > 0 for a in x):
                    hits += 1
            if degenerate:
                continue
            if hits != 1:
                raise ValueError("fan does not cover a generic point exactly once")
            return
        raise ValueError("could not find a generic test point")

    def contains_cone(self, tau) -> bool:
        tset = set(tau)
        return any(tset <= set(c) for c in self.max_cones)

    @staticmethod
    def projective_space(n: int) -> "Fan":
        rays = [
            tuple(1 if j == i else 0 for j in range(n)) for i in range(n)
        ] + [tuple([-1] * n)]
        cones = itertools.combinations(range(n + 1), n)
        return Fan(dim=n, rays=tuple(rays), max_cones=tuple(cones))


@dataclass(frozen=True)
class ToricGAction:
    """Fan plus a surjective weight map from the character lattice."""

    fan: Fan
    group: FinAbGroup
    w: tuple[Character, ...]

    def __post_init__(self):
        object.__setattr__(self, "w", tuple(self.w))
        if len(self.w) != self.fan.dim:
            raise ValueError("need one weight per lattice coordinate")
        for c in self.w:
            if c.group != self.group:
                raise ValueError("weight on the wrong group")
        if not generates_dual(self.group, self.w):
            raise NotGenericallyFree(
                "weight map is not surjective onto the dual group"
            )

    def chart_weights(self, cone) -> list[Character]:
        """Tangent weights at the chart of a maximal cone, ordered by its
        sorted ray indices (slot i is dual to ray cone[i])."""
        R = [list(self.fan.rays[i]) for i in cone]
        Rinv = zlat.inverse_unimodular(R)
        out = []
        for i in range(self.fan.dim):
            m = [Rinv[k][i] for k in range(self.fan.dim)]
            acc = self.group.zero_character()
            for coef, wk in zip(m, self.w):
                acc = acc + coef * wk
            out.append(acc)
        return out


def projective_space_action(group: FinAbGroup, weights) -> ToricGAction:
    """Projectivization of a diagonal action with the given weights.

    The weights are the characters on the n+1 homogeneous coordinates;
    their pairwise differences must generate the dual group.
    """
    weights = [
        w if isinstance(w, Character) else group.character(tuple(w)) for w in weights
    ]
    if len(weights) < 2:
        raise ValueError("need at least two homogeneous coordinates")
    n = len(weights) - 1
    diffs = [weights[k] - weights[0] for k in range(1, n + 1)]
    if not generates_dual(group, diffs):
        raise NotGenericallyFree(
            "pairwise weight differences do not generate the dual group"
        )
    return ToricGAction(fan=Fan.projective_space(n), group=group, w=tuple(diffs))


def class_b(act: ToricGAction) -> ClassVector:
    """Class of the action: one symbol per pointwise-fixed orbit closure.

    An orbit closure V(tau) is pointwise fixed when, in any chart containing
    tau, the weights vanish exactly on the rays outside tau; it contributes
    its nonzero normal weights padded by dim V(tau) zeros.  Chart agreement
    is asserted across every containing chart.
    """
    n = act.fan.dim
    candidates: dict[tuple, tuple] = {}
    chart_cache: dict[tuple, list[Character]] = {}
    for cone in act.fan.max_cones:
        weights = act.chart_weights(cone)
        chart_cache[cone] = weights
        tau = tuple(sorted(cone[i] for i in range(n) if not weights[i].is_zero()))
        normal = tuple(
            sorted(weights[i].coords for i in range(n) if not weights[i].is_zero())
        )
        if tau in candidates and candidates[tau] != normal:
            raise InconsistentCharts(
                f"fixed stratum {tau} has mismatched normal weights"
            )
        candidates[tau] = normal
    for tau, normal in candidates.items():
        for cone in act.fan.max_cones:
            if not set(tau) <= set(cone):
                continue
            weights = chart_cache[cone]
            tau_here = tuple(
                sorted(cone[i] for i in range(n) if not weights[i].is_zero())
            )
            normal_here = tuple(
                sorted(weights[i].coords for i in range(n) if not weights[i].is_zero())
            )
            if tau_here != tau or normal_here != normal:
                raise InconsistentCharts(
                    f"chart {cone} disagrees about fixed stratum {tau}"
                )
    out = ClassVector("b")
    for tau, normal in sorted(candidates.items()):
        beta = [act.group.character(c) for c in normal]
        beta += [act.group.zero_character()] * (n - len(tau))
        out = out + ClassVector.of(canon_b(act.group, beta, n))
    return out


def star_subdivide(act: ToricGAction, tau) -> ToricGAction:
    """Equivariant blow-up along the orbit closure of a fan cone.

    Inserts the ray sum of tau and star-subdivides every maximal cone
    containing tau; the weight map is unchanged.
    """
    tau = tuple(sorted(set(tau)))
    if any(not 0 <= i < len(act.fan.rays) for i in tau):
        raise NotACone(f"unknown ray indices in {tau}")
    if len(tau) < 2:
        raise RayCone("subdivision center must have at least two rays")
    if not act.fan.contains_cone(tau):
        raise NotACone(f"{tau} is not a cone of the fan")
    new_ray = tuple(
        sum(act.fan.rays[i][k] for i in tau) for k in range(act.fan.dim)
    )
    rays = act.fan.rays + (new_ray,)
    rho = len(act.fan.rays)
    cones = []
    for c in act.fan.max_cones:
        if set(tau) <= set(c):
            for k in tau:
                cones.append(tuple(sorted((set(c) - {k}) | {rho})))
        else:
            cones.append(c)
    fan = Fan(dim=act.fan.dim, rays=rays, max_cones=tuple(cones))
    return ToricGAction(fan=fan, group=act.group, w=act.w)


def product_trivial_pm(cv: ClassVector, m: int) -> ClassVector:
    """Class of the product with a trivial projective factor of dimension m:
    every symbol gains m zero weights."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    if m == 0:
        return cv
    out = ClassVector("b")
    for s, c in cv.terms.items():
        beta = list(s.beta) + [s.group.zero_character()] * m
        out = out + ClassVector.of(canon_b(s.group, beta, s.n + m), c)
    return out


def has_fixed_point(act: ToricGAction, sub: AbSubgroup) -> bool:
    """Fixed-point test for the restriction to a subgroup.

    Scans for a cone whose restricted chart weights vanish exactly outside
    it.  On a complete fan the chart of any maximal cone witnesses this, so
    torus-embedded actions always restrict with fixed points.
    """
    if sub.parent != act.group:
        raise ValueError("subgroup of a different group")
    n = act.fan.dim
    for cone in act.fan.max_cones:
        weights = act.chart_weights(cone)
        restricted = [restrict(wt, sub) for wt in weights]
        tau = [cone[i] for i in range(n) if not restricted[i].is_zero()]
        outside = set(cone) - set(tau)
        if all(
            restricted[i].is_zero() for i in range(n) if cone[i] in outside
        ):
            return True
    return False


# ---------------------------------------------------------------------------
# Affine chart models with boundary


@dataclass(frozen=True)
class Chart:
    weights: tuple[Character, ...]
    boundary: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(self.weights))
        object.__setattr__(self, "boundary", frozenset(self.boundary))
        if any(not 0 <= i < len(self.weights) for i in self.boundary):
            raise ValueError("boundary flag outside the coordinate range")


@dataclass(frozen=True)
class ChartModel:
    group: FinAbGroup
    charts: tuple[Chart, ...]

    def __post_init__(self):
        object.__setattr__(self, "charts", tuple(self.charts))
        if not self.charts:
            raise ValueError("chart model needs at least one chart")
        n = len(self.charts[0].weights)
        for ch in self.charts:
            if len(ch.weights) != n:
                raise ValueError("charts of mixed dimension")
            for wt in ch.weights:
                if wt.group != self.group:
                    raise ValueError("weight on the wrong group")

    @property
    def dim(self) -> int:
        return len(self.charts[0].weights)


def _stratum_index(group_elems, chart: Chart, Z: tuple[int, ...]) -> int:
    """Divisorial index of the stratum vanishing exactly on Z."""
    zset = set(Z)
    weights = chart.weights
    stab = [
        g
        for g in group_elems
        if all(weights[i].pair(g) == 0 for i in range(len(weights)) if i not in zset)
    ]
    bnd = zset & chart.boundary
    hprime = [g for g in stab if all(weights[i].pair(g) == 0 for i in bnd)]
    return sum(
        1
        for i in range(len(weights))
        if any(weights[i].pair(g) != 0 for g in hprime)
    )


def divisorial_index(cm: ChartModel):
    """Maximum of the divisorial index with its attaining strata.

    Returns (m, attaining) where attaining lists (chart_index, stratum)
    pairs with index m; the list is empty when the index vanishes
    everywhere, i.e. the model is already standard.
    """
    elems = list(cm.group.elements())
    n = cm.dim
    best = 0
    attain: list[tuple[int, tuple[int, ...]]] = []
    for ci, chart in enumerate(cm.charts):
        for size in range(n + 1):
            for Z in itertools.combinations(range(n), size):
                d = _stratum_index(elems, chart, Z)
                if d > best:
                    best = d
                    attain = [(ci, Z)]
                elif d == best and d > 0:
                    attain.append((ci, Z))
    return best, attain


def _blow_up_chart(chart: Chart, center: tuple[int, ...]) -> list[Chart]:
    """Charts of the blow-up of the coordinate subspace {x_i = 0, i in C}.

    Chart k keeps slot k as the exceptional direction (weight a_k, flagged
    boundary); the other center slots become shears a_i - a_k; boundary
    flags ride along on the strict transforms.
    """
    out = []
    cset = set(center)
    for k in center:
        weights = []
        for i, a in enumerate(chart.weights):
            if i == k or i not in cset:
                weights.append(a)
            else:
                weights.append(a - chart.weights[k])
        out.append(Chart(weights=tuple(weights), boundary=chart.boundary | {k}))
    return out


@dataclass(frozen=True)
class BlowUpStep:
    iteration: int
    chart: int
    center: tuple[int, ...]
    index: int


def standardize(cm: ChartModel) -> tuple[ChartModel, list[BlowUpStep]]:
    """Blow up maximal-index strata until the divisorial index vanishes.

    Within each affected chart the attaining strata form one upward-closed
    family; its unique minimal member is the blow-up center there.  The
    maximal index must drop strictly every iteration.
    """
    log: list[BlowUpStep] = []
    prev = None
    iteration = 0
    while True:
        m, attain = divisorial_index(cm)
        if m == 0:
            return cm, log
        if prev is not None and m >= prev:
            raise NonTermination(
                f"divisorial index failed to decrease: {prev} -> {m}"
            )
        prev = m
        by_chart: dict[int, list[tuple[int, ...]]] = {}
        for ci, Z in attain:
            by_chart.setdefault(ci, []).append(Z)
        new_charts: list[Chart] = []
        for ci, chart in enumerate(cm.charts):
            strata = by_chart.get(ci)
            if not strata:
                new_charts.append(chart)
                continue
            minimal = [
                Z
                for Z in strata
                if not any(set(Z2) < set(Z) for Z2 in strata)
            ]
            if len(minimal) != 1:
                raise NonTermination(
                    f"maximal-index locus in chart {ci} is not irreducible: {minimal}"
                )
            center = minimal[0]
            covered = {Z for Z in strata if set(center) <= set(Z)}
            if covered != set(strata):
                raise NonTermination(
                    f"maximal-index locus in chart {ci} is not closed upward"
                )
            new_charts.extend(_blow_up_chart(chart, center))
            log.append(
                BlowUpStep(iteration=iteration, chart=ci, center=center, index=m)
            )
        cm = ChartModel(group=cm.group, charts=tuple(new_charts))
        iteration += 1


# ---------------------------------------------------------------------------
# Wire format

SCHEMA = 1


def action_to_json(act: ToricGAction) -> dict:
    return {
        "schema": SCHEMA,
        "fan": {
            "n": act.fan.dim,
            "rays": [list(r) for r in act.fan.rays],
            "max_cones": [list(c) for c in act.fan.max_cones],
        },
        "group": finabgroup_to_json(act.group),
        "w": [list(c.coords) for c in act.w],
    }


def action_from_json(d: dict) -> ToricGAction:
    if d.get("schema", SCHEMA) != SCHEMA:
        raise ValueError(f"unsupported action schema {d.get('schema')}")
    if "pspace" in d:
        spec = d["pspace"]
        group = finabgroup_from_json(spec["group"])
        return projective_space_action(group, [tuple(wt) for wt in spec["weights"]])
    group = finabgroup_from_json(d["group"])
    fan = Fan(
        dim=d["fan"]["n"],
        rays=tuple(tuple(r) for r in d["fan"]["rays"]),
        max_cones=tuple(tuple(c) for c in d["fan"]["max_cones"]),
    )
    w = tuple(group.character(tuple(c)) for c in d["w"])
    return ToricGAction(fan=fan, group=group, w=w)


def chart_model_to_json(cm: ChartModel) -> dict:
    return {
        "schema": SCHEMA,
        "group": finabgroup_to_json(cm.group),
        "charts": [
            {
                "weights": [list(c.coords) for c in ch.weights],
                "boundary": sorted(ch.boundary),
            }
            for ch in cm.charts
        ],
    }


def chart_model_from_json(d: dict) -> ChartModel:
    if d.get("schema", SCHEMA) != SCHEMA:
        raise ValueError(f"unsupported chart model schema {d.get('schema')}")
    group = finabgroup_from_json(d["group"])
    charts = tuple(
        Chart(
            weights=tuple(group.character(tuple(c)) for c in ch["weights"]),
            boundary=frozenset(ch.get("boundary", ())),
        )
        for ch in d["charts"]
    )
    return ChartModel(group=group, charts=charts)
