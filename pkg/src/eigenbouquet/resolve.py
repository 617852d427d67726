"""Blowup chart tree with exceptional-divisor bookkeeping.

A chart is one coordinate patch of a blowup along a coordinate-subspace
center: for pivot s the substitution keeps x_s and sends x_t to x_s * x_t'
for the other center variables. Centers restricted to coordinate subspaces
are automatically smooth and in normal crossings with the accumulated
coordinate exceptional divisors, so geometric admissibility is enforced
syntactically.

On every chart the pulled-back generators of the Fitting ideal are divided
by their gcd (the local generator carrying the exceptional factor); the
quotients are the weak transform. The chart is resolved once the weak
transform visibly contains a unit: certified by a Groebner 1-membership
certificate, or probable when dense seeded sampling finds no common real
zero.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import (
    Polynomial,
    VarUniverse,
    divexact,
    gcd_multivariate,
    ideal_contains_one,
)

DEFAULT_DEPTH_CAP = 6
SAMPLE_COUNT = 2000

RESOLVED_CERTIFIED = "ResolvedCertified"
RESOLVED_PROBABLE = "ResolvedProbable"
UNRESOLVED = "Unresolved"
SCALAR_OPERATOR = "ScalarOperator"
INCONCLUSIVE = "Inconclusive"

GOOD_STATUSES = {RESOLVED_CERTIFIED, RESOLVED_PROBABLE, SCALAR_OPERATOR}

# fresh chart coordinate names, preferred order
_NAME_POOL = ("u", "v", "w", "a", "b", "c", "d", "e", "f", "g", "h")


class DegenerateChart(ValueError):
    """All pulled minors vanish identically: the family is scalar here."""


class CenterError(ValueError):
    pass


@dataclass
class CenterSpec:
    chart_path: tuple[str, ...]  # pivot names from the root, parent-chart naming
    variables: tuple[str, ...]  # center variables of the addressed chart

    def __post_init__(self):
        object.__setattr__(self, "chart_path", tuple(self.chart_path))
        object.__setattr__(self, "variables", tuple(self.variables))
        if len(set(self.variables)) != len(self.variables):
            raise CenterError("center variables must be distinct")
        if len(self.variables) < 2:
            raise CenterError("center must have codimension at least 2")


@dataclass
class ChartNode:
    path: tuple[str, ...]  # pivot variable names (parent-chart naming) from the root
    universe: VarUniverse  # parameter chart coordinates (fibers carried along)
    to_base: dict[str, Polynomial]  # base parameter -> polynomial in chart coords
    exceptional: list[tuple[str, int]] = field(default_factory=list)
    pulled_minors: list[Polynomial] = field(default_factory=list)
    local_generator: Polynomial | None = None
    weak_gens: list[Polynomial] = field(default_factory=list)
    status: str = INCONCLUSIVE
    witness: dict[str, Fraction] | None = None
    certificate: list[Polynomial] | None = None
    groebner_status: str = ""
    children: list["ChartNode"] = field(default_factory=list)
    center: tuple[str, ...] | None = None  # center blown up inside this chart

    @property
    def depth(self) -> int:
        return len(self.path)

    def is_leaf(self) -> bool:
        return not self.children

    def leaves(self):
        if self.is_leaf():
            yield self
        else:
            for child in self.children:
                yield from child.leaves()

    def find(self, path: tuple[str, ...]) -> "ChartNode":
        if tuple(path) == self.path:
            return self
        if len(path) <= len(self.path) or tuple(path[: len(self.path)]) != self.path:
            raise CenterError(f"chart address {path!r} not under {self.path!r}")
        pivot = path[len(self.path)]
        for child in self.children:
            if child.path[-1] == pivot:
                return child.find(path)
        raise CenterError(f"no chart with address {tuple(path)!r}")

    def base_point(self, point: dict) -> dict:
        return {name: poly.eval_scalar(point) for name, poly in self.to_base.items()}

    def base_point_float(self, point: dict) -> dict:
        return {
            name: poly.eval_complex({k: complex(v) for k, v in point.items()}).real
            for name, poly in self.to_base.items()
        }


def root_chart(fitting_gens: list[Polynomial], universe: VarUniverse) -> ChartNode:
    """Root chart over the base; the weak transform applies here as well."""
    to_base = {name: Polynomial.variable(universe, name) for name in universe.params}
    node = ChartNode(
        path=(),
        universe=universe,
        to_base=to_base,
        pulled_minors=[g.in_universe(universe) for g in fitting_gens],
    )
    weak_transform(node)
    return node


def weak_transform(node: ChartNode) -> ChartNode:
    """Divide the pulled minors by their gcd, the local generator."""
    minors = node.pulled_minors
    nonzero = [m for m in minors if not m.is_zero()]
    if not nonzero:
        raise DegenerateChart(f"all pulled minors vanish on chart {node.path!r}")
    g = Polynomial.zero(nonzero[0].universe)
    for m in nonzero:
        g = gcd_multivariate(g, m)
    node.local_generator = g
    node.weak_gens = [divexact(m, g) for m in minors]
    _record_exceptional_multiplicities(node)
    return node


def _record_exceptional_multiplicities(node: ChartNode):
    g = node.local_generator
    updated = []
    for name, _ in node.exceptional:
        mult = _min_exponent(g, name)
        updated.append((name, mult))
    node.exceptional = updated


def _min_exponent(p: Polynomial, name: str) -> int:
    if p.is_zero():
        return 0
    idx = p.universe.index(name)
    return min(e[idx] for e in p.terms)


def _fresh_names(universe: VarUniverse, count: int) -> list[str]:
    taken = set(universe.names)
    out = []
    for cand in _NAME_POOL:
        if cand not in taken:
            out.append(cand)
            taken.add(cand)
            if len(out) == count:
                return out
    k = 1
    while len(out) < count:
        cand = f"w{k}"
        if cand not in taken:
            out.append(cand)
            taken.add(cand)
        k += 1
    return out


def blowup_charts(node: ChartNode, center: tuple[str, ...], warn=None) -> list[ChartNode]:
    """One chart per pivot variable of a coordinate-subspace center."""
    variables = tuple(center)
    for name in variables:
        if name not in node.universe.params:
            raise CenterError(f"unknown chart variable {name!r}")
    if len(variables) < 2:
        raise CenterError("center must have codimension at least 2")
    if warn is not None and node.weak_gens:
        zero_map = {
            name: Polynomial.zero(node.universe) for name in variables
        }
        restricted = [g.substitute(zero_map, node.universe) for g in node.weak_gens]
        if any(not g.is_zero() for g in restricted):
            warn(
                f"center {variables!r} on chart {node.path!r} is not contained in "
                "the weak-transform zero set"
            )
    fresh = _fresh_names(node.universe, len(variables))
    rename = dict(zip(variables, fresh))
    children = []
    for pivot in variables:
        new_params = tuple(rename.get(name, name) for name in node.universe.params)
        pivot_new = rename[pivot]
        new_exc = (frozenset(rename.get(n, n) for n in node.universe.exceptional)) | {pivot_new}
        chart_universe = VarUniverse(new_params, node.universe.fibers, new_exc)
        pivot_poly = Polynomial.variable(chart_universe, pivot_new)
        mapping = {}
        for name in node.universe.params:
            if name == pivot:
                mapping[name] = pivot_poly
            elif name in rename:
                mapping[name] = pivot_poly * Polynomial.variable(chart_universe, rename[name])
            else:
                mapping[name] = Polynomial.variable(chart_universe, name)
        to_base = {
            base: poly.substitute(mapping, chart_universe)
            for base, poly in node.to_base.items()
        }
        child = ChartNode(
            path=node.path + (pivot,),
            universe=chart_universe,
            to_base=to_base,
            exceptional=[(rename.get(n, n), m) for n, m in node.exceptional]
            + [(pivot_new, 0)],
            pulled_minors=[m.substitute(mapping, chart_universe) for m in node.pulled_minors],
        )
        weak_transform(child)
        children.append(child)
    node.children = children
    node.center = variables
    return children


# -- principality -----------------------------------------------------


def sample_points(universe: VarUniverse, seed: int, count: int = SAMPLE_COUNT):
    """Deterministic pool of rational points biased toward coordinate subspaces."""
    names = universe.params
    u = len(names)
    pts: list[dict[str, Fraction]] = [{n: Fraction(0) for n in names}]
    for k in range(u):
        for s in (1, -1):
            pt = {n: Fraction(0) for n in names}
            pt[names[k]] = Fraction(s)
            pts.append(pt)
    rng = random.Random(seed)
    while len(pts) < count:
        pt = {}
        zero_mask = rng.random() < 0.35
        for n in names:
            if zero_mask and rng.random() < 0.5:
                pt[n] = Fraction(0)
            else:
                pt[n] = Fraction(rng.randint(-12, 12), rng.randint(1, 8))
        pts.append(pt)
    return pts[:count]


def principality_status(node: ChartNode, seed: int = 42) -> str:
    """Certify or probe emptiness of the weak transform's common zero set."""
    gens = [g for g in node.weak_gens if not g.is_zero()]
    if not gens:
        raise DegenerateChart(f"no nonzero weak generators on chart {node.path!r}")
    membership = ideal_contains_one(gens)
    node.groebner_status = membership.status
    if membership.contains_one:
        node.status = RESOLVED_CERTIFIED
        node.certificate = membership.certificate
        node.witness = None
        return node.status
    for pt in sample_points(node.universe, seed + len(node.path)):
        if all(not g.eval_scalar(pt) for g in gens):
            node.status = UNRESOLVED
            node.witness = pt
            return node.status
    node.status = RESOLVED_PROBABLE
    node.witness = None
    return node.status


# -- orchestration ----------------------------------------------------


@dataclass
class ResolutionOutcome:
    root: ChartNode | None
    verdict: str  # "Resolved" | "Unresolved" | "ScalarOperator"
    warnings: list[str] = field(default_factory=list)

    def leaves(self):
        return [] if self.root is None else list(self.root.leaves())


def run_sequence(
    fitting_gens: list[Polynomial],
    universe: VarUniverse,
    centers: list[CenterSpec],
    seed: int = 42,
    depth_cap: int = DEFAULT_DEPTH_CAP,
) -> ResolutionOutcome:
    """Apply the configured centers in order and grade every leaf."""
    warnings: list[str] = []
    root = root_chart(fitting_gens, universe)
    principality_status(root, seed)
    for spec in centers:
        node = root.find(tuple(spec.chart_path))
        if not node.is_leaf():
            raise CenterError(f"chart {spec.chart_path!r} was already blown up")
        if node.depth >= depth_cap:
            warnings.append(
                f"depth cap {depth_cap} reached at {node.path!r}; center skipped"
            )
            continue
        children = blowup_charts(node, spec.variables, warn=warnings.append)
        for child in children:
            principality_status(child, seed)
    statuses = {leaf.status for leaf in root.leaves()}
    verdict = "Resolved" if statuses <= GOOD_STATUSES else "Unresolved"
    return ResolutionOutcome(root, verdict, warnings)


def propose_center(node: ChartNode, seed: int = 42) -> tuple[str, ...] | None:
    """Heuristic: smallest coordinate subspace containing sampled common zeros."""
    gens = [g for g in node.weak_gens if not g.is_zero()]
    if not gens:
        return None
    witnesses = []
    for pt in sample_points(node.universe, seed + 1718):
        if all(not g.eval_scalar(pt) for g in gens):
            witnesses.append(pt)
            if len(witnesses) >= 25:
                break
    if not witnesses:
        return None
    zero_everywhere = [
        name
        for name in node.universe.params
        if all(not w[name] for w in witnesses)
    ]
    if len(zero_everywhere) < 2:
        return None
    return tuple(zero_everywhere)
