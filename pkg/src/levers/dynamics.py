"""Iterated-map dynamics for sense-checking a cognitive map.

Each step applies x' = f(A x) where A is the weighted transposed adjacency
matrix. Two mappings are supported: a logistic sigmoid with a steepness
parameter, and a linear map normalized by the largest absolute component so
iterates cannot diverge. Fixed-point orderings give a quick importance
ranking of the factors; the controllability pipeline never depends on any
of this.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Optional

import numpy as np

from .model import FcmGraph, WeightMatrix, adjacency_matrix


class NonFiniteStateError(ArithmeticError):
    """A dynamics step produced a non-finite state component."""


class MappingKind(str, Enum):
    LINEAR = "linear"
    SIGMOID = "sigmoid"


@dataclass(frozen=True)
class MappingSpec:
    """Functional mapping applied after the matrix multiply."""

    kind: MappingKind = MappingKind.SIGMOID
    lam: float = 1.0

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("sigmoid steepness must be positive")


@dataclass(frozen=True)
class StateVector:
    """Factor activation levels at one discrete time step."""

    values: Mapping[str, float]
    step: int = 0

    def as_array(self, ids: tuple[str, ...]) -> np.ndarray:
        return np.array([self.values[fid] for fid in ids], dtype=float)


@dataclass(frozen=True)
class Trajectory:
    states: tuple[StateVector, ...]
    converged: bool
    fixed_point: Optional[StateVector] = None


def default_initial_state(graph: FcmGraph, mapping: MappingSpec) -> StateVector:
    """Neutral start: 0.5 everywhere for sigmoid, 1.0 for linear."""
    fill = 0.5 if mapping.kind is MappingKind.SIGMOID else 1.0
    return StateVector(values={fid: fill for fid in graph.factor_ids}, step=0)


def step(state: StateVector, matrix: WeightMatrix, mapping: MappingSpec) -> StateVector:
    """One update x' = f(A x).

    Sigmoid keeps components in (0, 1); linear divides by
    max(1, max |component|) so components stay in [-1, 1].
    """
    x = state.as_array(matrix.ids)
    y = matrix.values @ x
    if mapping.kind is MappingKind.SIGMOID:
        out = 1.0 / (1.0 + np.exp(-mapping.lam * y))
    else:
        out = y / max(1.0, float(np.max(np.abs(y))) if y.size else 1.0)
    if not np.all(np.isfinite(out)):
        raise NonFiniteStateError(f"non-finite state at step {state.step + 1}")
    return StateVector(
        values={fid: float(v) for fid, v in zip(matrix.ids, out)},
        step=state.step + 1,
    )


def iterate_to_fixed_point(
    graph: FcmGraph,
    mapping: MappingSpec,
    x0: Optional[StateVector] = None,
    tol: float = 1e-6,
    max_iter: int = 10_000,
) -> Trajectory:
    """Iterate until the max-norm step difference drops below ``tol``.

    Non-convergent runs (including period-2 oscillations) return
    converged=False after ``max_iter`` steps rather than averaging.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    matrix = adjacency_matrix(graph)
    state = x0 if x0 is not None else default_initial_state(graph, mapping)
    states = [state]
    for _ in range(max_iter):
        nxt = step(state, matrix, mapping)
        states.append(nxt)
        delta = max(
            abs(nxt.values[fid] - state.values[fid]) for fid in matrix.ids
        )
        state = nxt
        if delta < tol:
            return Trajectory(states=tuple(states), converged=True, fixed_point=state)
    return Trajectory(states=tuple(states), converged=False)


def rank_factors(fp: StateVector) -> list[str]:
    """Factor ids by descending activation, ties broken by id."""
    return sorted(fp.values, key=lambda fid: (-fp.values[fid], fid))


@dataclass(frozen=True)
class ConsistencyRanking:
    top: frozenset[str]
    bottom: frozenset[str]
    warnings: tuple[str, ...] = ()


def consistency_ranking(graph: FcmGraph, k: int) -> ConsistencyRanking:
    """Factors ranked near the top (and bottom) under BOTH mappings.

    Runs the linear and sigmoid maps to their fixed points and intersects
    the top-k (bottom-k) sets. A mapping that fails to converge contributes
    an empty set and a warning; a uniform fixed point is flagged degenerate
    since its ordering is pure tie-breaking.
    """
    n = len(graph.factors)
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    warnings: list[str] = []
    rankings: list[Optional[list[str]]] = []
    for kind in (MappingKind.LINEAR, MappingKind.SIGMOID):
        trajectory = iterate_to_fixed_point(graph, MappingSpec(kind=kind))
        if not trajectory.converged:
            warnings.append(f"{kind.value} mapping did not converge")
            rankings.append(None)
            continue
        fp = trajectory.fixed_point
        values = list(fp.values.values())
        if max(values) - min(values) < 1e-9:
            warnings.append(f"{kind.value} fixed point is uniform; ranking degenerate")
        rankings.append(rank_factors(fp))

    def intersect(select) -> frozenset[str]:
        sets = [frozenset(select(r)) for r in rankings if r is not None]
        if len(sets) < 2:
            return frozenset()
        return sets[0] & sets[1]

    return ConsistencyRanking(
        top=intersect(lambda r: r[:k]),
        bottom=intersect(lambda r: r[-k:]),
        warnings=tuple(warnings),
    )


def trajectory_csv(trajectory: Trajectory, graph: FcmGraph) -> str:
    """CSV with factor names as header and one row per step."""
    ids = graph.factor_ids
    names = {f.id: f.name for f in graph.factors}
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow([names[fid] for fid in ids])
    for state in trajectory.states:
        writer.writerow([repr(state.values[fid]) for fid in ids])
    return buffer.getvalue()
