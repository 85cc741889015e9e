"""Grouping repeated acquisitions by step pattern."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from ..tracekit.steps import Step, StepModel


def same_pattern(a: StepModel, b: StepModel, tol: float) -> bool:
    """Equal step count and every level pair within ``tol`` relative.

    The relative gap is measured against the larger magnitude of the pair,
    which keeps the test symmetric. Step times are ignored.
    """
    if len(a) != len(b):
        return False
    for x, y in zip(a.levels, b.levels):
        if abs(x - y) > tol * max(abs(x), abs(y)):
            return False
    return True


def match_patterns(models: Sequence[StepModel], tol: float = 0.02) -> list[list[int]]:
    """Partition model indices into pattern groups.

    Each model joins the first group whose representative (its first member)
    it matches, otherwise it opens a new group. Groups come out in order of
    their first member.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    groups: list[list[int]] = []
    for i, m in enumerate(models):
        for g in groups:
            if same_pattern(models[g[0]], m, tol):
                g.append(i)
                break
        else:
            groups.append([i])
    return groups


@dataclass(frozen=True)
class Aggregate:
    model: StepModel
    support: int
    members: tuple[int, ...]


def mean_model(models: Sequence[StepModel]) -> StepModel:
    """Per-step mean of start times and levels; models must share a step count."""
    k = len(models)
    n_steps = len(models[0])
    if any(len(m) != n_steps for m in models):
        raise ValueError("models have different step counts")
    steps = tuple(
        Step(
            math.fsum(m.steps[j].start_s for m in models) / k,
            math.fsum(m.steps[j].level_w for m in models) / k,
        )
        for j in range(n_steps)
    )
    return StepModel(steps, math.fsum(m.end_s for m in models) / k)


def select_and_aggregate(models: Sequence[StepModel], groups: Sequence[Sequence[int]]) -> Aggregate:
    """Average the most common pattern; ties go to the earliest acquisition."""
    if not groups:
        raise ValueError("no groups to select from")
    best = min(groups, key=lambda g: (-len(g), min(g)))
    members = tuple(sorted(best))
    return Aggregate(mean_model([models[i] for i in members]), len(members), members)
