"""Observed label sets: sampling by site policy and noise injection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import ScenarioGraph
from .seeding import rng as make_rng

SITE_POLICIES = ("uniform", "SI", "SII")


class LabelError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class LabelSet:
    """Observed labels: ``nodes[i]`` carries tag Sybil iff ``sybil[i]``.

    ``noisy[i]`` marks tags that were deliberately flipped.
    """

    nodes: np.ndarray
    sybil: np.ndarray
    noisy: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=np.int64).reshape(-1)
        sybil = np.asarray(self.sybil, dtype=bool).reshape(-1)
        noisy = np.asarray(self.noisy, dtype=bool).reshape(-1)
        if not len(nodes) == len(sybil) == len(noisy):
            raise LabelError("label arrays must have equal length")
        if len(np.unique(nodes)) != len(nodes):
            raise LabelError("a node may be labelled at most once")
        for name, a in (("nodes", nodes), ("sybil", sybil), ("noisy", noisy)):
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    @classmethod
    def empty(cls) -> "LabelSet":
        return cls(np.empty(0, dtype=np.int64), np.empty(0, dtype=bool), np.empty(0, dtype=bool))

    @classmethod
    def from_dict(cls, tags: dict[int, str]) -> "LabelSet":
        """Build from ``{node: "B" | "S"}``."""
        items = sorted(tags.items())
        for _, t in items:
            if t not in ("B", "S"):
                raise LabelError(f"unknown tag {t!r}")
        return cls(np.array([v for v, _ in items], dtype=np.int64),
                   np.array([t == "S" for _, t in items], dtype=bool),
                   np.zeros(len(items), dtype=bool))

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def benign_nodes(self) -> np.ndarray:
        return self.nodes[~self.sybil]

    @property
    def sybil_nodes(self) -> np.ndarray:
        return self.nodes[self.sybil]

    @property
    def noisy_nodes(self) -> np.ndarray:
        return self.nodes[self.noisy]

    def only(self, sybil: bool) -> "LabelSet":
        keep = self.sybil == sybil
        return LabelSet(self.nodes[keep], self.sybil[keep], self.noisy[keep])

    def swapped(self) -> "LabelSet":
        return LabelSet(self.nodes, ~self.sybil, self.noisy)

    def union(self, other: "LabelSet") -> "LabelSet":
        return LabelSet(np.concatenate([self.nodes, other.nodes]),
                        np.concatenate([self.sybil, other.sybil]),
                        np.concatenate([self.noisy, other.noisy]))

    def as_dict(self) -> dict[int, str]:
        return {int(v): ("S" if s else "B") for v, s in zip(self.nodes, self.sybil)}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LabelSet):
            return NotImplemented
        return (np.array_equal(self.nodes, other.nodes) and np.array_equal(self.sybil, other.sybil)
                and np.array_equal(self.noisy, other.noisy))


def _eligible(scenario: ScenarioGraph, sybil_region: bool, policy: str) -> np.ndarray:
    region = scenario.is_sybil == sybil_region
    if policy == "uniform":
        mask = region
    elif policy == "SI":
        mask = region & ~scenario.attack_endpoints()
    elif policy == "SII":
        mask = region & scenario.attack_endpoints()
    else:
        raise LabelError(f"unknown site policy {policy!r}; expected one of {SITE_POLICIES}")
    return np.flatnonzero(mask)


def _draw(r: np.random.Generator, pool: np.ndarray, count: int, groups: np.ndarray | None) -> np.ndarray:
    if groups is None:
        return r.choice(pool, size=count, replace=False)
    # one node per group first, then the remainder uniformly
    g = groups[pool]
    kinds = np.unique(g)
    if count < len(kinds):
        raise LabelError(f"{count} labels cannot cover {len(kinds)} communities")
    first = np.array([r.choice(pool[g == k]) for k in kinds], dtype=np.int64)
    rest = np.setdiff1d(pool, first)
    return np.concatenate([first, r.choice(rest, size=count - len(first), replace=False)])


def sample_labels(scenario: ScenarioGraph, n_benign: int, n_sybil: int,
                  site_policy: str = "uniform", rng_seed: int = 0, *,
                  sybil_site_policy: str | None = None,
                  benign_groups: np.ndarray | None = None) -> LabelSet:
    """Draw labelled nodes uniformly from each region's eligible set.

    ``site_policy`` applies to benign labels and, unless ``sybil_site_policy``
    is given, to Sybil labels too. SI picks nodes with no attack edge, SII
    picks attack-edge endpoints. ``benign_groups`` (community id per node)
    forces at least one benign label per community.
    """
    sybil_policy = sybil_site_policy or site_policy
    r = make_rng(rng_seed)
    picked = []
    for is_syb, count, policy, groups in ((False, n_benign, site_policy, benign_groups),
                                          (True, n_sybil, sybil_policy, None)):
        pool = _eligible(scenario, is_syb, policy)
        if count < 0:
            raise LabelError("label counts must be nonnegative")
        if count > len(pool):
            region = "Sybil" if is_syb else "benign"
            raise LabelError(f"{region} region has {len(pool)} nodes eligible under "
                             f"{policy}, {count} labels requested")
        picked.append(_draw(r, pool, count, groups) if count else np.empty(0, dtype=np.int64))
    nodes = np.concatenate(picked)
    tags = np.concatenate([np.zeros(n_benign, bool), np.ones(n_sybil, bool)])
    order = np.argsort(nodes, kind="stable")
    return LabelSet(nodes[order], tags[order], np.zeros(len(nodes), dtype=bool))


def inject_noise(labels: LabelSet, n_benign_flips: int, n_sybil_flips: int,
                 rng_seed: int = 0) -> LabelSet:
    """Flip ``n_benign_flips`` benign tags to Sybil and ``n_sybil_flips`` Sybil tags to benign."""
    r = make_rng(rng_seed)
    sybil = labels.sybil.copy()
    noisy = labels.noisy.copy()
    for tag, count in ((False, n_benign_flips), (True, n_sybil_flips)):
        idx = np.flatnonzero(labels.sybil == tag)
        if count < 0 or count > len(idx):
            name = "Sybil" if tag else "benign"
            raise LabelError(f"cannot flip {count} of {len(idx)} {name} labels")
        flip = r.choice(idx, size=count, replace=False) if count else idx[:0]
        sybil[flip] = not tag
        noisy[flip] = True
    return LabelSet(labels.nodes, sybil, noisy)
