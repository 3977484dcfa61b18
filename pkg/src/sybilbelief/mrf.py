"""Pairwise MRF over the social graph, inferred with loopy belief propagation.

Every node carries a binary state, column 0 for Sybil (-1) and column 1 for
benign (+1). Node potentials are ``(1 - theta, theta)``; edge potentials are
``w`` when the endpoints agree and ``1 - w`` otherwise. Observed labels clamp a
node to its tag.

Messages live in a ``(2m, 2)`` array indexed by directed edge, using the
numbering of :meth:`Graph.directed`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, ScenarioGraph
from .labels import LabelError, LabelSet
from .seeding import derive_seed, rng as make_rng


@dataclass(frozen=True)
class MrfParams:
    theta_default: float = 0.5
    # Clamped nodes ignore their prior; kept so that can be checked.
    theta_labeled: float = 0.5
    w_default: float = 0.9
    per_edge_w: dict | None = None

    def __post_init__(self):
        vals = [self.theta_default, self.theta_labeled, self.w_default]
        vals += list((self.per_edge_w or {}).values())
        for x in vals:
            if not 0.0 < x < 1.0:
                raise ValueError(f"MRF parameters must lie strictly inside (0, 1), got {x}")
        if not self.homophilic:
            warnings.warn("coupling w <= 0.5 does not encode homophily", stacklevel=3)

    @property
    def homophilic(self) -> bool:
        return self.w_default > 0.5 and all(x > 0.5 for x in (self.per_edge_w or {}).values())


@dataclass(frozen=True, eq=False)
class MrfModel:
    graph: Graph
    params: MrfParams
    evidence: LabelSet
    log_prior: np.ndarray = field(repr=False)     # (n, 2) unclamped node potentials
    log_evidence: np.ndarray = field(repr=False)  # (n, 2) with -inf on excluded states
    edge_w: np.ndarray = field(repr=False)        # (m,) coupling per undirected edge
    src: np.ndarray = field(repr=False)
    dst: np.ndarray = field(repr=False)
    rev: np.ndarray = field(repr=False)


def build_mrf(scenario: ScenarioGraph | Graph, labels: LabelSet, params: MrfParams) -> MrfModel:
    graph = scenario.graph if isinstance(scenario, ScenarioGraph) else scenario
    n, m = graph.node_count, graph.m
    if len(labels) and (labels.nodes.min() < 0 or labels.nodes.max() >= n):
        bad = labels.nodes[(labels.nodes < 0) | (labels.nodes >= n)][0]
        raise LabelError(f"labelled node {bad} is not in the graph")

    theta = np.full(n, params.theta_default)
    theta[labels.nodes] = params.theta_labeled
    log_prior = np.log(np.column_stack([1.0 - theta, theta]))
    log_evidence = log_prior.copy()
    # Kronecker clamp: zero potential on the state opposite the observed tag
    log_evidence[labels.nodes[~labels.sybil], 0] = -np.inf
    log_evidence[labels.nodes[labels.sybil], 1] = -np.inf

    edge_w = np.full(m, params.w_default)
    if params.per_edge_w:
        lookup = {(int(u), int(v)): i for i, (u, v) in enumerate(graph.edges)}
        for (u, v), w in params.per_edge_w.items():
            key = (min(u, v), max(u, v))
            if key not in lookup:
                raise ValueError(f"per-edge coupling given for non-edge {key}")
            edge_w[lookup[key]] = w

    src, dst = graph.directed()
    rev = (np.arange(2 * m) + m) % max(2 * m, 1)
    return MrfModel(graph, params, labels, log_prior, log_evidence, edge_w, src, dst, rev)


def initial_messages(model: MrfModel) -> np.ndarray:
    return np.full((2 * model.graph.m, 2), 0.5)


def _incoming_log(model: MrfModel, log_msgs: np.ndarray) -> np.ndarray:
    """Sum of log incoming messages at every node, shape (n, 2)."""
    n = model.graph.node_count
    out = np.empty((n, 2))
    out[:, 0] = np.bincount(model.dst, weights=log_msgs[:, 0], minlength=n)
    out[:, 1] = np.bincount(model.dst, weights=log_msgs[:, 1], minlength=n)
    return out


def lbp_step(model: MrfModel, messages: np.ndarray, normalize: bool = True) -> np.ndarray:
    """One synchronous sweep: every directed message recomputed from ``messages``."""
    if len(messages) == 0:
        return messages.copy()
    log_m = np.log(messages)
    incoming = _incoming_log(model, log_m)
    # cavity field at the sender, excluding what the receiver sent it
    cav = model.log_evidence[model.src] + incoming[model.src] - log_m[model.rev]
    shift = cav.max(axis=1, keepdims=True)
    a = np.exp(cav - shift)
    w = np.tile(model.edge_w, 2)
    new = np.empty_like(a)
    new[:, 0] = a[:, 0] * w + a[:, 1] * (1.0 - w)
    new[:, 1] = a[:, 0] * (1.0 - w) + a[:, 1] * w
    if normalize:
        new /= new.sum(axis=1, keepdims=True)
    else:
        new *= np.exp(shift)
    return new


def _normalize_log(logp: np.ndarray) -> np.ndarray:
    p = np.exp(logp - logp.max(axis=1, keepdims=True))
    return p / p.sum(axis=1, keepdims=True)


@dataclass(eq=False)
class Beliefs:
    """Posterior per node as ``(P(Sybil), P(benign))`` rows, plus run metadata."""

    posterior: np.ndarray
    iterations_run: int = 0
    converged: bool = True
    final_delta: float = 0.0
    messages: np.ndarray | None = None
    edge_updates: int = 0

    @property
    def p_benign(self) -> np.ndarray:
        return self.posterior[:, 1]

    @property
    def p_sybil(self) -> np.ndarray:
        return self.posterior[:, 0]


def run_lbp(model: MrfModel, max_iters: int = 10, tol: float = 1e-3,
            normalize: bool = True) -> Beliefs:
    """Iterate :func:`lbp_step` from uniform messages.

    Stops once the summed L1 change over all messages drops below ``tol`` or
    after ``max_iters`` sweeps; non-convergence is reported on the result.
    """
    msgs = initial_messages(model)
    delta = np.inf if len(msgs) else 0.0
    it = 0
    updates = 0
    while it < max_iters and delta >= tol:
        new = lbp_step(model, msgs, normalize=normalize)
        updates += len(new)
        if normalize:
            delta = float(np.abs(new - msgs).sum())
        else:
            delta = float(np.abs(new / new.sum(1, keepdims=True) - msgs / msgs.sum(1, keepdims=True)).sum())
        msgs = new
        it += 1
    logp = model.log_evidence + _incoming_log(model, np.log(msgs))
    return Beliefs(_normalize_log(logp), it, bool(delta < tol), float(delta if it else 0.0),
                   msgs, updates)


def classify(beliefs: Beliefs) -> np.ndarray:
    """Predicted Sybil mask; an exact 0.5 posterior counts as Sybil."""
    return ~(beliefs.p_benign > beliefs.p_sybil)


def rank(beliefs: Beliefs, restrict_to=None) -> np.ndarray:
    """Node ids by decreasing P(benign), ties broken by increasing id."""
    nodes = (np.arange(len(beliefs.posterior)) if restrict_to is None
             else np.unique(np.asarray(list(restrict_to), dtype=np.int64)))
    order = np.lexsort((nodes, -beliefs.p_benign[nodes]))
    return nodes[order]


def boost(scenario: ScenarioGraph | Graph, labels: LabelSet, params: MrfParams,
          trials: int = 10, sampled_per_trial: int | None = None, rng_seed: int = 0, *,
          include_labeled: bool = False, max_iters: int = 10, tol: float = 1e-3) -> Beliefs:
    """Run SybilBelief when only one class of labels is observed.

    Each trial treats ``sampled_per_trial`` random nodes as carrying the missing
    tag and runs LBP. Trials are merged by taking, per node, the largest
    posterior of the missing class. By default nodes already labelled are not
    eligible for sampling.
    """
    graph = scenario.graph if isinstance(scenario, ScenarioGraph) else scenario
    if len(labels) == 0:
        raise LabelError("boosting needs at least one observed label")
    if labels.sybil.all():
        missing_sybil = False
    elif not labels.sybil.any():
        missing_sybil = True
    else:
        raise LabelError("boosting expects labels of a single class")
    k = len(labels) if sampled_per_trial is None else sampled_per_trial
    if k > len(labels):
        raise LabelError(f"{k} sampled labels per trial exceeds the {len(labels)} observed labels")
    if trials < 1:
        raise ValueError("need at least one boosting trial")

    pool = np.arange(graph.node_count)
    if not include_labeled:
        pool = np.setdiff1d(pool, labels.nodes)
    col = 0 if missing_sybil else 1
    best = None
    iters, conv, deltas, updates = 0, True, 0.0, 0
    for i in range(trials):
        r = make_rng(derive_seed(rng_seed, i, "boost"))
        picked = np.sort(r.choice(pool, size=k, replace=False))
        if include_labeled:
            # an observed label wins over a pseudo-label on the same node
            picked = np.setdiff1d(picked, labels.nodes)
        pseudo = LabelSet(picked, np.full(len(picked), missing_sybil), np.zeros(len(picked), bool))
        b = run_lbp(build_mrf(graph, labels.union(pseudo), params), max_iters, tol)
        p = b.posterior[:, col]
        best = p.copy() if best is None else np.maximum(best, p)
        iters = max(iters, b.iterations_run)
        conv &= b.converged
        deltas = max(deltas, b.final_delta)
        updates += b.edge_updates
    post = np.empty((graph.node_count, 2))
    post[:, col] = best
    post[:, 1 - col] = 1.0 - best
    return Beliefs(post, iters, conv, deltas, None, updates)


def detect_noisy_labels(model: MrfModel, beliefs: Beliefs) -> np.ndarray:
    """Labelled nodes whose neighbourhood disagrees with their tag.

    For each labelled node the clamp is lifted: the belief is its prior times
    the final incoming messages. A node is flagged only when that belief
    strictly prefers the other state.
    """
    if beliefs.messages is None:
        raise ValueError("beliefs do not retain a message table")
    nodes = model.evidence.nodes
    incoming = _incoming_log(model, np.log(beliefs.messages))[nodes]
    b = model.log_prior[nodes] + incoming
    says_sybil = b[:, 0] > b[:, 1]
    says_benign = b[:, 1] > b[:, 0]
    tagged_sybil = model.evidence.sybil
    flagged = (tagged_sybil & says_benign) | (~tagged_sybil & says_sybil)
    return np.sort(nodes[flagged])
