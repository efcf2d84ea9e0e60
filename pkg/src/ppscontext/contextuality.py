"""Mechanized noncontextuality proofs from logical paradoxes.

A verified logical paradox is refined into a constraint system over
projectors treated as alternative single-time measurements: the
pre-selection and post-selection projectors are fixed to value 1, every
certain intermediate outcome P contributes an orthogonal triple
{P, Q, R} resolving the identity (with R orthogonal to the
pre-selection and Q orthogonal to the post-selection), and orthogonal
node pairs exclude each other.  An exhaustive backtracking search over
0/1 assignments then either exhibits a satisfying assignment (SAT) or
proves that none exists (UNSAT), which rules out any value assignment
that is noncontextual and outcome-deterministic.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    NonorthogonalityRequired,
    NotAParadox,
    PreconditionViolated,
)
from .linalg import EPS_ORTH, EPS_PROJ, Projector, is_orthogonal, max_abs, meet
from .measurement import EPS_PROB, Pvm, Scenario, abl_probability
from .paradox import EPS_LOGIC, ParadoxVerdict, ProjectorIndex


@dataclass(frozen=True, eq=False)
class Decomposition:
    """Split of I - p into orthogonal parts q + r with pre r = 0 and
    post q = 0, valid whenever p is certain under the selections."""

    p: Projector
    q: Projector
    r: Projector


def split_complement(scenario: Scenario, p: Projector) -> Decomposition:
    """Decompose I - p into q + r killed by the post- and pre-selection.

    Requires post (I - p) pre = 0, which holds exactly when the
    conditional probability of p is 1.  The part fixed by both I - p and
    the complement of the pre-selection is r; the remainder q = (I-p) - r
    is then orthogonal to the post-selection.
    """
    if p.dim != scenario.dim:
        raise DimensionMismatch("projector dimension does not match scenario")
    comp = p.complement()
    residual = max_abs(scenario.post.matrix @ comp.matrix @ scenario.pre.matrix)
    if residual > EPS_ORTH:
        raise PreconditionViolated(
            f"post (I-p) pre has max entry {residual:.3g}; "
            "the outcome is not certain under the selections"
        )
    r = meet(comp, scenario.pre.complement())
    q = Projector.from_matrix(comp.matrix - r.matrix)
    if max_abs(scenario.pre.matrix @ r.matrix) > EPS_ORTH:
        raise PreconditionViolated("decomposition failed: pre r != 0")
    if max_abs(scenario.post.matrix @ q.matrix) > EPS_ORTH:
        raise PreconditionViolated("decomposition failed: post q != 0")
    return Decomposition(p=p, q=q, r=r)


@dataclass(frozen=True)
class SumConstraint:
    """Record that ``whole`` equals the orthogonal sum of the part nodes.

    The whole is kept as a plain projector; it is enforced during solving
    only when it coincides with a node (``whole_node`` is not None).
    """

    whole: Projector
    whole_node: int | None
    parts: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class ConstraintSystem:
    """0/1 constraint system over deduplicated projector nodes.

    fixed:       (node, value) pairs pinned before the search.
    exclusions:  orthogonal node pairs; at most one may take value 1.
    resolutions: mutually orthogonal node sets summing to the identity;
                 exactly one member takes value 1.
    sums:        whole-equals-sum-of-parts records.
    """

    nodes: tuple[Projector, ...]
    labels: tuple[str, ...]
    fixed: tuple[tuple[int, int], ...]
    exclusions: tuple[tuple[int, int], ...]
    resolutions: tuple[tuple[int, ...], ...]
    sums: tuple[SumConstraint, ...]


def ray_label(p: Projector) -> str | None:
    """Canonical display form of a rank-1 projector's ray, or None.

    The range vector is scaled so its first significant component equals
    +1; components are printed to 6 significant digits.
    """
    if p.rank != 1:
        return None
    w, v = np.linalg.eigh(p.matrix)
    vec = np.array(v[:, int(np.argmax(w))])
    peak = float(np.max(np.abs(vec)))
    lead = next(i for i, c in enumerate(vec) if abs(c) > 1e-6 * peak)
    vec = vec / vec[lead]
    parts = []
    for c in vec:
        re = 0.0 if abs(c.real) < 1e-9 else float(c.real)
        im = 0.0 if abs(c.imag) < 1e-9 else float(c.imag)
        if im == 0.0:
            parts.append(f"{re:.6g}")
        else:
            sign = "+" if im > 0 else "-"
            parts.append(f"{re:.6g}{sign}{abs(im):.6g}i")
    return "(" + ", ".join(parts) + ")"


def _make_labels(nodes: tuple[Projector, ...]) -> tuple[str, ...]:
    labels: list[str] = []
    seen: set[str] = set()
    for i, p in enumerate(nodes):
        label = ray_label(p)
        if label is None:
            label = f"[{i}] rank={p.rank}"
        if label in seen:
            label = f"{label} #{i}"
        seen.add(label)
        labels.append(label)
    return tuple(labels)


def assemble_system(
    nodes,
    fixed,
    resolutions,
    sums_raw,
) -> ConstraintSystem:
    """Finish a system: exclusions from pairwise orthogonality, canonical
    labels, and sum wholes resolved against the node set."""
    nodes = tuple(nodes)
    index = ProjectorIndex()
    for p in nodes:
        index.add(p)
    if len(index) != len(nodes):
        raise ValueError("node list contains duplicates")
    dim = nodes[0].dim if nodes else 0
    for members in resolutions:
        total = sum(nodes[m].matrix for m in members)
        if max_abs(total - np.eye(dim)) > EPS_PROJ:
            raise ValueError("resolution members do not sum to the identity")
    exclusions = tuple(
        (i, j)
        for i in range(len(nodes))
        for j in range(i + 1, len(nodes))
        if is_orthogonal(nodes[i], nodes[j])
    )
    sums = tuple(
        SumConstraint(whole=whole, whole_node=index.find(whole), parts=tuple(parts))
        for whole, parts in sums_raw
    )
    return ConstraintSystem(
        nodes=nodes,
        labels=_make_labels(nodes),
        fixed=tuple(fixed),
        exclusions=exclusions,
        resolutions=tuple(tuple(r) for r in resolutions),
        sums=sums,
    )


def build_constraint_system(
    scenario: Scenario, verdict: ParadoxVerdict
) -> ConstraintSystem:
    """Constraint system of a verified paradox, per the refinement above.

    Raises NotAParadox unless the verdict flags a paradox, and
    NonorthogonalityRequired when Tr(post pre) vanishes (fixing both
    selections to 1 is only justified for nonorthogonal selections).
    """
    if not verdict.is_paradox:
        raise NotAParadox("constraint systems are built from verified paradoxes")
    if scenario.pre_post_overlap() <= EPS_PROB:
        raise NonorthogonalityRequired(
            "pre- and post-selection projectors are orthogonal"
        )
    index = ProjectorIndex()
    pre_i = index.add(scenario.pre)
    post_i = index.add(scenario.post)
    fixed = tuple(dict.fromkeys([(pre_i, 1), (post_i, 1)]))

    resolutions: list[tuple[int, ...]] = []
    sums_raw: list[tuple[Projector, tuple[int, ...]]] = []
    assignment = verdict.assignment
    for pvm in scenario.measurements:
        values = [assignment.value_of(e) for e in pvm.elements]
        certain = [e for e, v in zip(pvm.elements, values) if v == 1]
        if not certain:
            continue
        p = certain[0]
        dec = split_complement(scenario, p)
        p_i = index.add(p)
        parts = tuple(index.add(x) for x in (dec.q, dec.r) if x.rank > 0)
        resolution = (p_i, *parts)
        if resolution not in resolutions:
            resolutions.append(resolution)
        sums_raw.append((p.complement(), parts))

    nodes = tuple(index.projector(i) for i in range(len(index)))
    return assemble_system(nodes, fixed, resolutions, sums_raw)


@dataclass(frozen=True)
class TraceStep:
    """One forced assignment: node, value, and the citing constraint."""

    node: int
    value: int
    reason: tuple


@dataclass(frozen=True)
class Certificate:
    """Result of the exhaustive search.

    SAT carries a full witness (value per node).  UNSAT carries the
    propagation log of the final failed branch, ending in ``conflict``,
    the constraint contradicted by previously forced values.
    ``search_nodes`` counts explored branches (root plus decisions).
    """

    status: str
    witness: tuple[int, ...] | None
    trace: tuple[TraceStep, ...]
    conflict: tuple | None
    search_nodes: int


class _Search:
    def __init__(self, system: ConstraintSystem) -> None:
        self.system = system
        n = len(system.nodes)
        self.n = n
        self.excl_of: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for a, b in system.exclusions:
            self.excl_of[a].append((a, b))
            self.excl_of[b].append((a, b))
        self.res_of: list[list[int]] = [[] for _ in range(n)]
        for ri, members in enumerate(system.resolutions):
            for m in members:
                self.res_of[m].append(ri)
        self.tracked_sums = [
            (s.whole_node, s.parts) for s in system.sums if s.whole_node is not None
        ]
        self.sum_of: list[list[int]] = [[] for _ in range(n)]
        for si, (whole, parts) in enumerate(self.tracked_sums):
            self.sum_of[whole].append(si)
            for m in parts:
                self.sum_of[m].append(si)
        # Branching order: fixed nodes first, then descending exclusion
        # degree with the label as tie-breaker.
        degree = [len(self.excl_of[i]) for i in range(n)]
        fixed_nodes = list(dict.fromkeys(node for node, _ in system.fixed))
        rest = sorted(
            (i for i in range(n) if i not in set(fixed_nodes)),
            key=lambda i: (-degree[i], system.labels[i], i),
        )
        self.order = fixed_nodes + rest

    def force(self, node, value, reason, values, queue, log):
        current = values[node]
        if current is None:
            values[node] = value
            log.append(TraceStep(node, value, reason))
            queue.append(node)
            return None
        return None if current == value else reason

    def propagate(self, values, queue, log):
        while queue:
            node = queue.popleft()
            value = values[node]
            if value == 1:
                for a, b in self.excl_of[node]:
                    other = b if node == a else a
                    conflict = self.force(
                        other, 0, ("exclusion", a, b), values, queue, log
                    )
                    if conflict is not None:
                        return conflict
            for ri in self.res_of[node]:
                conflict = self._apply_resolution(ri, values, queue, log)
                if conflict is not None:
                    return conflict
            for si in self.sum_of[node]:
                conflict = self._apply_sum(si, values, queue, log)
                if conflict is not None:
                    return conflict
        return None

    def _apply_resolution(self, ri, values, queue, log):
        members = self.system.resolutions[ri]
        reason = ("resolution", ri)
        ones = [m for m in members if values[m] == 1]
        unknown = [m for m in members if values[m] is None]
        if len(ones) > 1:
            return reason
        if len(ones) == 1:
            for m in unknown:
                conflict = self.force(m, 0, reason, values, queue, log)
                if conflict is not None:
                    return conflict
            return None
        if not unknown:
            return reason
        if len(unknown) == 1:
            return self.force(unknown[0], 1, reason, values, queue, log)
        return None

    def _apply_sum(self, si, values, queue, log):
        whole, parts = self.tracked_sums[si]
        reason = ("sum", si)
        v_whole = values[whole]
        known = sum(values[m] for m in parts if values[m] is not None)
        unknown = [m for m in parts if values[m] is None]
        if known > 1:
            return reason
        if v_whole == 0:
            if known > 0:
                return reason
            for m in unknown:
                conflict = self.force(m, 0, reason, values, queue, log)
                if conflict is not None:
                    return conflict
            return None
        if known == 1:
            conflict = self.force(whole, 1, reason, values, queue, log)
            if conflict is not None:
                return conflict
            for m in unknown:
                conflict = self.force(m, 0, reason, values, queue, log)
                if conflict is not None:
                    return conflict
            return None
        if not unknown:
            return self.force(whole, 0, reason, values, queue, log)
        if v_whole == 1 and len(unknown) == 1:
            return self.force(unknown[0], 1, reason, values, queue, log)
        return None


def solve(system: ConstraintSystem) -> Certificate:
    """Complete backtracking search with unit propagation.

    The search is exhaustive, so UNSAT is a proof that no admissible 0/1
    assignment exists.  Branching follows a fixed variable order, which
    makes the returned trace deterministic.
    """
    search = _Search(system)
    counter = {"branches": 1}
    last: dict[str, object] = {}

    values: list[int | None] = [None] * search.n
    log: list[TraceStep] = []
    queue: deque[int] = deque()
    conflict = None
    for node, value in system.fixed:
        conflict = search.force(node, value, ("fixed", node), values, queue, log)
        if conflict is not None:
            break
    if conflict is None:
        conflict = search.propagate(values, queue, log)
    if conflict is not None:
        return Certificate("UNSAT", None, tuple(log), conflict, counter["branches"])

    witness: dict[str, tuple[int, ...]] = {}

    def dfs(values, log) -> bool:
        node = next((i for i in search.order if values[i] is None), None)
        if node is None:
            witness["assignment"] = tuple(values)
            return True
        for value in (1, 0):
            counter["branches"] += 1
            child_values = list(values)
            child_log = list(log)
            child_queue: deque[int] = deque()
            conflict = search.force(
                node, value, ("decision", node), child_values, child_queue, child_log
            )
            if conflict is None:
                conflict = search.propagate(child_values, child_queue, child_log)
            if conflict is not None:
                last["log"], last["conflict"] = child_log, conflict
                continue
            if dfs(child_values, child_log):
                return True
        return False

    if dfs(values, log):
        return Certificate(
            "SAT", witness["assignment"], (), None, counter["branches"]
        )
    return Certificate(
        "UNSAT", None, tuple(last["log"]), last["conflict"], counter["branches"]
    )


def check_assignment(system: ConstraintSystem, values) -> bool:
    """True iff a full 0/1 assignment satisfies every constraint."""
    values = tuple(values)
    if len(values) != len(system.nodes) or any(v not in (0, 1) for v in values):
        return False
    for node, value in system.fixed:
        if values[node] != value:
            return False
    for a, b in system.exclusions:
        if values[a] == 1 and values[b] == 1:
            return False
    for members in system.resolutions:
        if sum(values[m] for m in members) != 1:
            return False
    for s in system.sums:
        if s.whole_node is None:
            continue
        if values[s.whole_node] != sum(values[m] for m in s.parts):
            return False
    return True


def verify_forced_value(scenario: Scenario, pvm: Pvm, k: int) -> bool:
    """Check that an extremal conditional probability is forced on every
    admissible noncontextual assignment.

    Builds the single-PVM constraint system for element ``k`` (refined
    through `split_complement`) and enumerates all 0/1 assignments: every
    one that satisfies the constraints with both selections valued 1 must
    give the element its extremal value.  Raises PreconditionViolated
    when the conditional probability is not extremal.
    """
    value = abl_probability(scenario, pvm, k)
    if abs(value - 1.0) <= EPS_LOGIC:
        target = 1
    elif abs(value) <= EPS_LOGIC:
        target = 0
    else:
        raise PreconditionViolated(f"conditional probability {value!r} not extremal")
    element = pvm.elements[k]
    if element.rank == 0:
        return target == 0
    if element.rank == element.dim:
        return target == 1

    index = ProjectorIndex()
    pre_i = index.add(scenario.pre)
    post_i = index.add(scenario.post)
    element_i = index.add(element)
    if target == 1:
        dec = split_complement(scenario, element)
        parts = tuple(index.add(x) for x in (dec.q, dec.r) if x.rank > 0)
        resolutions = ((element_i, *parts),)
        sums_raw = [(element.complement(), parts)]
    else:
        dec = split_complement(scenario, element.complement())
        parts = tuple(index.add(x) for x in (dec.q, dec.r) if x.rank > 0)
        resolutions = ()
        sums_raw = [(element, parts)]
    nodes = tuple(index.projector(i) for i in range(len(index)))
    fixed = tuple(dict.fromkeys([(pre_i, 1), (post_i, 1)]))
    system = assemble_system(nodes, fixed, resolutions, sums_raw)

    n = len(nodes)
    for bits in range(2**n):
        values = tuple((bits >> i) & 1 for i in range(n))
        if not check_assignment(system, values):
            continue
        if values[element_i] != target:
            return False
    return True


def export_orthogonality_graph(system: ConstraintSystem) -> str:
    """DOT text: one node per label, one edge per exclusion, resolution
    cliques and any non-rank-1 nodes noted in trailing comments."""
    lines = ["graph {"]
    for label in system.labels:
        lines.append(f'  "{label}";')
    for a, b in system.exclusions:
        lines.append(f'  "{system.labels[a]}" -- "{system.labels[b]}";')
    for members in system.resolutions:
        quoted = " ".join(f'"{system.labels[m]}"' for m in members)
        lines.append(f"  // resolution: {quoted}")
    for i, p in enumerate(system.nodes):
        if p.rank != 1:
            lines.append(f'  // rank-too-high: "{system.labels[i]}" rank={p.rank}')
    lines.append("}")
    return "\n".join(lines) + "\n"


__all__ = [
    "Decomposition",
    "split_complement",
    "SumConstraint",
    "ConstraintSystem",
    "ray_label",
    "assemble_system",
    "build_constraint_system",
    "TraceStep",
    "Certificate",
    "solve",
    "check_assignment",
    "verify_forced_value",
    "export_orthogonality_graph",
]
