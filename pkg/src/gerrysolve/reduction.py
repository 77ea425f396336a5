"""Hardness gadget linking rainbow matchings to districting.

A rainbow matching instance is a path with one color per edge and a size
target k.  It asks for k edges that share no endpoint and no color.  The
builder here rewrites that question as a districting instance on a longer
path, arranged so the distinguished candidate can reach its best possible
score only when the districts trace out a rainbow matching.

The gadget path has a head and a tail.  The head alternates k + 2 special
vertices with k + 1 dummy vertices.  Special vertices are the only ones
approving the target candidate and weigh 1 each, which caps the target at
k + 2 district wins and forces every one of those districts to be carved
out of the head.  The tail replays the original path: each original vertex
becomes a block (a single vertex at either end, a pair in the middle), and
each original edge becomes a segment of 2k + 2 vertices whose odd
positions approve the color of that edge.  Weights are set so a color can
only win two-vertex districts inside its own segment.  Dicing a segment
into its k + 1 pieces is the districting move that corresponds to putting
the edge in the matching: the color banks k + 1 wins, one short of the
target's k + 2.  A color on two diced segments would bank 2k + 2 wins and
sink the target, which is exactly the rainbow condition.  Two adjacent
diced segments would strand a block between them and hand the decoy
candidate one win too many, which is exactly the disjointness condition.
The district budget k' = k*k + 4k + 4 leaves no slack and is met only by
dicing k full segments.

The brute-force matching solver at the bottom is the ground-truth side
for pipeline tests and is capped accordingly.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from .model import Instance, Partition, gm_to_wgm, make_partition

TARGET = "target"
RIVAL = "rival"
DECOY = "decoy"

BRUTE_FORCE_VERTEX_CAP = 24


def color_name(color: int) -> str:
    """Candidate name standing in for an edge color label."""
    return f"color:{color}"


@dataclass(frozen=True)
class RainbowMatchingInstance:
    """A path on n vertices, one color per edge, and a matching size k.

    Edge j joins path vertices j and j + 1, so colors has length n - 1.
    Colors are positive integers; the same label may repeat.
    """

    n: int
    colors: Tuple[int, ...]
    k: int

    @property
    def edge_count(self) -> int:
        return self.n - 1

    def validate(self) -> None:
        """Raise ValueError on any malformed field."""
        if self.n < 2:
            raise ValueError("a rainbow matching instance needs at least one edge")
        if len(self.colors) != self.n - 1:
            raise ValueError(f"expected {self.n - 1} edge colors, got {len(self.colors)}")
        for j, col in enumerate(self.colors):
            if not isinstance(col, int) or col < 1:
                raise ValueError(f"edge {j} has color {col!r}, want an integer >= 1")
        if self.k < 1:
            raise ValueError("matching size k must be positive")

    def color_set(self) -> Tuple[int, ...]:
        """Distinct edge colors in ascending order."""
        return tuple(sorted(set(self.colors)))


def matching_problems(rm: RainbowMatchingInstance, edges: Sequence[int]) -> List[str]:
    """Reasons why `edges` is not a size-k rainbow matching; empty if it is.

    On a path, two edges are vertex disjoint exactly when their indices
    differ by at least two, so the checks are index arithmetic.
    """
    problems: List[str] = []
    chosen = sorted(edges)
    if len(chosen) != rm.k:
        problems.append(f"{len(chosen)} edges, want {rm.k}")
    if len(set(chosen)) != len(chosen):
        problems.append("an edge appears twice")
    in_range = [e for e in chosen if 0 <= e < rm.edge_count]
    if len(in_range) != len(chosen):
        problems.append("an edge index is out of range")
    for a, b in zip(chosen, chosen[1:]):
        if b - a == 1:
            problems.append(f"edges {a} and {b} share vertex {b}")
    used = [rm.colors[e] for e in in_range]
    if len(set(used)) != len(used):
        problems.append("two edges share a color")
    return problems


def solve_rainbow_bruteforce(
    rm: RainbowMatchingInstance,
) -> Tuple[bool, Optional[Tuple[int, ...]]]:
    """Exhaustive search for a rainbow matching, smallest edge indices first.

    Ground truth for pipeline tests, so it is capped at 24 path vertices.
    Returns the lexicographically first matching when one exists.
    """
    rm.validate()
    if rm.n > BRUTE_FORCE_VERTEX_CAP:
        raise ValueError(
            f"brute force capped at {BRUTE_FORCE_VERTEX_CAP} vertices, got n={rm.n}"
        )
    if rm.k > rm.edge_count:
        return False, None
    for combo in combinations(range(rm.edge_count), rm.k):
        if any(b - a == 1 for a, b in zip(combo, combo[1:])):
            continue
        if len({rm.colors[e] for e in combo}) == rm.k:
            return True, combo
    return False, None


@dataclass(frozen=True)
class ReducedInstance:
    """Districting gadget built from a rainbow matching instance.

    instance is the finished weighted form.  The remaining fields map
    gadget positions back to their origins: special and dummies list the
    head vertices in order, vertex_blocks[i] holds the one or two vertices
    standing in for path vertex i, segments[j] holds the 2k + 2 vertices
    standing in for edge j in path order, and color_candidates maps each
    edge color to its candidate index.
    """

    instance: Instance
    special: Tuple[int, ...]
    dummies: Tuple[int, ...]
    vertex_blocks: Tuple[Tuple[int, ...], ...]
    segments: Tuple[Tuple[int, ...], ...]
    color_candidates: Dict[int, int]


def reduced_vertex_count(n: int, k: int) -> int:
    """Gadget path length for an n-vertex instance with matching size k.

    The head contributes 2k + 3 vertices, the n vertex blocks contribute
    2n - 2, and the n - 1 segments contribute 2k + 2 each, which folds to
    the closed form below.
    """
    return n * (2 * k + 4) - 1


def reduce(rm: RainbowMatchingInstance) -> ReducedInstance:
    """Build the gadget instance for a rainbow matching question.

    Weight and approval table, with k the matching size:

        special head vertex       1       approves target
        dummy head vertex         3       approves decoy
        vertex block, first       3k + 4  approves rival
        vertex block, second      3k + 5  approves decoy
        segment odd position      5       approves the edge color
        segment even position     4       approves rival
        segment final position    1       approves rival

    The district count is k' = k*k + 4k + 4.  Raises ValueError when
    k < 5 (the gadget arithmetic needs the slack) or when the gadget
    would hold fewer vertices than districts, which only happens for
    paths too short to contain any size-k matching.
    """
    rm.validate()
    if rm.k < 5:
        raise ValueError(f"the gadget needs a matching size of at least 5, got k={rm.k}")
    k = rm.k
    k_prime = k * k + 4 * k + 4
    total = reduced_vertex_count(rm.n, k)
    if k_prime > total:
        raise ValueError(
            f"gadget would hold {total} vertices but needs {k_prime} districts; "
            f"a path on {rm.n} vertices has no size-{k} matching"
        )

    color_labels = rm.color_set()
    names = [TARGET, RIVAL, DECOY] + [color_name(c) for c in color_labels]
    target, rival, decoy = 0, 1, 2
    color_candidates = {c: 3 + i for i, c in enumerate(color_labels)}

    weights: List[int] = []
    approvals: List[int] = []

    def push(weight: int, candidate: int) -> int:
        weights.append(weight)
        approvals.append(candidate)
        return len(weights) - 1

    special = []
    dummies = []
    for _ in range(k + 1):
        special.append(push(1, target))
        dummies.append(push(3, decoy))
    special.append(push(1, target))

    vertex_blocks = []
    segments = []
    for i in range(rm.n):
        block = [push(3 * k + 4, rival)]
        if 0 < i < rm.n - 1:
            block.append(push(3 * k + 5, decoy))
        vertex_blocks.append(tuple(block))
        if i < rm.n - 1:
            col = color_candidates[rm.colors[i]]
            seg = []
            for j in range(k + 1):
                seg.append(push(5, col))
                seg.append(push(4 if j < k else 1, rival))
            segments.append(tuple(seg))

    inst = gm_to_wgm(
        n=total,
        edges=[(v, v + 1) for v in range(total - 1)],
        approvals=approvals,
        weight=weights,
        p=target,
        k=k_prime,
        candidates=names,
        graph_class="path",
    )
    return ReducedInstance(
        instance=inst,
        special=tuple(special),
        dummies=tuple(dummies),
        vertex_blocks=tuple(vertex_blocks),
        segments=tuple(segments),
        color_candidates=color_candidates,
    )


def forward_witness(rm: RainbowMatchingInstance, matching: Sequence[int]) -> Partition:
    """Partition of the gadget dictated by a rainbow matching.

    Head vertices become singletons, the segment of every matched edge is
    diced into its k + 1 two-vertex pieces, and each leftover stretch of
    the path becomes one district.  The result always has k' districts.
    The target wins its k + 2 singletons, the decoy wins the k + 1 dummy
    singletons, each matched color wins its k + 1 pieces, and the rival
    wins the k + 1 leftovers, so nobody beats the target.

    Raises ValueError when `matching` is not a size-k rainbow matching.
    """
    problems = matching_problems(rm, matching)
    if problems:
        raise ValueError("not a rainbow matching: " + "; ".join(problems))
    gadget = reduce(rm)
    groups: List[Tuple[int, ...]] = [(s,) for s in gadget.special]
    groups.extend((d,) for d in gadget.dummies)
    removed = set(gadget.special) | set(gadget.dummies)
    for e in matching:
        seg = gadget.segments[e]
        removed.update(seg)
        groups.extend((seg[2 * j], seg[2 * j + 1]) for j in range(rm.k + 1))
    run: List[int] = []
    for v in range(gadget.instance.n):
        if v in removed:
            if run:
                groups.append(tuple(run))
                run = []
        else:
            run.append(v)
    if run:
        groups.append(tuple(run))
    return make_partition(groups)
