"""Screen similarity (insertion-distance over preorder tokens) and greedy merging."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, NamedTuple

from .abstraction import AbstractHierarchy

DEFAULT_D_MAX = 3


class NodeToken(NamedTuple):
    props: tuple[str, str | None]
    depth: int


def token_sequence(h: AbstractHierarchy) -> list[NodeToken]:
    """Preorder depth-first (props, depth) tokens; root has depth 0."""
    out = []
    stack = [(h.root, 0)]
    while stack:
        node, depth = stack.pop()
        out.append(NodeToken((node.element_type, node.element_id), depth))
        for child in reversed(node.children):
            stack.append((child, depth + 1))
    return out


def _match_masks(h: AbstractHierarchy) -> dict[int, int]:
    masks = h._masks
    if masks is None:
        masks = {}
        for k, t in enumerate(h.tokens):
            masks[t] = masks.get(t, 0) | (1 << k)
        h._masks = masks
    return masks


def lcs_length(a: AbstractHierarchy, b: AbstractHierarchy) -> int:
    """Length of the longest common subsequence of the two token sequences.

    Bit-parallel over the tokens of ``a`` (one machine word per 64 tokens,
    Python ints grow as needed), so one pass over ``b`` suffices.
    """
    masks = _match_masks(a)
    full = (1 << a.size) - 1
    v = full
    get = masks.get
    for t in b.tokens:
        u = v & get(t, 0)
        v = ((v + u) | (v - u)) & full
    return a.size - v.bit_count()


def lcs_length_seq(xs, ys) -> int:
    """Same bit-parallel LCS for arbitrary hashable sequences."""
    masks: dict = {}
    for k, t in enumerate(xs):
        masks[t] = masks.get(t, 0) | (1 << k)
    full = (1 << len(xs)) - 1
    v = full
    for t in ys:
        u = v & masks.get(t, 0)
        v = ((v + u) | (v - u)) & full
    return len(xs) - v.bit_count()


def sim_check(h1: AbstractHierarchy, h2: AbstractHierarchy, d_max: int = DEFAULT_D_MAX) -> bool:
    if d_max < 0:
        raise ValueError("d_max must be >= 0")
    lo, hi = sorted((h1.size, h2.size))
    if hi - lo > d_max:
        # |lcs| <= lo, so passing the first test already forces distance >= hi - lo
        return False
    if lo == hi and h1 == h2:
        return True
    lcs = lcs_length(h1, h2) if h1.size <= h2.size else lcs_length(h2, h1)
    if lcs < lo:
        return False
    return hi - lcs <= d_max


class SimilarityCache:
    """sim_check memoized per unordered fingerprint pair."""

    def __init__(self, d_max: int = DEFAULT_D_MAX, maxsize: int = 1 << 18):
        self.d_max = d_max
        self.maxsize = maxsize
        self._cache: dict[tuple[bytes, bytes], bool] = {}
        self.hits = 0
        self.misses = 0

    def __call__(self, h1: AbstractHierarchy, h2: AbstractHierarchy) -> bool:
        a, b = h1.fingerprint, h2.fingerprint
        key = (a, b) if a <= b else (b, a)
        hit = self._cache.get(key)
        if hit is not None:
            self.hits += 1
            return hit
        self.misses += 1
        result = sim_check(h1, h2, self.d_max)
        if len(self._cache) >= self.maxsize:
            self._cache.clear()
        self._cache[key] = result
        return result


@dataclass
class MergeMap:
    assignment: dict[bytes, bytes] = field(default_factory=dict)
    roots: set[bytes] = field(default_factory=set)

    def root_of(self, fingerprint: bytes) -> bytes:
        return self.assignment[fingerprint]

    def groups(self) -> dict[bytes, list[bytes]]:
        out: dict[bytes, list[bytes]] = {r: [] for r in self.roots}
        for member, root in self.assignment.items():
            out[root].append(member)
        return out


def merge_order(hierarchies: Iterable[AbstractHierarchy]) -> list[AbstractHierarchy]:
    """Processing order: ascending size, ties by fingerprint bytes."""
    return sorted(hierarchies, key=lambda h: (h.size, h.fingerprint))


def merge(
    hierarchies: Iterable[AbstractHierarchy],
    d_max: int = DEFAULT_D_MAX,
    check: Callable[[AbstractHierarchy, AbstractHierarchy], bool] | None = None,
) -> MergeMap:
    """Greedy grouping of similar screens; each group is named by its root."""
    if check is None:
        def check(a, b):
            return sim_check(a, b, d_max)

    order = merge_order(hierarchies)
    result = MergeMap()
    assigned = result.assignment
    for i, h in enumerate(order):
        if h.fingerprint in assigned:
            continue
        assigned[h.fingerprint] = h.fingerprint
        result.roots.add(h.fingerprint)
        for other in order[i + 1 :]:
            if other.size - h.size > d_max:
                break
            if other.fingerprint not in assigned and check(h, other):
                assigned[other.fingerprint] = h.fingerprint
    return result
