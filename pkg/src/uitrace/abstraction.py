"""Screen abstraction and exact screen identity.

Concrete hierarchies are reduced to the visible, on-screen elements, keeping
only element type, element id, tree structure and the activity name.  Two
screens are "the same screen" when their abstractions are structurally equal.
"""

from __future__ import annotations

import hashlib
import threading
import weakref
from dataclasses import dataclass

from .trace import Bounds, Trace, UiHierarchy, UiNode

# Roots are tested against this rectangle; any real device screen anchored at
# the origin intersects it.
DEFAULT_SCREEN: Bounds = (0, 0, 1080, 1920)

_ID_SENTINEL = b"\x00"

# (type, id, depth) -> small int, shared by every hierarchy in the process
_TOKEN_IDS: dict[tuple, int] = {}
_TOKEN_LOCK = threading.Lock()


def token_id(token: tuple) -> int:
    tid = _TOKEN_IDS.get(token)
    if tid is None:
        with _TOKEN_LOCK:
            tid = _TOKEN_IDS.setdefault(token, len(_TOKEN_IDS))
    return tid


@dataclass(frozen=True, slots=True)
class AbstractNode:
    element_type: str
    element_id: str | None = None
    children: tuple[AbstractNode, ...] = ()


class AbstractHierarchy:
    """Abstract screen: activity plus a type/id-only tree.

    Equality is structural.  ``tokens`` holds the preorder (props, depth)
    sequence as interned ints, which determines the ordered tree uniquely and
    doubles as the input to the similarity check.
    """

    __slots__ = ("activity", "root", "size", "fingerprint", "tokens", "_masks", "__weakref__")

    def __init__(self, activity: str, root: AbstractNode):
        self.activity = activity
        self.root = root
        tokens = []
        digest = hashlib.blake2b(digest_size=16)
        digest.update(_field(activity))
        stack = [(root, 0)]
        while stack:
            node, depth = stack.pop()
            tokens.append(token_id((node.element_type, node.element_id, depth)))
            digest.update(_field(node.element_type))
            digest.update(_ID_SENTINEL if node.element_id is None else b"\x01" + _field(node.element_id))
            digest.update(len(node.children).to_bytes(4, "big"))
            for child in reversed(node.children):
                stack.append((child, depth + 1))
        self.tokens = tuple(tokens)
        self.size = len(tokens)
        self.fingerprint = digest.digest()
        self._masks = None

    @property
    def hex(self) -> str:
        return self.fingerprint.hex()

    def __eq__(self, other):
        if not isinstance(other, AbstractHierarchy):
            return NotImplemented
        return (
            self.fingerprint == other.fingerprint
            and self.activity == other.activity
            and self.tokens == other.tokens
        )

    def __hash__(self):
        return hash(self.fingerprint)

    def __repr__(self):
        return f"AbstractHierarchy({self.activity!r}, size={self.size}, fp={self.hex[:12]})"


def _field(s: str) -> bytes:
    raw = s.encode("utf-8")
    return len(raw).to_bytes(4, "big") + raw


def _overlap(a: Bounds, b: Bounds) -> tuple[int, int]:
    return min(a[2], b[2]) - max(a[0], b[0]), min(a[3], b[3]) - max(a[1], b[1])


def intersects(child: Bounds, region: Bounds) -> bool:
    """Closed-rectangle intersection test used for pruning.

    Positive-area overlap or a shared edge of positive length counts.  A
    zero-area child is kept when it merely touches the region.
    """
    w, h = _overlap(child, region)
    if w < 0 or h < 0:
        return False
    if w > 0 or h > 0:
        return True
    return child[0] == child[2] or child[1] == child[3]


def clip(child: Bounds, region: Bounds) -> Bounds:
    return (max(child[0], region[0]), max(child[1], region[1]), min(child[2], region[2]), min(child[3], region[3]))


def _abstract_node(node: UiNode, region: Bounds) -> AbstractNode:
    kept = []
    for child in node.children:
        if child.visible and intersects(child.bounds, region):
            kept.append(_abstract_node(child, clip(child.bounds, region)))
    return AbstractNode(node.element_type, node.element_id, tuple(kept))


def is_displayed(node: UiNode, region: Bounds) -> bool:
    return node.visible and intersects(node.bounds, region)


def abstract(h: UiHierarchy, screen: Bounds = DEFAULT_SCREEN) -> AbstractHierarchy:
    root = h.root
    if is_displayed(root, screen):
        aroot = _abstract_node(root, clip(root.bounds, screen))
    else:
        # an undisplayed root still anchors the tree; it just has nothing under it
        aroot = AbstractNode(root.element_type, root.element_id)
    return AbstractHierarchy(h.activity, aroot)


def displayed_nodes(h: UiHierarchy, screen: Bounds = DEFAULT_SCREEN):
    """Yield (node, path-steps) for every concrete node that survives abstraction."""
    root = h.root
    if not is_displayed(root, screen):
        yield root, ()
        return
    stack = [(root, clip(root.bounds, screen), ())]
    while stack:
        node, region, steps = stack.pop()
        yield node, steps
        for k, child in enumerate(node.children):
            if is_displayed(child, region):
                stack.append((child, clip(child.bounds, region), steps + ((child.element_type, child.element_id, k),)))


class ScreenIndex:
    """Per-trace table mapping every entry to a distinct abstract screen.

    ``ids[k]`` is the screen id of 0-based entry ``k``; ``screens[s]`` is the
    abstract hierarchy with id ``s`` (ids follow first appearance).
    """

    def __init__(self, trace: Trace, screen: Bounds = DEFAULT_SCREEN):
        self.n = len(trace.entries)
        self.screens: list[AbstractHierarchy] = []
        self.ids: list[int] = []
        by_fp: dict[bytes, list[int]] = {}
        by_object: dict[int, int] = {}
        for entry in trace.entries:
            h = entry.hierarchy
            sid = by_object.get(id(h))
            if sid is None:
                ah = abstract(h, screen)
                candidates = by_fp.setdefault(ah.fingerprint, [])
                for c in candidates:
                    if self.screens[c] == ah:
                        sid = c
                        break
                else:
                    sid = len(self.screens)
                    self.screens.append(ah)
                    candidates.append(sid)
                by_object[id(h)] = sid
            self.ids.append(sid)

    def __len__(self) -> int:
        return self.n

    def screen_at(self, i: int) -> AbstractHierarchy:
        return self.screens[self.ids[i - 1]]

    def distinct_ids(self, l: int, r: int) -> set[int]:
        _check_window(l, r, self.n)
        return set(self.ids[l - 1 : r])

    def distinct(self, l: int, r: int) -> set[bytes]:
        return {self.screens[s].fingerprint for s in self.distinct_ids(l, r)}


def _check_window(l: int, r: int, n: int) -> None:
    if not (1 <= l <= r <= n):
        raise IndexError(f"window [{l}, {r}] outside 1..{n}")


_INDEX_CACHE: dict[int, ScreenIndex] = {}
_INDEX_LOCK = threading.Lock()


def screen_index(trace: Trace) -> ScreenIndex:
    """Memoized :class:`ScreenIndex` for a live trace object."""
    key = id(trace)
    idx = _INDEX_CACHE.get(key)
    if idx is None:
        idx = ScreenIndex(trace)
        with _INDEX_LOCK:
            if key not in _INDEX_CACHE:
                _INDEX_CACHE[key] = idx
                weakref.finalize(trace, _INDEX_CACHE.pop, key, None)
            idx = _INDEX_CACHE[key]
    return idx


def distinct_screens(trace: Trace, l: int, r: int) -> set[bytes]:
    """Fingerprints of the distinct abstract screens among entries l..r (1-based)."""
    _check_window(l, r, len(trace.entries))
    return screen_index(trace).distinct(l, r)
