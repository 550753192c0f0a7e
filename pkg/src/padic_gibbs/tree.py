"""Geometry of the rooted regular tree where each vertex has k+1 neighbors.

Vertices are addressed by child-index paths: the root is the empty tuple,
its children carry indices 1..k+1 and every deeper child 1..k.  A finite
slice holds the vertices within a given distance of the root, grouped into
level sets, together with the parent-to-child edges.  Slices are immutable
and safe for shared concurrent reads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .padic import ConfigurationError, ResourceLimitError

Address = tuple[int, ...]

ROOT: Address = ()

DEFAULT_VERTEX_CAP = 20_000


class TreeGeometryError(ConfigurationError):
    """Addresses that do not fit the requested tree structure."""


def format_address(addr: Address) -> str:
    if not addr:
        return "/"
    return "/" + "/".join(str(i) for i in addr)


def parse_address(text: str) -> Address:
    if text in ("/", ""):
        return ROOT
    parts = text.strip("/").split("/")
    try:
        addr = tuple(int(p) for p in parts)
    except ValueError:
        raise TreeGeometryError(f"malformed address {text!r}") from None
    if any(i < 1 for i in addr):
        raise TreeGeometryError(f"child indices start at 1: {text!r}")
    return addr


def validate_address(addr: Address, order: int) -> None:
    if not addr:
        return
    if not 1 <= addr[0] <= order + 1:
        raise TreeGeometryError(f"root child index {addr[0]} outside 1..{order + 1}")
    for i in addr[1:]:
        if not 1 <= i <= order:
            raise TreeGeometryError(f"child index {i} outside 1..{order}")


def vertex_count(order: int, depth: int) -> int:
    """Closed-form size of the ball of the given radius around the root."""
    if depth == 0:
        return 1
    if order == 1:
        return 1 + 2 * depth
    return 1 + (order + 1) * (order**depth - 1) // (order - 1)


@dataclass(frozen=True)
class TreeSlice:
    """All vertices within distance `depth` of the root, by level."""

    order: int
    depth: int
    levels: tuple[tuple[Address, ...], ...]
    vertices: tuple[Address, ...]
    edges: tuple[tuple[Address, Address], ...]   # (parent, child), by child level
    index: dict[Address, int] = field(repr=False)

    def level(self, n: int) -> tuple[Address, ...]:
        return self.levels[n]

    def vertex_count_to(self, depth: int) -> int:
        return sum(len(self.levels[m]) for m in range(depth + 1))

    def edges_to(self, depth: int) -> tuple[tuple[Address, Address], ...]:
        # edges are generated level by level, so a prefix is a sub-ball
        return self.edges[: self.vertex_count_to(depth) - 1]

    def parent_of(self, addr: Address) -> Address:
        if not addr:
            raise TreeGeometryError("the root has no parent")
        return addr[:-1]

    def contains(self, addr: Address) -> bool:
        return addr in self.index


def build_slice(order: int, depth: int,
                vertex_cap: int = DEFAULT_VERTEX_CAP) -> TreeSlice:
    if order < 1:
        raise ConfigurationError(f"tree order must be >= 1, got {order}")
    if depth < 0:
        raise ConfigurationError(f"depth must be >= 0, got {depth}")
    total = vertex_count(order, depth)
    if total > vertex_cap:
        raise ResourceLimitError(
            f"slice would hold {total} vertices, above the cap {vertex_cap}"
        )
    levels: list[tuple[Address, ...]] = [(ROOT,)]
    for m in range(1, depth + 1):
        if m == 1:
            levels.append(tuple((i,) for i in range(1, order + 2)))
        else:
            levels.append(tuple(v + (i,)
                                for v in levels[m - 1]
                                for i in range(1, order + 1)))
    vertices = tuple(v for lvl in levels for v in lvl)
    index = {v: i for i, v in enumerate(vertices)}
    edges = tuple((v[:-1], v) for lvl in levels[1:] for v in lvl)
    return TreeSlice(order, depth, tuple(levels), vertices, edges, index)


def direct_successors(addr: Address, slice_: TreeSlice) -> list[Address]:
    """Children of a vertex one level further from the root.

    A vertex on the outermost level has no successors inside the slice and
    yields the empty list.
    """
    if addr not in slice_.index:
        raise TreeGeometryError(f"{format_address(addr)} is not in the slice")
    if len(addr) >= slice_.depth:
        return []
    if not addr:
        return [(i,) for i in range(1, slice_.order + 2)]
    return [addr + (i,) for i in range(1, slice_.order + 1)]


def distance(x: Address, y: Address) -> int:
    """Tree metric: path length through the deepest common ancestor."""
    lcp = 0
    for a, b in zip(x, y):
        if a != b:
            break
        lcp += 1
    return len(x) + len(y) - 2 * lcp


def default_path_window(n: int) -> list[Address]:
    """A window of 2n+1 vertices along the doubly infinite geodesic through
    the root that descends via child 1 under root children 1 and 2."""
    if n < 0:
        raise ConfigurationError("window half-length must be >= 0")
    left = [(1,) + (1,) * (m - 1) for m in range(n, 0, -1)]
    right = [(2,) + (1,) * (m - 1) for m in range(1, n + 1)]
    return left + [ROOT] + right
