"""Planar oriented square lattices, spanning trees, and ribbon combinatorics.

Canonical orientation: horizontal edges point right, vertical edges point up.
Vertices are indexed row-major over (rows+1) x (cols+1) grid points; edges
enumerate all horizontals first, then all verticals; plaquettes are indexed
row-major over rows x cols cells.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .errors import Disconnected, InvalidRibbonSpec, InvalidSite


@dataclass(frozen=True)
class Site:
    """A site (v, p): a vertex on the boundary of a plaquette.

    ``plaquette`` may be None for ribbon endpoints on the outer face.
    """

    vertex: int
    plaquette: int | None


@dataclass(frozen=True)
class Triangle:
    """Ribbon building block: primary = (edge, plaquette), dual = (edge, vertex)."""

    kind: str  # "primary" | "dual"
    edge: int
    anchor: int  # plaquette index for primary, vertex index for dual


@dataclass(frozen=True)
class PlanarLattice:
    rows: int
    cols: int
    n_vertices: int
    n_edges: int
    n_plaquettes: int
    edge_tail: tuple[int, ...]
    edge_head: tuple[int, ...]
    # plaquette boundary walks: cyclic (edge, traversal sign) lists starting at
    # the plaquette's lower-left corner, counterclockwise in the canonical
    # orientation (right along the bottom, up, left along the top, down)
    plaquette_walks: tuple[tuple[tuple[int, int], ...], ...]
    plaquette_corners: tuple[tuple[int, ...], ...]  # ccw corner vertices, lower-left first
    vertex_star: tuple[tuple[tuple[int, int], ...], ...]  # per vertex: (edge, +1 tail/-1 head)

    def vertex_id(self, r: int, c: int) -> int:
        if not (0 <= r <= self.rows and 0 <= c <= self.cols):
            raise InvalidSite(f"vertex ({r},{c}) out of range")
        return r * (self.cols + 1) + c

    def vertex_coords(self, v: int) -> tuple[int, int]:
        return divmod(v, self.cols + 1)

    def h_edge(self, r: int, c: int) -> int:
        """Horizontal edge (r,c) -> (r,c+1)."""
        if not (0 <= r <= self.rows and 0 <= c < self.cols):
            raise InvalidSite(f"horizontal edge ({r},{c}) out of range")
        return r * self.cols + c

    def v_edge(self, r: int, c: int) -> int:
        """Vertical edge (r,c) -> (r+1,c)."""
        if not (0 <= r < self.rows and 0 <= c <= self.cols):
            raise InvalidSite(f"vertical edge ({r},{c}) out of range")
        return (self.rows + 1) * self.cols + r * (self.cols + 1) + c

    def plaquette_id(self, r: int, c: int) -> int:
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise InvalidSite(f"plaquette ({r},{c}) out of range")
        return r * self.cols + c

    def plaquette_coords(self, p: int) -> tuple[int, int]:
        return divmod(p, self.cols)

    def edges(self) -> Iterator[int]:
        return iter(range(self.n_edges))

    def plaquette_walk_from(self, p: int, v: int) -> tuple[tuple[int, int], ...]:
        """The boundary walk of p rotated to start at corner vertex v."""
        corners = self.plaquette_corners[p]
        if v not in corners:
            raise InvalidSite(f"vertex {v} is not a corner of plaquette {p}")
        k = corners.index(v)
        walk = self.plaquette_walks[p]
        return walk[k:] + walk[:k]

    def site(self, v: int, p: int | None) -> Site:
        if p is not None and v not in self.plaquette_corners[p]:
            raise InvalidSite(f"vertex {v} not on plaquette {p}")
        return Site(vertex=v, plaquette=p)


def square_lattice(rows: int, cols: int) -> PlanarLattice:
    """Square lattice with smooth boundaries: (rows+1)(cols+1) vertices,
    rows*(cols+1) + (rows+1)*cols edges, rows*cols plaquettes."""
    if rows < 1 or cols < 1:
        raise InvalidSite("rows and cols must be >= 1")
    n_vertices = (rows + 1) * (cols + 1)
    tails, heads = [], []
    for r in range(rows + 1):
        for c in range(cols):
            tails.append(r * (cols + 1) + c)
            heads.append(r * (cols + 1) + c + 1)
    for r in range(rows):
        for c in range(cols + 1):
            tails.append(r * (cols + 1) + c)
            heads.append((r + 1) * (cols + 1) + c)
    n_edges = len(tails)

    def h_edge(r, c):
        return r * cols + c

    def v_edge(r, c):
        return (rows + 1) * cols + r * (cols + 1) + c

    walks, corners = [], []
    for r in range(rows):
        for c in range(cols):
            # ccw from the lower-left corner: bottom ->, right ^, top <-, left v
            walks.append((
                (h_edge(r, c), +1),
                (v_edge(r, c + 1), +1),
                (h_edge(r + 1, c), -1),
                (v_edge(r, c), -1),
            ))
            corners.append((
                r * (cols + 1) + c,
                r * (cols + 1) + c + 1,
                (r + 1) * (cols + 1) + c + 1,
                (r + 1) * (cols + 1) + c,
            ))
    star: list[list[tuple[int, int]]] = [[] for _ in range(n_vertices)]
    for e in range(n_edges):
        star[tails[e]].append((e, +1))
        star[heads[e]].append((e, -1))
    return PlanarLattice(
        rows=rows, cols=cols, n_vertices=n_vertices, n_edges=n_edges,
        n_plaquettes=rows * cols, edge_tail=tuple(tails), edge_head=tuple(heads),
        plaquette_walks=tuple(walks), plaquette_corners=tuple(corners),
        vertex_star=tuple(tuple(s) for s in star))


@dataclass(frozen=True)
class SpanningTreeData:
    """BFS tree from a root: per-vertex root paths with orientation signs."""

    root: int
    paths: tuple[tuple[int, ...], ...]   # per vertex: edge list root -> v
    signs: tuple[tuple[int, ...], ...]   # matching +-1 per path edge
    parent_edge: tuple[int, ...]         # tree edge to parent, -1 at root

    def sigma(self, v: int, e: int) -> int:
        """+1/-1 if e lies on the root->v path (with/against traversal), else 0."""
        path = self.paths[v]
        if e in path:
            return self.signs[v][path.index(e)]
        return 0


def spanning_tree(lattice: PlanarLattice, root: int = 0) -> SpanningTreeData:
    n = lattice.n_vertices
    paths: list[tuple[int, ...] | None] = [None] * n
    signs: list[tuple[int, ...] | None] = [None] * n
    parent_edge = [-1] * n
    paths[root] = ()
    signs[root] = ()
    frontier = [root]
    while frontier:
        nxt = []
        for v in frontier:
            for e, orient in lattice.vertex_star[v]:
                w = lattice.edge_head[e] if orient == +1 else lattice.edge_tail[e]
                if paths[w] is None:
                    paths[w] = paths[v] + (e,)
                    signs[w] = signs[v] + (orient,)
                    parent_edge[w] = e
                    nxt.append(w)
        frontier = nxt
    if any(p is None for p in paths):
        raise Disconnected("lattice graph is not connected")
    return SpanningTreeData(root=root, paths=tuple(paths), signs=tuple(signs),
                            parent_edge=tuple(parent_edge))


@dataclass(frozen=True)
class Ribbon:
    """A ribbon as its operator data: control-chain edges and multiplied edges.

    ``y_edges[k] = (edge, sign)``: the k-th control-chain edge, sign +1 when
    the edge orientation agrees with the ribbon frame. ``x_edges[k]`` is the
    edge multiplied at step k (or None where the lattice boundary truncates
    it), with its own frame sign. ``kind`` is one of "standard", "dual_loop",
    "boundary_loop".
    """

    kind: str
    s0: Site
    s1: Site
    y_edges: tuple[tuple[int, int], ...]
    x_edges: tuple[tuple[int, int] | None, ...]
    closed: bool
    triangles: tuple[Triangle, ...] = field(default=())

    @property
    def length(self) -> int:
        return len(self.y_edges)

    def support_edges(self) -> tuple[int, ...]:
        seen: list[int] = []
        for e, _ in self.y_edges:
            if e not in seen:
                seen.append(e)
        for xe in self.x_edges:
            if xe is not None and xe[0] not in seen:
                seen.append(xe[0])
        return tuple(seen)


def _validate_chain(lattice: PlanarLattice, ribbon: Ribbon) -> None:
    """Contiguity: chain frames point backward, frame-head at the earlier vertex."""
    if not ribbon.y_edges:
        return
    v = ribbon.s0.vertex
    for e, sign in ribbon.y_edges:
        # frame head must sit at the current vertex, frame tail advances
        fhead = lattice.edge_head[e] if sign == +1 else lattice.edge_tail[e]
        ftail = lattice.edge_tail[e] if sign == +1 else lattice.edge_head[e]
        if fhead != v:
            raise InvalidRibbonSpec(f"edge {e} does not continue the chain at {v}")
        v = ftail
    if ribbon.closed and v != ribbon.s0.vertex:
        raise InvalidRibbonSpec("closed ribbon does not return to its start")
    if not ribbon.closed:
        if v != ribbon.s1.vertex:
            raise InvalidRibbonSpec("open ribbon does not end at s1")
        if ribbon.s0.vertex == ribbon.s1.vertex:
            raise InvalidRibbonSpec("open ribbon must have distinct endpoints")


def standard_open_ribbon(lattice: PlanarLattice, row: int,
                         col_start: int, col_end: int) -> Ribbon:
    """Horizontal open ribbon along vertex row ``row`` from col_start to col_end.

    The control chain runs along the row's horizontal edges; the multiplied
    edges are the vertical edges hanging above each chain vertex (the edges
    crossed by the accompanying dual path through plaquette row ``row``).
    """
    if not (0 <= row < lattice.rows):
        raise InvalidRibbonSpec("ribbon row must have a plaquette row above it")
    if not (0 <= col_start < col_end <= lattice.cols):
        raise InvalidRibbonSpec(
            f"need 0 <= col_start < col_end <= {lattice.cols}")
    L = col_end - col_start
    # frames point backward along the path (sign -1 flips the edge value);
    # multiplied edges hang above each chain vertex with frames pointing in
    ys = tuple((lattice.h_edge(row, c), -1) for c in range(col_start, col_end))
    xs = tuple((lattice.v_edge(row, c), -1) for c in range(col_start, col_end))
    tris = []
    for k in range(L):
        tris.append(Triangle("dual", xs[k][0], lattice.vertex_id(row, col_start + k)))
        tris.append(Triangle("primary", ys[k][0], lattice.plaquette_id(row, col_start + k)))
    p0 = lattice.plaquette_id(row, col_start - 1) if col_start >= 1 else None
    p1 = lattice.plaquette_id(row, col_end - 1)
    ribbon = Ribbon(
        kind="standard",
        s0=Site(lattice.vertex_id(row, col_start), p0),
        s1=Site(lattice.vertex_id(row, col_end), p1),
        y_edges=ys, x_edges=xs, closed=False, triangles=tuple(tris))
    _validate_chain(lattice, ribbon)
    return ribbon


def closed_dual_loop(lattice: PlanarLattice, v: int) -> Ribbon:
    """Smallest closed dual ribbon enclosing the single vertex v.

    Carries no control chain; the multiplied edges are exactly the edges
    incident to v, with signs following the vertex-operator convention.
    """
    if not (0 <= v < lattice.n_vertices):
        raise InvalidRibbonSpec(f"vertex {v} out of range")
    xs = tuple((e, sign) for e, sign in lattice.vertex_star[v])
    tris = tuple(Triangle("dual", e, v) for e, _ in xs)
    r, c = lattice.vertex_coords(v)
    p = None
    if r < lattice.rows and c < lattice.cols:
        p = lattice.plaquette_id(r, c)
    elif r < lattice.rows and c > 0:
        p = lattice.plaquette_id(r, c - 1)
    elif r > 0 and c < lattice.cols:
        p = lattice.plaquette_id(r - 1, c)
    else:
        p = lattice.plaquette_id(max(r - 1, 0), max(c - 1, 0))
    site = Site(vertex=v, plaquette=p)
    return Ribbon(kind="dual_loop", s0=site, s1=site,
                  y_edges=(), x_edges=xs, closed=True, triangles=tris)


def closed_plaquette_loop(lattice: PlanarLattice, p: int, base_vertex: int | None = None) -> Ribbon:
    """Pure-primary closed ribbon around one plaquette (the B-operator ribbon).

    No multiplied edges; the chain is the plaquette walk from the base corner
    with backward frames, so the chain word equals the holonomy.
    """
    if not (0 <= p < lattice.n_plaquettes):
        raise InvalidRibbonSpec(f"plaquette {p} out of range")
    v = base_vertex if base_vertex is not None else lattice.plaquette_corners[p][0]
    walk = lattice.plaquette_walk_from(p, v)
    # reversed walk with backward frames: the chain word equals the holonomy
    ys = tuple((e, sign) for e, sign in reversed(walk))
    tris = tuple(Triangle("primary", e, p) for e, _ in walk)
    site = Site(vertex=v, plaquette=p)
    ribbon = Ribbon(kind="standard", s0=site, s1=site, y_edges=ys,
                    x_edges=(None,) * len(ys), closed=True, triangles=tris)
    _validate_chain(lattice, ribbon)
    return ribbon


def closed_region_boundary(lattice: PlanarLattice, rect: tuple[int, int, int, int]) -> Ribbon:
    """Closed ribbon around the plaquette rectangle (row0, col0, height, width).

    The control chain follows the rectangle's vertex ring counterclockwise
    from its lower-left corner; multiplied edges hang outward from each ring
    vertex (None where the lattice boundary truncates them).
    """
    r0, c0, h, w = rect
    if h < 1 or w < 1 or r0 < 0 or c0 < 0 or r0 + h > lattice.rows or c0 + w > lattice.cols:
        raise InvalidRibbonSpec(f"rectangle {rect} not inside the lattice")
    ring: list[int] = []
    for c in range(c0, c0 + w):
        ring.append(lattice.vertex_id(r0, c))
    for r in range(r0, r0 + h):
        ring.append(lattice.vertex_id(r, c0 + w))
    for c in range(c0 + w, c0, -1):
        ring.append(lattice.vertex_id(r0 + h, c))
    for r in range(r0 + h, r0, -1):
        ring.append(lattice.vertex_id(r, c0))
    L = len(ring)
    ys, xs, tris = [], [], []
    for k in range(L):
        a, b = ring[k], ring[(k + 1) % L]
        ra, ca = lattice.vertex_coords(a)
        rb, cb = lattice.vertex_coords(b)
        if ra == rb:  # horizontal step; frame points back toward ring[k]
            e = lattice.h_edge(ra, min(ca, cb))
            sign = -1 if cb > ca else +1
        else:
            e = lattice.v_edge(min(ra, rb), ca)
            sign = -1 if rb > ra else +1
        ys.append((e, sign))
        tris.append(Triangle("primary", e, -1))
        xs.append(_outward_edge(lattice, ring[k], rect))
        if xs[-1] is not None:
            tris.append(Triangle("dual", xs[-1][0], ring[k]))
    p0 = lattice.plaquette_id(r0, c0)
    site = Site(vertex=ring[0], plaquette=p0)
    ribbon = Ribbon(kind="boundary_loop", s0=site, s1=site,
                    y_edges=tuple(ys), x_edges=tuple(xs),
                    closed=True, triangles=tuple(tris))
    _validate_chain(lattice, ribbon)
    return ribbon


def _outward_edge(lattice: PlanarLattice, v: int,
                  rect: tuple[int, int, int, int]) -> tuple[int, int] | None:
    """The edge pointing away from the rectangle at a ring vertex, if any.

    Corners prefer the edge continuing the incoming ring direction
    (deterministic choice: down, right, up, left priority by ring side).
    """
    r0, c0, h, w = rect
    r, c = lattice.vertex_coords(v)
    # frames point inward (frame head at the ring vertex)
    candidates: list[tuple[int, int]] = []
    if r == r0 and r > 0:
        candidates.append((lattice.v_edge(r - 1, c), +1))       # hangs below
    if c == c0 + w and c < lattice.cols:
        candidates.append((lattice.h_edge(r, c), -1))           # hangs right
    if r == r0 + h and r < lattice.rows:
        candidates.append((lattice.v_edge(r, c), -1))           # hangs above
    if c == c0 and c > 0:
        candidates.append((lattice.h_edge(r, c - 1), +1))       # hangs left
    return candidates[0] if candidates else None
