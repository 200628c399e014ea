"""Group-valued 0-forms and 1-forms on a lattice: exterior derivative,
flatness, and exactness witnesses by parallel transport."""

from __future__ import annotations

import numpy as np

from ..errors import NotExact
from ..groups import FiniteGroup
from ..lattice import PlanarLattice, SpanningTreeData, spanning_tree

ZeroForm = np.ndarray  # shape (n_vertices,), group element indices
OneForm = np.ndarray   # shape (n_edges,), group element indices


def exterior_derivative(G: FiniteGroup, lattice: PlanarLattice,
                        theta: ZeroForm) -> OneForm:
    """(d theta)(e) = theta(e+) * theta(e-)^{-1}."""
    head = np.asarray(lattice.edge_head)
    tail = np.asarray(lattice.edge_tail)
    return G.mul[theta[head], G.inv[theta[tail]]]


def plaquette_holonomy(G: FiniteGroup, lattice: PlanarLattice, omega: OneForm,
                       p: int, v: int | None = None) -> int:
    """Holonomy from corner v (defaults to the canonical corner)."""
    if v is None:
        v = lattice.plaquette_corners[p][0]
    hol = 0
    for e, sign in lattice.plaquette_walk_from(p, v):
        step = int(omega[e]) if sign == +1 else int(G.inv[omega[e]])
        hol = int(G.mul[step, hol])
    return hol


def is_flat(G: FiniteGroup, lattice: PlanarLattice, omega: OneForm) -> bool:
    return all(plaquette_holonomy(G, lattice, omega, p) == 0
               for p in range(lattice.n_plaquettes))


def path_transport(G: FiniteGroup, omega: OneForm, path, signs) -> int:
    """Compose omega along a path (later steps on the left)."""
    acc = 0
    for e, sign in zip(path, signs):
        step = int(omega[e]) if sign == +1 else int(G.inv[omega[e]])
        acc = int(G.mul[step, acc])
    return acc


def exactness_witness(G: FiniteGroup, lattice: PlanarLattice, omega: OneForm,
                      tree: SpanningTreeData | None = None) -> ZeroForm:
    """Construct theta with d(theta) = omega, or raise NotExact.

    theta(v) is the transport of omega from the root along the tree path;
    the construction succeeds exactly when omega is flat (planar connected).
    """
    if tree is None:
        tree = spanning_tree(lattice)
    theta = np.zeros(lattice.n_vertices, dtype=np.int64)
    for v in range(lattice.n_vertices):
        theta[v] = path_transport(G, omega, tree.paths[v], tree.signs[v])
    if not np.array_equal(exterior_derivative(G, lattice, theta), omega):
        raise NotExact("1-form has no potential: d(theta) != omega")
    return theta


def gauge_transform(G: FiniteGroup, lattice: PlanarLattice, omega: OneForm,
                    theta: ZeroForm) -> OneForm:
    """Delta_theta(omega)(e) = theta(e+) omega(e) theta(e-)^{-1}."""
    head = np.asarray(lattice.edge_head)
    tail = np.asarray(lattice.edge_tail)
    return G.mul[G.mul[theta[head], omega], G.inv[theta[tail]]]
