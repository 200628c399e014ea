"""Site operators of the quantum double model on a lattice edge register.

Conventions (pinned by the algebraic test suite, not by figures):
  - Every edge carries a |G|-dim qudit; site index = edge index.
  - A^g at a vertex v left-multiplies edges whose head is at v and
    right-multiplies by g^{-1} edges whose tail is at v. This is the gauge
    action |omega> -> |Delta(omega)> that permutes exact forms.
  - The holonomy of a plaquette from a corner vertex composes edge values
    along the counterclockwise walk with later steps multiplied on the left,
    so exact forms have trivial holonomy.
"""

from __future__ import annotations

import numpy as np

from ..errors import InvalidSite
from ..groups import FiniteGroup
from ..lattice import PlanarLattice, Site
from ..sim.ops import (Monomial, OperatorHandle, OperatorSum, _digit_arrays,
                       diagonal, pack_digits)
from ..sim.register import QuditRegister, StateVector


def edge_register(G: FiniteGroup, lattice: PlanarLattice, cap: int | None = None) -> QuditRegister:
    return QuditRegister(dims=[G.order] * lattice.n_edges,
                         roles=["edge"] * lattice.n_edges, cap=cap)


def trivial_form_state(G: FiniteGroup, lattice: PlanarLattice) -> StateVector:
    return StateVector.basis_state(edge_register(G, lattice), 0)


def vertex_operator(G: FiniteGroup, lattice: PlanarLattice, v: int, g: int,
                    name: str | None = None) -> OperatorHandle:
    """A^g at vertex v (acts on all incident edges)."""
    star = lattice.vertex_star[v]
    support = tuple(e for e, _ in star)
    dims = (G.order,) * len(support)
    mul, inv = G.mul, G.inv

    def fn(digits):
        out = []
        for (e, orient), arr in zip(star, digits):
            if orient == -1:      # head at v: x -> g x
                out.append(mul[g, arr])
            else:                 # tail at v: x -> x g^{-1}
                out.append(mul[arr, inv[g]])
        return out, None

    from ..sim.ops import monomial_from_maps

    body = monomial_from_maps(dims, lambda d: fn(d))
    return OperatorHandle(support, dims, body, name=name or f"A^{G.labels[g]}_v{v}")


def vertex_projector(G: FiniteGroup, lattice: PlanarLattice, v: int) -> OperatorSum:
    """A_v = (1/|G|) sum_g A^g_v."""
    terms = tuple((1.0 / G.order, vertex_operator(G, lattice, v, g))
                  for g in G.elements())
    return OperatorSum(terms, name=f"A_v{v}")


def holonomy_array(G: FiniteGroup, lattice: PlanarLattice, p: int, v: int,
                   digits: list[np.ndarray], support: tuple[int, ...]) -> np.ndarray:
    """Holonomy of plaquette p from corner v over block digit arrays.

    ``digits[i]`` holds the group value of edge ``support[i]`` per block index.
    """
    pos = {e: i for i, e in enumerate(support)}
    mul, inv = G.mul, G.inv
    hol = np.zeros_like(digits[0])
    for e, sign in lattice.plaquette_walk_from(p, v):
        val = digits[pos[e]]
        step = val if sign == +1 else inv[val]
        hol = mul[step, hol]     # later steps multiply on the left
    return hol


def plaquette_operator(G: FiniteGroup, lattice: PlanarLattice, site: Site,
                       h: int) -> OperatorHandle:
    """B^h at a site (v, p): projector onto holonomy-from-v equal to h."""
    if site.plaquette is None:
        raise InvalidSite("plaquette operator needs a real plaquette")
    p, v = site.plaquette, site.vertex
    support = tuple(e for e, _ in lattice.plaquette_walks[p])
    dims = (G.order,) * len(support)
    digits = _digit_arrays(dims)
    hol = holonomy_array(G, lattice, p, v, digits, support)
    coeff = (hol == h).astype(np.complex128)
    return diagonal(support, dims, coeff, name=f"B^{G.labels[h]}_({v},{p})")


def plaquette_projector(G: FiniteGroup, lattice: PlanarLattice, p: int) -> OperatorHandle:
    """B_p = B^{id} based at the plaquette's first corner (base irrelevant for id)."""
    v = lattice.plaquette_corners[p][0]
    return plaquette_operator(G, lattice, Site(vertex=v, plaquette=p), 0)


def site_operator(G: FiniteGroup, lattice: PlanarLattice, kind: str, *,
                  site: Site | None = None, vertex: int | None = None,
                  plaquette: int | None = None, element: int = 0):
    """Uniform constructor matching the model's operator families.

    kind: 'A' (needs vertex or site, element), 'B' (needs site, element),
    'A_proj' (vertex), 'B_proj' (plaquette).
    """
    if kind == "A":
        v = vertex if vertex is not None else site.vertex
        return vertex_operator(G, lattice, v, element)
    if kind == "B":
        if site is None:
            raise InvalidSite("B^h needs a site (v, p)")
        return plaquette_operator(G, lattice, site, element)
    if kind == "A_proj":
        v = vertex if vertex is not None else site.vertex
        return vertex_projector(G, lattice, v)
    if kind == "B_proj":
        p = plaquette if plaquette is not None else site.plaquette
        return plaquette_projector(G, lattice, p)
    raise InvalidSite(f"unknown site operator kind {kind!r}")


def edge_digit_arrays(G: FiniteGroup, support: tuple[int, ...]) -> list[np.ndarray]:
    return _digit_arrays((G.order,) * len(support))


def pack_support(G: FiniteGroup, digits, support) -> np.ndarray:
    return pack_digits(digits, (G.order,) * len(support))
