"""Basic and anyonic ribbon operators.

The basic operator acts on the control chain y and multiplied edges x as

    F^{h,g} |y><x| : delta_{g, y_1...y_L} and x_k <- (yhat_{k-1}^{-1} h yhat_{k-1}) x_k

in the ribbon frame (frame signs invert edge values; yhat_k = y_1...y_k).
A dual loop carries no chain and acts as delta_{g,id} A^h at its vertex.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import UnsupportedRibbon
from ..groups import FiniteGroup
from ..lattice import PlanarLattice, Ribbon
from ..rep_theory import AnyonLabel
from ..sim.ops import Monomial, OperatorHandle, OperatorSum, _digit_arrays, pack_digits


def basic_ribbon_handle(G: FiniteGroup, lattice: PlanarLattice, ribbon: Ribbon,
                        h: int, g: int) -> OperatorHandle:
    """The ribbon operator F^{h,g} as a masked-permutation handle."""
    if ribbon.kind == "dual_loop":
        return _dual_loop_handle(G, lattice, ribbon, h, g)
    if ribbon.kind not in ("standard", "boundary_loop"):
        raise UnsupportedRibbon(f"no operator semantics for ribbon kind {ribbon.kind!r}")
    support = ribbon.support_edges()
    ys = {e for e, _ in ribbon.y_edges}
    xs = {xe[0] for xe in ribbon.x_edges if xe is not None}
    if ys & xs:
        raise UnsupportedRibbon("ribbon chain and multiplied edges overlap")
    pos = {e: i for i, e in enumerate(support)}
    n = G.order
    dims = (n,) * len(support)
    digits = _digit_arrays(dims)
    mul, inv = G.mul, G.inv

    # partial products yhat_k in the ribbon frame
    yhat = [np.zeros_like(digits[0])]
    for e, sign in ribbon.y_edges:
        val = digits[pos[e]]
        frame = val if sign == +1 else inv[val]
        yhat.append(mul[yhat[-1], frame])
    mask = (yhat[-1] == g)

    new_digits = [arr.copy() for arr in digits]
    for k, xe in enumerate(ribbon.x_edges):
        if xe is None:
            continue
        e, sign = xe
        m = mul[mul[inv[yhat[k]], h], yhat[k]]   # yhat_{k-1}^{-1} h yhat_{k-1}
        val = digits[pos[e]]
        if sign == +1:
            new_digits[pos[e]] = mul[m, val]
        else:
            new_digits[pos[e]] = mul[val, inv[m]]
    perm = pack_digits(new_digits, dims)
    body = Monomial(perm=perm, coeff=mask.astype(np.complex128))
    return OperatorHandle(support, dims, body,
                          name=f"F^{G.labels[h]},{G.labels[g]}")


def _dual_loop_handle(G: FiniteGroup, lattice: PlanarLattice, ribbon: Ribbon,
                      h: int, g: int) -> OperatorHandle:
    support = tuple(e for e, _ in ribbon.x_edges)
    n = G.order
    dims = (n,) * len(support)
    digits = _digit_arrays(dims)
    mul, inv = G.mul, G.inv
    new_digits = []
    for (e, orient), arr in zip(ribbon.x_edges, digits):
        if orient == -1:   # head at the loop vertex
            new_digits.append(mul[h, arr])
        else:
            new_digits.append(mul[arr, inv[h]])
    perm = pack_digits(new_digits, dims)
    coeff = None
    if g != 0:
        coeff = np.zeros(perm.size, dtype=np.complex128)
    body = Monomial(perm=perm, coeff=coeff)
    return OperatorHandle(support, dims, body,
                          name=f"Floop^{G.labels[h]},{G.labels[g]}")


def basic_ribbon_adjoint(G: FiniteGroup, lattice: PlanarLattice, ribbon: Ribbon,
                         h: int, g: int) -> OperatorHandle:
    """(F^{h,g})^dagger = F^{h^{-1}, g}."""
    return basic_ribbon_handle(G, lattice, ribbon, int(G.inv[h]), g)


def anyonic_ribbon_sum(G: FiniteGroup, lattice: PlanarLattice, ribbon: Ribbon,
                       label: AnyonLabel, u: tuple[int, int] = (1, 1),
                       v: tuple[int, int] = (1, 1)) -> OperatorSum:
    """F^{(C,pi);(u,v)} as an irrep-weighted sum of basic ribbon operators.

    u = (i, j), v = (i', j') use the paper's 1-based index ranges
    i in 1..|C|, j in 1..d_pi.
    """
    cd, pi = label.class_data, label.irrep
    i, j = u
    ip, jp = v
    if not (1 <= i <= cd.size and 1 <= ip <= cd.size):
        raise UnsupportedRibbon(f"class position out of range for |C|={cd.size}")
    if not (1 <= j <= pi.dim and 1 <= jp <= pi.dim):
        raise UnsupportedRibbon(f"irrep index out of range for d={pi.dim}")
    E = cd.centralizer
    pref = pi.dim / E.group.order
    ci_inv = int(G.inv[cd.class_elements[i - 1]])
    p_i = cd.transversal[i - 1]
    p_ip_inv = int(G.inv[cd.transversal[ip - 1]])
    terms = []
    for kc, kp in enumerate(E.to_parent):
        gamma_inv = np.conj(pi.matrices[kc].T)      # unitary: Gamma^{-1} = Gamma^dagger
        coeff = pref * gamma_inv[j - 1, jp - 1]
        if abs(coeff) < 1e-15:
            continue
        g = int(G.mul[G.mul[p_i, kp], p_ip_inv])
        terms.append((complex(coeff),
                      basic_ribbon_handle(G, lattice, ribbon, ci_inv, g)))
    return OperatorSum(tuple(terms), name=f"F^{label.name};({u},{v})")


def fxicpi_sum(G: FiniteGroup, lattice: PlanarLattice, ribbon: Ribbon,
               label: AnyonLabel) -> OperatorSum:
    """The u = v = (1,1) anyonic ribbon operator."""
    return anyonic_ribbon_sum(G, lattice, ribbon, label, (1, 1), (1, 1))


def label_change_sum(G: FiniteGroup, lattice: PlanarLattice, vertex: int,
                     label: AnyonLabel, x: int, y: int) -> OperatorSum:
    """a^{x,y} at a vertex: (d/|E|) sum_k Gamma^{-1}(k)_{x,y} A^k (1-based x,y)."""
    from .model import vertex_operator

    cd, pi = label.class_data, label.irrep
    E = cd.centralizer
    pref = pi.dim / E.group.order
    terms = []
    for kc, kp in enumerate(E.to_parent):
        gamma_inv = np.conj(pi.matrices[kc].T)
        coeff = pref * gamma_inv[x - 1, y - 1]
        if abs(coeff) < 1e-15:
            continue
        terms.append((complex(coeff), vertex_operator(G, lattice, vertex, kp)))
    return OperatorSum(tuple(terms), name=f"a^{x},{y}")
