"""Topological charge projections for closed ribbons and their direct
(Born-rule) measurement."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import IncompleteLabels, NotClosed
from ..groups import FiniteGroup
from ..lattice import PlanarLattice, Ribbon
from ..rep_theory import AnyonLabel, anyon_labels, character
from ..sim.engine import apply_general, expectation
from ..sim.ops import OperatorSum
from ..sim.register import StateVector
from .ribbons import basic_ribbon_handle


@dataclass(frozen=True)
class ChargeProjectorFamily:
    """Orthogonal projector family {K_sigma^{(C,pi)}} for a closed ribbon."""

    ribbon: Ribbon
    labels: tuple[AnyonLabel, ...]
    projectors: tuple[OperatorSum, ...]

    def projector(self, label_name: str) -> OperatorSum:
        for lab, proj in zip(self.labels, self.projectors):
            if lab.name == label_name:
                return proj
        raise IncompleteLabels(f"no label {label_name!r} in family")


def charge_projector(G: FiniteGroup, lattice: PlanarLattice, ribbon: Ribbon,
                     label: AnyonLabel) -> OperatorSum:
    """K^{(C,pi)} = (d_pi/|E|) sum_{d in E(C)} conj(chi_pi(d))
    sum_j F^{p_j d p_j^{-1}, p_j r_C p_j^{-1}}.

    The d_pi prefactor makes the family idempotent (checked in tests); a
    prefactorless variant squares to K/d_pi and is not a projector.
    """
    cd, pi = label.class_data, label.irrep
    E = cd.centralizer
    pref = pi.dim / E.group.order
    terms = []
    for dc, dp in enumerate(E.to_parent):
        chi_bar = np.conj(np.trace(pi.matrices[dc]))
        if abs(chi_bar) < 1e-15:
            continue
        for jj in range(cd.size):
            p_j = cd.transversal[jj]
            h = int(G.mul[G.mul[p_j, dp], G.inv[p_j]])
            g = cd.class_elements[jj]           # p_j r_C p_j^{-1} = c_j
            terms.append((complex(pref * chi_bar),
                          basic_ribbon_handle(G, lattice, ribbon, h, g)))
    return OperatorSum(tuple(terms), name=f"K^{label.name}")


def charge_projector_dc(G: FiniteGroup, lattice: PlanarLattice, ribbon: Ribbon,
                        cd, d_class_rep: int) -> OperatorSum:
    """Intermediate K^{(D,C)} = sum_j sum_{d in D} F^{p_j d p_j^{-1}, c_j}."""
    from ..rep_theory import conjugacy_classes

    E = cd.centralizer
    d_classes = conjugacy_classes(E.group)
    target = None
    for dcl in d_classes:
        if E.to_parent[dcl.representative] == d_class_rep or \
           d_class_rep in [E.to_parent[c] for c in dcl.class_elements]:
            target = dcl
            break
    if target is None:
        raise IncompleteLabels("representative not in centralizer")
    terms = []
    for dc in target.class_elements:
        dp = E.to_parent[dc]
        for jj in range(cd.size):
            p_j = cd.transversal[jj]
            h = int(G.mul[G.mul[p_j, dp], G.inv[p_j]])
            terms.append((1.0 + 0j, basic_ribbon_handle(
                G, lattice, ribbon, h, cd.class_elements[jj])))
    return OperatorSum(tuple(terms), name="K^(D,C)")


def charge_projectors(G: FiniteGroup, lattice: PlanarLattice,
                      ribbon: Ribbon) -> ChargeProjectorFamily:
    if not ribbon.closed:
        raise NotClosed("charge projectors need a closed ribbon")
    labels = tuple(anyon_labels(G))
    projectors = tuple(charge_projector(G, lattice, ribbon, lab) for lab in labels)
    return ChargeProjectorFamily(ribbon=ribbon, labels=labels, projectors=projectors)


def trivial_label(family: ChargeProjectorFamily) -> AnyonLabel:
    for lab in family.labels:
        if lab.class_data.representative == 0 and lab.irrep.dim == 1:
            chi = lab.irrep.matrices[:, 0, 0]
            if np.allclose(chi, 1.0):
                return lab
    raise IncompleteLabels("vacuum label missing from family")


def charge_distribution(state: StateVector,
                        family: ChargeProjectorFamily) -> dict[str, float]:
    """Born weights <psi|K|psi> for each label (projectors, so this is the
    outcome probability)."""
    out = {}
    for lab, proj in zip(family.labels, family.projectors):
        out[lab.name] = float(expectation(state, proj).real)
    return out


def charge_measure_direct(state: StateVector, family: ChargeProjectorFamily,
                          rng: np.random.Generator
                          ) -> tuple[AnyonLabel, StateVector, float]:
    """Sample a label per the Born rule and collapse with K/||K psi||."""
    dist = charge_distribution(state, family)
    names = [lab.name for lab in family.labels]
    probs = np.array([max(dist[n], 0.0) for n in names])
    probs = probs / probs.sum()
    r = rng.random()
    pick = int(np.searchsorted(np.cumsum(probs), r, side="right"))
    pick = min(pick, len(names) - 1)
    label = family.labels[pick]
    post = state.copy()
    _, nsq = apply_general(post, family.projectors[pick])
    return label, post, float(probs[pick])
