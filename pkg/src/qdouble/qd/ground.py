"""Brute-force ground-state oracle and Hamiltonian/ground-space checks."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import TooLarge
from ..groups import FiniteGroup
from ..lattice import PlanarLattice, spanning_tree
from ..sim.engine import apply_general, expectation
from ..sim.register import StateVector, amplitude_cap
from . import forms
from .model import edge_register, plaquette_projector, vertex_projector

ENUM_CAP = 1 << 24


def _all_zero_forms(G: FiniteGroup, lattice: PlanarLattice) -> np.ndarray:
    """(|G|^V, V) array of all 0-forms (may be large; capped)."""
    nV = lattice.n_vertices
    count = G.order ** nV
    if count > ENUM_CAP:
        raise TooLarge(f"enumerating {count} zero-forms exceeds cap {ENUM_CAP}")
    idx = np.arange(count)
    cols = []
    for v in range(nV):
        stride = G.order ** (nV - 1 - v)
        cols.append((idx // stride) % G.order)
    return np.stack(cols, axis=1)


def ground_state_oracle(G: FiniteGroup, lattice: PlanarLattice) -> StateVector:
    """Uniform superposition of all exact 1-forms |d theta> (duplicates collapsed)."""
    reg = edge_register(G, lattice)
    if reg.total_dim > amplitude_cap():
        raise TooLarge("edge register exceeds the amplitude cap")
    thetas = _all_zero_forms(G, lattice)
    head = np.asarray(lattice.edge_head)
    tail = np.asarray(lattice.edge_tail)
    # d theta per edge, all thetas at once
    omegas = G.mul[thetas[:, head], G.inv[thetas[:, tail]]]
    indices = np.zeros(len(omegas), dtype=np.int64)
    for col in range(omegas.shape[1]):
        indices = indices * G.order + omegas[:, col]
    distinct = np.unique(indices)
    amps = np.zeros(reg.total_dim, dtype=np.complex128)
    amps[distinct] = 1.0 / math.sqrt(len(distinct))
    return StateVector(register=reg, amplitudes=amps)


@dataclass
class HamiltonianReport:
    ground_projector_trace: float
    oracle_energy: float
    expected_energy: float
    oracle_is_eigenstate: bool
    max_stabilizer_violation: float
    n_flat: int
    flats_all_exact: bool

    @property
    def passed(self) -> bool:
        return (abs(self.ground_projector_trace - 1.0) < 1e-9
                and abs(self.oracle_energy - self.expected_energy) < 1e-9
                and self.oracle_is_eigenstate and self.flats_all_exact)


def enumerate_flat_forms(G: FiniteGroup, lattice: PlanarLattice) -> np.ndarray:
    """All flat 1-forms as basis indices of the edge register (vectorized)."""
    reg = edge_register(G, lattice)
    B = reg.total_dim
    if B > ENUM_CAP:
        raise TooLarge(f"enumerating {B} edge configurations exceeds cap {ENUM_CAP}")
    idx = np.arange(B)
    digits = []
    for e in range(lattice.n_edges):
        stride = G.order ** (lattice.n_edges - 1 - e)
        digits.append((idx // stride) % G.order)
    mask = np.ones(B, dtype=bool)
    for p in range(lattice.n_plaquettes):
        v = lattice.plaquette_corners[p][0]
        hol = np.zeros(B, dtype=np.int64)
        for e, sign in lattice.plaquette_walk_from(p, v):
            step = digits[e] if sign == +1 else G.inv[digits[e]]
            hol = G.mul[step, hol]
        mask &= hol == 0
    return idx[mask]


def _gauge_stabilizer_order(G: FiniteGroup, lattice: PlanarLattice,
                            omega: np.ndarray) -> int:
    """|{theta : Delta_theta(omega) = omega}| by root-value propagation."""
    tree = spanning_tree(lattice)
    count = 0
    for g0 in G.elements():
        theta = np.full(lattice.n_vertices, -1, dtype=np.int64)
        theta[tree.root] = g0
        order = sorted(range(lattice.n_vertices), key=lambda v: len(tree.paths[v]))
        ok = True
        for v in order:
            if v == tree.root:
                continue
            e = tree.parent_edge[v]
            tail, head = lattice.edge_tail[e], lattice.edge_head[e]
            # fixed-point condition theta(head) omega(e) theta(tail)^{-1} = omega(e)
            if theta[head] == -1:
                theta[head] = int(G.mul[G.mul[omega[e], theta[tail]], G.inv[omega[e]]])
            else:
                theta[tail] = int(G.mul[G.mul[G.inv[omega[e]], theta[head]], omega[e]])
        check = forms.gauge_transform(G, lattice, omega, theta)
        if np.array_equal(check, omega):
            count += 1
        del ok
    return count


def hamiltonian_checks(G: FiniteGroup, lattice: PlanarLattice) -> HamiltonianReport:
    """Ground-space dimension, oracle energy, and flat=exact verification.

    The trace of the full stabilizer projector Prod A_v Prod B_p equals
    sum over flat omega of |Stab_gauge(omega)| / |G|^V, computed exactly.
    """
    psi = ground_state_oracle(G, lattice)
    flats = enumerate_flat_forms(G, lattice)
    strides = [G.order ** (lattice.n_edges - 1 - e) for e in range(lattice.n_edges)]
    total = 0.0
    exact_ok = True
    for index in flats:
        omega = np.array([(index // s) % G.order for s in strides], dtype=np.int64)
        total += _gauge_stabilizer_order(G, lattice, omega)
        try:
            forms.exactness_witness(G, lattice, omega)
        except Exception:
            exact_ok = False
    trace = total / (G.order ** lattice.n_vertices)

    energy = 0.0
    worst = 0.0
    for v in range(lattice.n_vertices):
        val = expectation(psi, vertex_projector(G, lattice, v)).real
        energy -= val
        worst = max(worst, abs(val - 1.0))
    for p in range(lattice.n_plaquettes):
        val = expectation(psi, plaquette_projector(G, lattice, p)).real
        energy -= val
        worst = max(worst, abs(val - 1.0))
    # eigenstate check: applying each projector must return the same state
    eig = True
    for v in range(lattice.n_vertices):
        work = psi.copy()
        _, nsq = apply_general(work, vertex_projector(G, lattice, v))
        if abs(nsq - 1.0) > 1e-9 or psi.fidelity(work) < 1 - 1e-9:
            eig = False
    for p in range(lattice.n_plaquettes):
        work = psi.copy()
        _, nsq = apply_general(work, plaquette_projector(G, lattice, p))
        if abs(nsq - 1.0) > 1e-9 or psi.fidelity(work) < 1 - 1e-9:
            eig = False
    expected = -(lattice.n_vertices + lattice.n_plaquettes)
    return HamiltonianReport(
        ground_projector_trace=trace,
        oracle_energy=energy,
        expected_energy=expected,
        oracle_is_eigenstate=eig,
        max_stabilizer_violation=worst,
        n_flat=len(flats),
        flats_all_exact=exact_ok,
    )
