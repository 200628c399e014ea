"""Adaptive constant-depth Z_d Clifford gadgets: stabilizer resource states,
gate teleportation, and the partial-sum / successive-difference / multitarget
controlled-X family."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from ..errors import TooLarge
from ..sim.circuit import CircuitBuilder
from ..sim.ops import OperatorHandle, dense, diagonal
from .paulis import (PauliFrame, bell_basis, cx_add, fourier_gate,
                     fourier_matrix, negate_gate, omega, pauli_gate, x_gate,
                     z_gate)

GADGET_DIM_CAP = 12


def clifford_gate_list(kind: str, n: int) -> list[tuple[str, int, int]]:
    """The defining 2-qudit circuit of U (partial sums) or Delta, as
    (gate, local_a, local_b) applied first-to-last on wires 0..n-1."""
    if kind == "U":
        return [("cx", k, k + 1) for k in range(n - 1)]
    if kind == "Delta":
        return [("cxdg", k, k + 1) for k in range(n - 2, -1, -1)]
    raise TooLarge(f"unknown Clifford gadget kind {kind!r}")


def emit_direct(builder: CircuitBuilder, kind: str, sites: Sequence[int], d: int) -> None:
    """Sequential 2-qudit realization (linear depth; used as oracle/baseline)."""
    for gate, a, b in clifford_gate_list(kind, len(sites)):
        power = +1 if gate == "cx" else -1
        builder.unitary(cx_add(sites[a], sites[b], d, power), tag=f"{kind}-direct")


def _measure_diagonal_pauli(builder: CircuitBuilder, sites: Sequence[int], d: int,
                            exponents: Sequence[int], key: str) -> None:
    """Measure the diagonal operator prod Z_site^{exp}: outcome r with
    eigenvalue omega^r, labels r = sum exp*j mod d."""
    block = d ** len(sites)
    idx = np.arange(block)
    label = np.zeros(block, dtype=np.int64)
    for pos, exp in enumerate(exponents):
        stride = d ** (len(sites) - 1 - pos)
        label = (label + exp * ((idx // stride) % d)) % d
    builder.measure_basis(sites, key, basis=None, labels=[int(v) for v in label])


def _measure_x_pauli(builder: CircuitBuilder, sites: Sequence[int], d: int,
                     exponents: Sequence[int], key: str) -> None:
    """Measure prod X_site^{exp} (eigenvalue omega^r): rotate each site by
    F^dagger; X-eigenvector F|m> has eigenvalue omega^{-m}."""
    F = fourier_matrix(d)
    block = d ** len(sites)
    idx = np.arange(block)
    label = np.zeros(block, dtype=np.int64)
    for pos, exp in enumerate(exponents):
        stride = d ** (len(sites) - 1 - pos)
        label = (label - exp * ((idx // stride) % d)) % d
    builder.measure_basis(sites, key, basis=[F] * len(sites),
                          labels=[int(v) for v in label])


def _resource_stabilizer_spec(kind: str, n: int):
    """Stabilizer measurements for |Phi_U> / |Phi_Delta| resource prep.

    Returns (init, measurements, correction) where measurements are
    (pauli_type, [(slot, exp), ...]) with slots 'a k' / 'b k', and the
    correction Pauli type applied to A_k with exponent +outcome.
    """
    if kind == "U":
        meas = [("Z", [("a", 0, -1), ("b", 0, +1)])]
        for k in range(1, n):
            meas.append(("Z", [("a", k, -1), ("b", k - 1, -1), ("b", k, +1)]))
        return "plus", meas, "X"
    if kind == "Delta":
        meas = []
        for k in range(n - 1):
            meas.append(("X", [("a", k, +1), ("b", k, +1), ("b", k + 1, -1)]))
        meas.append(("X", [("a", n - 1, +1), ("b", n - 1, +1)]))
        return "zero", meas, "Z"
    raise TooLarge(f"unknown resource kind {kind!r}")


def resource_stabilizer_handles(kind: str, d: int, a_sites: Sequence[int],
                                b_sites: Sequence[int]) -> list[OperatorHandle]:
    """The full generator list as explicit handles (for resource-state tests)."""
    n = len(a_sites)
    init, meas, _ = _resource_stabilizer_spec(kind, n)
    del init
    out = []
    site_of = {("a", k): a_sites[k] for k in range(n)}
    site_of.update({("b", k): b_sites[k] for k in range(n)})
    # measured generators
    for ptype, terms in meas:
        op = None
        for slot, k, exp in terms:
            g = (z_gate if ptype == "Z" else x_gate)(site_of[slot, k], d, exp)
            op = g if op is None else _compose_disjoint(op, g)
        out.append(op)
    # the complementary family that the initial state already satisfies
    if kind == "U":
        for k in range(n):
            op = x_gate(a_sites[k], d, +1)
            for ell in range(k, n):
                op = _compose_disjoint(op, x_gate(b_sites[ell], d, +1))
            out.append(op)
    else:
        # Delta Z_{B_k} Delta^dagger = Z_{B_1}..Z_{B_k} (inclusive)
        for k in range(n):
            op = z_gate(a_sites[k], d, -1)
            for ell in range(k + 1):
                op = _compose_disjoint(op, z_gate(b_sites[ell], d, +1))
            out.append(op)
    return out


def _compose_disjoint(a: OperatorHandle, b: OperatorHandle) -> OperatorHandle:
    """Tensor two handles with disjoint supports into one handle."""
    from ..sim.ops import Monomial, pack_digits, _digit_arrays

    support = a.support + b.support
    dims = a.dims + b.dims
    Ma, Mb = a.body, b.body
    Ba = math.prod(a.dims)
    Bb = math.prod(b.dims)
    idx = np.arange(Ba * Bb)
    ia, ib = idx // Bb, idx % Bb
    perm = Ma.perm[ia] * Bb + Mb.perm[ib]
    coeff = None
    ca = Ma.coeff[ia] if Ma.coeff is not None else None
    cb = Mb.coeff[ib] if Mb.coeff is not None else None
    if ca is not None or cb is not None:
        coeff = (ca if ca is not None else 1.0) * (cb if cb is not None else 1.0)
    del _digit_arrays, pack_digits
    return OperatorHandle(support, dims, Monomial(perm=perm, coeff=coeff),
                          name=f"{a.name}*{b.name}")


def prepare_resource(builder: CircuitBuilder, kind: str, d: int, n: int,
                     tag: str) -> tuple[list[int], list[int]]:
    """Alloc 2n ancillas and prepare |Phi_U> or |Phi_Delta> on them."""
    init, meas, corr = _resource_stabilizer_spec(kind, n)
    plus = np.ones(d) / math.sqrt(d)
    a_sites, b_sites = [], []
    for k in range(n):
        a_sites.append(builder.alloc(d, init=plus if init == "plus" else 0,
                                     tag=f"{tag}-a{k}"))
    for k in range(n):
        b_sites.append(builder.alloc(d, init=plus if init == "plus" else 0,
                                     tag=f"{tag}-b{k}"))
    site_of = {("a", k): a_sites[k] for k in range(n)}
    site_of.update({("b", k): b_sites[k] for k in range(n)})
    keys = []
    # two sublayers: adjacent generators overlap on shared B sites
    order = [i for i in range(len(meas)) if i % 2 == 0] + \
            [i for i in range(len(meas)) if i % 2 == 1]
    for i in order:
        ptype, terms = meas[i]
        sites = [site_of[slot, k] for slot, k, _ in terms]
        exps = [exp for _, _, exp in terms]
        key = builder.fresh_key(f"{tag}-stab{i}")
        keys.append((i, key))
        if ptype == "Z":
            _measure_diagonal_pauli(builder, sites, d, exps, key)
        else:
            _measure_x_pauli(builder, sites, d, exps, key)
    for i, key in sorted(keys):
        a_site = a_sites[i]

        def resolver(record, _state, key=key, a_site=a_site, corr=corr, d=d):
            r = int(record[key]) % d
            if r == 0:
                return None
            return (x_gate if corr == "X" else z_gate)(a_site, d, r)

        builder.controlled([a_site], resolver, tag=f"{tag}-fix{i}")
    return a_sites, b_sites


def teleport_clifford(builder: CircuitBuilder, kind: str, data_sites: Sequence[int],
                      d: int) -> None:
    """Teleport U or Delta onto ``data_sites`` via its resource state."""
    n = len(data_sites)
    tag = builder.fresh_key(f"tp{kind}")
    a_sites, b_sites = prepare_resource(builder, kind, d, n, tag)
    bell, bell_labels = bell_basis(d)
    keys = []
    for k in range(n):
        key = builder.fresh_key(f"{tag}-bell{k}")
        keys.append(key)
        builder.measure_basis([data_sites[k], a_sites[k]], key,
                              basis=bell, labels=bell_labels)
    gates = clifford_gate_list(kind, n)

    def frame_of(record) -> PauliFrame:
        frame = PauliFrame.zero(d, n)
        for k, key in enumerate(keys):
            r, s = record[key]
            frame.x[k] = r % d
            frame.z[k] = s % d
        frame.conj_gates(gates)   # U (X^r Z^s) U^dagger
        return frame

    for k in range(n):
        def resolver(record, _state, k=k):
            frame = frame_of(record)
            if frame.x[k] % d == 0 and frame.z[k] % d == 0:
                return None
            return pauli_gate(b_sites[k], d, int(frame.x[k]), int(frame.z[k]))

        builder.controlled([b_sites[k]], resolver, tag=f"{tag}-pauli{k}")
    # disentangle the measured Bell pairs and move the output back
    unrot = _bell_unrotate(d)
    for k in range(n):
        builder.unitary(
            dense([data_sites[k], a_sites[k]], [d, d], unrot, name="bellT"),
            tag=f"{tag}-unrot{k}")
    for k in range(n):
        def fix_resolver(record, _state, k=k, key=keys[k]):
            r, s = record[key]
            if s % d == 0 and r % d == 0:
                return None
            return _compose_disjoint(x_gate(data_sites[k], d, -s),
                                     x_gate(a_sites[k], d, r))

        builder.controlled([data_sites[k], a_sites[k]], fix_resolver,
                           tag=f"{tag}-zero{k}")
    for k in range(n):
        builder.unitary(_swap_gate(data_sites[k], b_sites[k], d), tag=f"{tag}-swap{k}")
    for k in range(n):
        builder.discard(a_sites[k], expected=0)
        builder.discard(b_sites[k], expected=0)
    builder.merge_point(drop_prefixes=(tag,))


def _bell_unrotate(d: int) -> np.ndarray:
    """(F^dagger x I) CX^{-1}: maps Phi^{(r,s)} to a phase times |s>|-r>."""
    F = fourier_matrix(d)
    B = d * d
    cxdg = np.zeros((B, B))
    for a in range(d):
        for b in range(d):
            cxdg[a * d + ((b - a) % d), a * d + b] = 1.0
    return np.kron(F.conj().T, np.eye(d)) @ cxdg


def _swap_gate(a: int, b: int, d: int) -> OperatorHandle:
    from ..sim.ops import basis_permutation
    return basis_permutation([a, b], [d, d], lambda dig: [dig[1], dig[0]],
                             name="SWAP")


def partial_summation(builder: CircuitBuilder, sites: Sequence[int], d: int,
                      mode: str = "teleport") -> None:
    """U: |j_1..j_n> -> |j_1, j_1+j_2, ..., sum j_k>."""
    if len(sites) < 2:
        return
    if mode == "direct":
        emit_direct(builder, "U", sites, d)
    else:
        teleport_clifford(builder, "U", sites, d)


def successive_difference(builder: CircuitBuilder, sites: Sequence[int], d: int,
                          mode: str = "teleport") -> None:
    """Delta = U^dagger: |j_1..j_n> -> |j_1, j_2-j_1, ..., j_n-j_{n-1}>."""
    if len(sites) < 2:
        return
    if mode == "direct":
        emit_direct(builder, "Delta", sites, d)
    else:
        teleport_clifford(builder, "Delta", sites, d)


def fanin_cx(builder: CircuitBuilder, source_sites: Sequence[int], target: int,
             d: int, mode: str = "teleport", inverse: bool = False) -> None:
    """target <- target +- sum(sources): V, one 2-qudit CX, V^dagger."""
    partial_summation(builder, source_sites, d, mode)
    builder.unitary(cx_add(source_sites[-1], target, d, -1 if inverse else +1),
                    tag="fanin-cx")
    successive_difference(builder, source_sites, d, mode)


def multitarget_cx(builder: CircuitBuilder, target_sites: Sequence[int],
                   control: int, d: int, mode: str = "teleport",
                   inverse: bool = False) -> None:
    """x_i <- x_i +- h for all targets, via the Fourier reexpression."""
    if mode == "direct":
        for t in target_sites:
            builder.unitary(cx_add(control, t, d, -1 if inverse else +1),
                            tag="mt-direct")
        return
    for t in target_sites:
        builder.unitary(fourier_gate(t, d, inverse=True), tag="mt-F")
    builder.unitary(fourier_gate(control, d, inverse=False), tag="mt-F")
    fanin_cx(builder, list(target_sites), control, d, mode, inverse=inverse)
    for t in target_sites:
        builder.unitary(fourier_gate(t, d, inverse=False), tag="mt-F")
    builder.unitary(fourier_gate(control, d, inverse=True), tag="mt-F")
