"""Dense-state execution: gate application, measurement, adaptive-circuit
interpretation with depth accounting, and exact branch enumeration."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from ..errors import (AncillaNotDisentangled, BasisNotOrthonormal, NonUnitary,
                      SupportOutOfRange, ZeroImage)
from .circuit import (AdaptiveCircuit, AllocAncilla, ClassicalCompute,
                      ControlledUnitary, DiscardAncilla, MeasureBasis,
                      MeasureComputational, MergePoint, Record, Unitary)
from .ops import DenseBody, Monomial, OperatorHandle, OperatorSum
from .register import QuditRegister, StateVector

MEAS_TOL = 1e-9
DISENTANGLE_TOL = 1e-9


# ---------------------------------------------------------------------------
# Low-level block transforms
# ---------------------------------------------------------------------------

def _to_block(amps: np.ndarray, dims: Sequence[int], axes: Sequence[int]):
    """Reshape amplitudes to (rest, block) with ``axes`` last, in order."""
    n = len(dims)
    rest = [i for i in range(n) if i not in axes]
    order = rest + list(axes)
    full = amps.reshape(tuple(dims))
    moved = full.transpose(order)
    block = math.prod(dims[a] for a in axes) if axes else 1
    return np.ascontiguousarray(moved).reshape(-1, block), order, [dims[i] for i in order]


def _from_block(blk: np.ndarray, order: Sequence[int], perm_dims: Sequence[int]) -> np.ndarray:
    inv = np.argsort(order)
    return blk.reshape(perm_dims).transpose(inv).reshape(-1)


def _apply_body(blk: np.ndarray, body: Monomial | DenseBody) -> np.ndarray:
    if isinstance(body, DenseBody):
        return blk @ body.matrix.T
    perm = body.perm
    B = perm.size
    order = np.argsort(perm, kind="stable")
    if np.array_equal(perm[order], np.arange(B)):
        inv = order
        out = blk[:, inv]
        if body.coeff is not None:
            out = out * body.coeff[inv]
        return out
    # non-bijective monomial: scatter-add (used only via apply_general)
    out = np.zeros_like(blk)
    vals = blk * (body.coeff if body.coeff is not None else 1.0)
    np.add.at(out.T, perm, vals.T)
    return out


def _positions(state: StateVector, support: Sequence[int]) -> list[int]:
    n = state.register.n_sites
    for s in support:
        if not (0 <= s < n):
            raise SupportOutOfRange(f"site {s} outside register of {n} sites")
    if len(set(support)) != len(support):
        raise SupportOutOfRange(f"support {support} has repeated sites")
    return list(support)


def apply(state: StateVector, op: OperatorHandle, positions: Sequence[int] | None = None,
          check_unitary: bool = True) -> StateVector:
    """Apply a unitary handle in place (positions default to op.support)."""
    if check_unitary and not op.is_unitary():
        raise NonUnitary(f"operator {op.name or op.kind} is not unitary")
    axes = _positions(state, positions if positions is not None else op.support)
    blk, order, pdims = _to_block(state.amplitudes, state.register.dims, axes)
    blk = _apply_body(blk, op.body)
    state.amplitudes = _from_block(blk, order, pdims)
    return state


def apply_general(state: StateVector, op: OperatorHandle | OperatorSum,
                  positions: Sequence[int] | None = None) -> tuple[StateVector, float]:
    """Apply a (possibly non-unitary) operator; renormalize.

    Returns the squared norm of the unnormalized image.
    """
    if isinstance(op, OperatorSum):
        axes = _positions(state, positions if positions is not None else op.support)
        blk, order, pdims = _to_block(state.amplitudes, state.register.dims, axes)
        out = None
        for c, h in op.terms:
            t = _apply_body(blk, h.body)
            out = c * t if out is None else out + c * t
        nsq = float(np.vdot(out, out).real)
        if nsq < 1e-18:
            raise ZeroImage(f"operator {op.name} annihilates the state")
        out /= math.sqrt(nsq)
        state.amplitudes = _from_block(out, order, pdims)
        return state, nsq
    axes = _positions(state, positions if positions is not None else op.support)
    blk, order, pdims = _to_block(state.amplitudes, state.register.dims, axes)
    blk = _apply_body(blk, op.body)
    nsq = float(np.vdot(blk, blk).real)
    if nsq < 1e-18:
        raise ZeroImage(f"operator {op.name} annihilates the state")
    blk /= math.sqrt(nsq)
    state.amplitudes = _from_block(blk, order, pdims)
    return state, nsq


def expectation(state: StateVector, op: OperatorHandle | OperatorSum,
                positions: Sequence[int] | None = None) -> complex:
    """<state| op |state> without mutating the input."""
    work = state.copy()
    if isinstance(op, OperatorSum):
        axes = _positions(work, positions if positions is not None else op.support)
        blk, order, pdims = _to_block(work.amplitudes, work.register.dims, axes)
        out = None
        for c, h in op.terms:
            t = _apply_body(blk, h.body)
            out = c * t if out is None else out + c * t
        image = _from_block(out, order, pdims)
    else:
        axes = _positions(work, positions if positions is not None else op.support)
        blk, order, pdims = _to_block(work.amplitudes, work.register.dims, axes)
        image = _from_block(_apply_body(blk, op.body), order, pdims)
    return complex(np.vdot(state.amplitudes, image))


# ---------------------------------------------------------------------------
# Measurement
# ---------------------------------------------------------------------------

def _resolve_basis(basis, dims: Sequence[int]) -> np.ndarray | None:
    """Normalize the MeasureBasis basis argument to a block matrix (or None)."""
    if basis is None:
        return None
    if isinstance(basis, (list, tuple)):
        U = np.array([[1.0]], dtype=complex)
        for u in basis:
            U = np.kron(U, np.asarray(u, dtype=complex))
        basis = U
    U = np.asarray(basis, dtype=complex)
    B = math.prod(dims)
    if U.shape != (B, B):
        raise BasisNotOrthonormal(f"basis shape {U.shape} != block {B}")
    if not np.allclose(U.conj().T @ U, np.eye(B), atol=MEAS_TOL):
        raise BasisNotOrthonormal("basis is not orthonormal within 1e-9")
    return U


def _label_groups(labels, block: int) -> tuple[list[Any], dict[Any, np.ndarray]]:
    if labels is None:
        labels = list(range(block))
    labels = list(labels)
    groups: dict[Any, list[int]] = {}
    for col, lab in enumerate(labels):
        groups.setdefault(lab, []).append(col)
    ordered = sorted(groups)
    return ordered, {lab: np.asarray(cols) for lab, cols in groups.items()}


def measurement_distribution(state: StateVector, sites: Sequence[int],
                             basis=None, labels=None) -> dict[Any, float]:
    """Outcome -> probability map for a projective measurement (no collapse)."""
    axes = _positions(state, sites)
    dims = [state.register.dims[a] for a in axes]
    U = _resolve_basis(basis, dims)
    blk, _, _ = _to_block(state.amplitudes, state.register.dims, axes)
    if U is not None:
        blk = blk @ U.conj()
    col_probs = np.einsum("rb,rb->b", blk, blk.conj()).real
    ordered, groups = _label_groups(labels, blk.shape[1])
    return {lab: float(col_probs[groups[lab]].sum()) for lab in ordered}


def _collapse(state: StateVector, sites: Sequence[int], basis, labels,
              outcome) -> float:
    """Project onto the outcome's subspace; returns the branch probability."""
    axes = _positions(state, sites)
    dims = [state.register.dims[a] for a in axes]
    U = _resolve_basis(basis, dims)
    blk, order, pdims = _to_block(state.amplitudes, state.register.dims, axes)
    rotated = blk @ U.conj() if U is not None else blk
    ordered, groups = _label_groups(labels, rotated.shape[1])
    keep = groups[outcome]
    masked = np.zeros_like(rotated)
    masked[:, keep] = rotated[:, keep]
    prob = float(np.vdot(masked, masked).real)
    if prob < 1e-300:
        raise ZeroImage("zero-probability collapse")
    masked /= math.sqrt(prob)
    if U is not None:
        masked = masked @ U.T
    state.amplitudes = _from_block(masked, order, pdims)
    return prob


def measure(state: StateVector, sites: Sequence[int] | int, rng: np.random.Generator,
            basis=None, labels=None) -> tuple[Any, StateVector, float]:
    """Born-rule sample a projective measurement; collapses in place."""
    if isinstance(sites, int):
        sites = [sites]
    dist = measurement_distribution(state, sites, basis, labels)
    outcomes = list(dist)
    probs = np.array([dist[o] for o in outcomes])
    total = probs.sum()
    if abs(total - 1.0) > 1e-6:
        probs = probs / total
    r = rng.random()
    cum = np.cumsum(probs)
    pick = int(np.searchsorted(cum, r, side="right"))
    pick = min(pick, len(outcomes) - 1)
    outcome = outcomes[pick]
    prob = _collapse(state, sites, basis, labels, outcome)
    return outcome, state, prob


# ---------------------------------------------------------------------------
# Ancilla lifecycle
# ---------------------------------------------------------------------------

def alloc_site(state: StateVector, dim: int, init=0) -> StateVector:
    local = np.zeros(dim, dtype=complex)
    if isinstance(init, (int, np.integer)):
        local[int(init)] = 1.0
    else:
        local[:] = np.asarray(init, dtype=complex)
        local /= np.linalg.norm(local)
    state.register.check_cap(state.register.total_dim * dim)
    state.amplitudes = np.kron(state.amplitudes, local)
    state.register.dims.append(int(dim))
    state.register.roles.append("ancilla")
    return state


def discard_site(state: StateVector, axis: int, expected=None) -> StateVector:
    d = state.register.dims[axis]
    blk, order, pdims = _to_block(state.amplitudes, state.register.dims, [axis])
    if expected is None:
        gram = blk.conj().T @ blk
        evals, evecs = np.linalg.eigh(gram)
        v = evecs[:, -1]
    else:
        v = np.zeros(d, dtype=complex)
        if isinstance(expected, (int, np.integer)):
            v[int(expected)] = 1.0
        else:
            v[:] = np.asarray(expected, dtype=complex)
            v /= np.linalg.norm(v)
    rest = blk @ v.conj()
    residual = float(np.vdot(blk, blk).real - np.vdot(rest, rest).real)
    if residual > DISENTANGLE_TOL:
        raise AncillaNotDisentangled(
            f"site residual {residual:.2e} exceeds {DISENTANGLE_TOL}")
    nrm = np.linalg.norm(rest)
    if nrm < 1e-12:
        raise AncillaNotDisentangled("expected local state has zero overlap")
    rest = rest / nrm
    # rebuild without the discarded axis
    n = len(state.register.dims)
    rest_axes = [i for i in range(n) if i != axis]
    rest_dims = [state.register.dims[i] for i in rest_axes]
    inv = np.argsort([*rest_axes])  # identity; kept for clarity
    del inv
    state.amplitudes = rest.reshape(rest_dims).reshape(-1)
    del state.register.dims[axis]
    del state.register.roles[axis]
    return state


# ---------------------------------------------------------------------------
# Adaptive-circuit interpretation
# ---------------------------------------------------------------------------

@dataclass
class DepthReport:
    quantum_depth: int = 0
    adaptive_rounds: int = 0
    gate_count: int = 0
    max_support: int = 0
    _open: set[int] = field(default_factory=set, repr=False)
    _measured_since: bool = field(default=False, repr=False)

    def note(self, support: Iterable[int], dependent: bool = False,
             measurement: bool = False) -> None:
        s = set(support)
        self.gate_count += 1
        self.max_support = max(self.max_support, len(s))
        # a feed-forward gate right after a measurement starts a fresh round
        # and must sit in a later layer; subsequent corrections pack normally
        round_break = dependent and self._measured_since
        if round_break:
            self.adaptive_rounds += 1
            self._measured_since = False
        new_layer = (not self._open) or round_break or bool(self._open & s)
        if new_layer:
            self.quantum_depth += 1
            self._open = set(s)
        else:
            self._open |= s
        if measurement:
            self._measured_since = True

    def snapshot(self) -> dict[str, int]:
        return {"quantum_depth": self.quantum_depth,
                "adaptive_rounds": self.adaptive_rounds,
                "gate_count": self.gate_count,
                "max_support": self.max_support}


class _Layout:
    """Maps virtual site ids to physical axes under alloc/discard."""

    def __init__(self, n_initial: int):
        self.order: list[int] = list(range(n_initial))

    def axis(self, vid: int) -> int:
        try:
            return self.order.index(vid)
        except ValueError:
            raise SupportOutOfRange(f"virtual site {vid} is not live") from None

    def axes(self, vids: Sequence[int]) -> list[int]:
        return [self.axis(v) for v in vids]

    def alloc(self, vid: int) -> None:
        self.order.append(vid)

    def discard(self, vid: int) -> None:
        self.order.remove(vid)


def _dependent_measure(ins: MeasureBasis) -> bool:
    return ins.resolver is not None


def run(circuit: AdaptiveCircuit, state: StateVector | None, seed: int | Sequence[int] = 0,
        record: Record | None = None) -> tuple[StateVector | None, Record, DepthReport]:
    """Execute an adaptive circuit.

    With ``state=None`` runs in dry mode: no amplitudes are tracked and
    measurement outcomes are drawn uniformly; the depth report is exact for
    circuits whose instruction stream structure is outcome-independent.
    """
    rng = np.random.default_rng(seed)
    rec: Record = dict(record or {})
    report = DepthReport()
    layout = _Layout(len(circuit.initial_dims))
    dry = state is None
    dry_dims: dict[int, int] = {i: d for i, d in enumerate(circuit.initial_dims)}

    for ins in circuit.instructions:
        if isinstance(ins, Unitary):
            report.note(ins.op.support)
            if not dry:
                apply(state, ins.op, positions=layout.axes(ins.op.support))
        elif isinstance(ins, MeasureComputational):
            report.note([ins.site], measurement=True)
            if dry:
                rec[ins.key] = int(rng.integers(dry_dims[ins.site]))
            else:
                outcome, _, _ = measure(state, layout.axes([ins.site]), rng)
                rec[ins.key] = outcome
        elif isinstance(ins, MeasureBasis):
            dep = _dependent_measure(ins)
            report.note(ins.sites, dependent=dep, measurement=True)
            basis, labels = (ins.resolver(rec) if dep else (ins.basis, ins.labels))
            if dry:
                block = math.prod(dry_dims[s] for s in ins.sites)
                ordered, _ = _label_groups(labels, block)
                rec[ins.key] = ordered[int(rng.integers(len(ordered)))]
            else:
                outcome, _, _ = measure(state, layout.axes(ins.sites), rng,
                                        basis=basis, labels=labels)
                rec[ins.key] = outcome
        elif isinstance(ins, ClassicalCompute):
            updates = ins.fn(rec)
            if updates:
                rec.update(updates)
        elif isinstance(ins, ControlledUnitary):
            report.note(ins.support, dependent=True)
            op = ins.resolver(rec, None if dry else _StateView(state, layout))
            if op is not None and not dry:
                apply(state, op, positions=layout.axes(op.support))
        elif isinstance(ins, AllocAncilla):
            report.note([ins.site])
            layout.alloc(ins.site)
            dry_dims[ins.site] = ins.dim
            if not dry:
                alloc_site(state, ins.dim, ins.init)
        elif isinstance(ins, DiscardAncilla):
            ax = layout.axis(ins.site)
            layout.discard(ins.site)
            if not dry:
                discard_site(state, ax, ins.expected)
        elif isinstance(ins, MergePoint):
            pass
        else:  # pragma: no cover
            raise TypeError(f"unknown instruction {ins!r}")
    return state, rec, report


@dataclass
class _StateView:
    """Read-only view handed to controlled-unitary resolvers."""

    state: StateVector
    layout: _Layout

    def amplitudes(self) -> np.ndarray:
        return self.state.amplitudes

    def dims(self) -> list[int]:
        return list(self.state.register.dims)

    def axes(self, vids: Sequence[int]) -> list[int]:
        return self.layout.axes(vids)


@dataclass
class Branch:
    state: StateVector
    record: Record
    prob: float
    layout: _Layout


def enumerate_runs(circuit: AdaptiveCircuit, state: StateVector,
                   min_prob: float = 1e-12) -> list[tuple[Record, StateVector, float]]:
    """Exhaustively expand every measurement branch with exact probabilities."""
    first = Branch(state=state.copy(), record={}, prob=1.0,
                   layout=_Layout(len(circuit.initial_dims)))
    branches = [first]
    for ins in circuit.instructions:
        nxt: list[Branch] = []
        if isinstance(ins, (MeasureComputational, MeasureBasis)):
            for br in branches:
                if isinstance(ins, MeasureComputational):
                    sites, basis, labels, key = [ins.site], None, None, ins.key
                else:
                    sites, key = list(ins.sites), ins.key
                    basis, labels = (ins.resolver(br.record) if ins.resolver
                                     else (ins.basis, ins.labels))
                axes = br.layout.axes(sites)
                dist = measurement_distribution(br.state, axes, basis, labels)
                for outcome, p in dist.items():
                    if p < min_prob:
                        continue
                    child = br.state.copy()
                    _collapse(child, axes, basis, labels, outcome)
                    rec = dict(br.record)
                    rec[key] = outcome
                    lay = _Layout(0)
                    lay.order = list(br.layout.order)
                    nxt.append(Branch(state=child, record=rec, prob=br.prob * p,
                                      layout=lay))
            branches = nxt
            continue
        if isinstance(ins, MergePoint):
            merged: dict[bytes, Branch] = {}
            for br in branches:
                for k in list(br.record):
                    if k in ins.drop_keys or any(k.startswith(p)
                                                 for p in ins.drop_prefixes):
                        br.record.pop(k)
                amps = br.state.amplitudes
                pivot = int(np.argmax(np.abs(amps)))
                phase = amps[pivot] / abs(amps[pivot]) if abs(amps[pivot]) > 0 else 1.0
                canon = np.round(amps / phase, 10)
                key = canon.tobytes() + repr(sorted(br.record.items())).encode()
                if key in merged:
                    merged[key].prob += br.prob
                else:
                    merged[key] = br
            branches = list(merged.values())
            continue
        for br in branches:
            if isinstance(ins, Unitary):
                apply(br.state, ins.op, positions=br.layout.axes(ins.op.support))
            elif isinstance(ins, ClassicalCompute):
                updates = ins.fn(br.record)
                if updates:
                    br.record.update(updates)
            elif isinstance(ins, ControlledUnitary):
                op = ins.resolver(br.record, _StateView(br.state, br.layout))
                if op is not None:
                    apply(br.state, op, positions=br.layout.axes(op.support))
            elif isinstance(ins, AllocAncilla):
                br.layout.alloc(ins.site)
                alloc_site(br.state, ins.dim, ins.init)
            elif isinstance(ins, DiscardAncilla):
                ax = br.layout.axis(ins.site)
                br.layout.discard(ins.site)
                discard_site(br.state, ax, ins.expected)
    return [(br.record, br.state, br.prob) for br in branches]
