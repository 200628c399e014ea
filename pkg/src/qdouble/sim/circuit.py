"""Adaptive circuit IR: instruction sequence with measurements, classical
compute nodes, classically-controlled gates, and ancilla lifecycle.

Circuits are static instruction lists referencing virtual site ids: the
initial register contributes ids 0..n-1 and each AllocAncilla claims the next
id in program order. A builder tracks dimensions so gate constructors can be
checked at build time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from ..errors import SupportOutOfRange
from .ops import OperatorHandle

Record = dict[str, Any]


@dataclass(frozen=True)
class Unitary:
    op: OperatorHandle
    tag: str = ""


@dataclass(frozen=True)
class MeasureComputational:
    site: int
    key: str


@dataclass(frozen=True)
class MeasureBasis:
    """Projective measurement on ``sites``.

    ``basis`` is None for the computational basis, a full block-dim unitary
    whose columns are the basis vectors, or a list of per-site unitaries
    (tensor-product basis). ``labels[column]`` groups basis vectors into
    outcomes; None means every column is its own outcome. A ``resolver``
    may supply (basis, labels) from the record at run time instead.
    """

    sites: tuple[int, ...]
    key: str
    basis: Any = None
    labels: Any = None
    resolver: Callable[[Record], tuple[Any, Any]] | None = None


@dataclass(frozen=True)
class ClassicalCompute:
    fn: Callable[[Record], dict[str, Any] | None]
    tag: str = ""


@dataclass(frozen=True)
class ControlledUnitary:
    """Classically controlled gate: ``resolver(record, state)`` returns the
    handle to apply (or None for identity). Support is declared up front so
    depth accounting does not depend on outcomes."""

    support: tuple[int, ...]
    resolver: Callable[[Record, Any], OperatorHandle | None]
    tag: str = ""


@dataclass(frozen=True)
class AllocAncilla:
    site: int          # virtual id claimed by this allocation
    dim: int
    init: Any = 0      # basis index or amplitude vector
    tag: str = ""


@dataclass(frozen=True)
class DiscardAncilla:
    site: int
    expected: Any = None  # basis index, amplitude vector, or None (traced)


@dataclass(frozen=True)
class MergePoint:
    """Branch-enumeration hint: outcomes in ``drop_keys`` (or with a prefix in
    ``drop_prefixes``) are local to the preceding block; branches agreeing on
    the state may be merged here."""

    drop_keys: tuple[str, ...] = ()
    drop_prefixes: tuple[str, ...] = ()


Instruction = (Unitary | MeasureComputational | MeasureBasis | ClassicalCompute
               | ControlledUnitary | AllocAncilla | DiscardAncilla | MergePoint)


@dataclass
class AdaptiveCircuit:
    initial_dims: tuple[int, ...]
    instructions: list[Instruction] = field(default_factory=list)

    def serialize(self) -> str:
        """Line-oriented debug listing, stable across runs."""
        out = [f"register {' '.join(str(d) for d in self.initial_dims)}"]
        for ins in self.instructions:
            if isinstance(ins, Unitary):
                out.append(f"unitary {ins.tag or ins.op.name or ins.op.kind} "
                           f"support={list(ins.op.support)}")
            elif isinstance(ins, MeasureComputational):
                out.append(f"measure {ins.key} site={ins.site}")
            elif isinstance(ins, MeasureBasis):
                out.append(f"measure_basis {ins.key} sites={list(ins.sites)}")
            elif isinstance(ins, ClassicalCompute):
                out.append(f"classical {ins.tag}")
            elif isinstance(ins, ControlledUnitary):
                out.append(f"controlled {ins.tag} support={list(ins.support)}")
            elif isinstance(ins, AllocAncilla):
                out.append(f"alloc site={ins.site} dim={ins.dim} {ins.tag}")
            elif isinstance(ins, DiscardAncilla):
                out.append(f"discard site={ins.site}")
            elif isinstance(ins, MergePoint):
                out.append(f"merge drop={list(ins.drop_keys)}")
        return "\n".join(out) + "\n"


class CircuitBuilder:
    """Tracks virtual site dims while assembling an AdaptiveCircuit."""

    def __init__(self, initial_dims: Sequence[int]):
        self.circuit = AdaptiveCircuit(initial_dims=tuple(int(d) for d in initial_dims))
        self._dims: dict[int, int] = {i: int(d) for i, d in enumerate(initial_dims)}
        self._next_id = len(self._dims)
        self._alive = set(self._dims)
        self._key_counter = 0

    def fresh_key(self, prefix: str) -> str:
        self._key_counter += 1
        return f"{prefix}#{self._key_counter}"

    def dim(self, site: int) -> int:
        return self._dims[site]

    def dims_of(self, sites: Sequence[int]) -> tuple[int, ...]:
        return tuple(self._dims[s] for s in sites)

    def _check(self, sites: Sequence[int]) -> None:
        for s in sites:
            if s not in self._alive:
                raise SupportOutOfRange(f"site {s} not allocated or already discarded")

    def unitary(self, op: OperatorHandle, tag: str = "") -> None:
        self._check(op.support)
        if op.dims != self.dims_of(op.support):
            raise SupportOutOfRange(
                f"operator dims {op.dims} mismatch register {self.dims_of(op.support)}")
        self.circuit.instructions.append(Unitary(op=op, tag=tag))

    def measure(self, site: int, key: str) -> None:
        self._check([site])
        self.circuit.instructions.append(MeasureComputational(site=site, key=key))

    def measure_basis(self, sites: Sequence[int], key: str, basis=None,
                      labels=None, resolver=None) -> None:
        self._check(sites)
        self.circuit.instructions.append(MeasureBasis(
            sites=tuple(sites), key=key, basis=basis, labels=labels,
            resolver=resolver))

    def classical(self, fn, tag: str = "") -> None:
        self.circuit.instructions.append(ClassicalCompute(fn=fn, tag=tag))

    def controlled(self, support: Sequence[int], resolver, tag: str = "") -> None:
        self._check(support)
        self.circuit.instructions.append(ControlledUnitary(
            support=tuple(support), resolver=resolver, tag=tag))

    def alloc(self, dim: int, init=0, tag: str = "") -> int:
        site = self._next_id
        self._next_id += 1
        self._dims[site] = int(dim)
        self._alive.add(site)
        self.circuit.instructions.append(AllocAncilla(site=site, dim=int(dim),
                                                      init=init, tag=tag))
        return site

    def discard(self, site: int, expected=None) -> None:
        self._check([site])
        self._alive.discard(site)
        self.circuit.instructions.append(DiscardAncilla(site=site, expected=expected))

    def merge_point(self, drop_keys: Sequence[str] = (),
                    drop_prefixes: Sequence[str] = ()) -> None:
        self.circuit.instructions.append(MergePoint(
            drop_keys=tuple(drop_keys), drop_prefixes=tuple(drop_prefixes)))

    def build(self) -> AdaptiveCircuit:
        return self.circuit
