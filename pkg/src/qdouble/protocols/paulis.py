"""Generalized Z_d Paulis, Fourier/Bell bases, and the symplectic bookkeeping
used for teleportation frame corrections."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from ..sim.ops import OperatorHandle, basis_permutation, dense, diagonal


def omega(d: int) -> complex:
    return cmath.exp(2j * math.pi / d)


def x_gate(site: int, d: int, power: int = 1) -> OperatorHandle:
    """X^power: |j> -> |j + power mod d>."""
    return basis_permutation([site], [d], lambda dig: [(dig[0] + power) % d],
                             name=f"X^{power}")


def z_gate(site: int, d: int, power: int = 1) -> OperatorHandle:
    w = omega(d)
    coeff = np.array([w ** (power * j) for j in range(d)])
    return diagonal([site], [d], coeff, name=f"Z^{power}")


def pauli_gate(site: int, d: int, x: int, z: int) -> OperatorHandle:
    """X^x Z^z on one site (phase convention: X applied after Z)."""
    w = omega(d)
    coeff = np.array([w ** (z * j) for j in range(d)])
    perm = (np.arange(d) + x) % d
    from ..sim.ops import Monomial
    return OperatorHandle((site,), (d,), Monomial(perm=perm, coeff=coeff),
                          name=f"X^{x}Z^{z}")


def negate_gate(site: int, d: int) -> OperatorHandle:
    """S: |h> -> |-h mod d>."""
    return basis_permutation([site], [d], lambda dig: [(-dig[0]) % d], name="S")


def fourier_matrix(d: int) -> np.ndarray:
    w = omega(d)
    j = np.arange(d)
    return np.array([[w ** (a * b) for b in j] for a in j]) / math.sqrt(d)


def fourier_gate(site: int, d: int, inverse: bool = False) -> OperatorHandle:
    F = fourier_matrix(d)
    return dense([site], [d], F.conj().T if inverse else F,
                 name="F^" if inverse else "F")


def x_eigenbasis(d: int) -> np.ndarray:
    """Columns |m~> = F^dagger |m| satisfy X|m~> = omega^m |m~>."""
    return fourier_matrix(d).conj().T


def cx_add(control: int, target: int, d: int, power: int = 1) -> OperatorHandle:
    """|i>|j> -> |i>|j + power*i mod d>."""
    return basis_permutation([control, target], [d, d],
                             lambda dig: [dig[0], (dig[1] + power * dig[0]) % d],
                             name=f"CX^{power}")


def bell_basis(d: int) -> tuple[np.ndarray, list[tuple[int, int]]]:
    """Columns Phi^{(r,s)} = (X^r Z^s x I)|Phi>, labels (r, s) in column order."""
    w = omega(d)
    cols = np.zeros((d * d, d * d), dtype=complex)
    labels = []
    for r in range(d):
        for s in range(d):
            col = r * d + s
            for j in range(d):
                cols[((j + r) % d) * d + j, col] = w ** (s * j) / math.sqrt(d)
            labels.append((r, s))
    return cols, labels


@dataclass
class PauliFrame:
    """X/Z exponent vectors over n qudits of dimension d (phases dropped)."""

    d: int
    x: np.ndarray
    z: np.ndarray

    @classmethod
    def zero(cls, d: int, n: int) -> "PauliFrame":
        return cls(d=d, x=np.zeros(n, dtype=np.int64), z=np.zeros(n, dtype=np.int64))

    def conj_cx(self, a: int, b: int) -> None:
        """Frame -> CX_{a->b} Frame CX^dagger: X_a -> X_a X_b, Z_b -> Z_a^{-1} Z_b."""
        self.x[b] = (self.x[b] + self.x[a]) % self.d
        self.z[a] = (self.z[a] - self.z[b]) % self.d

    def conj_cx_dagger(self, a: int, b: int) -> None:
        self.x[b] = (self.x[b] - self.x[a]) % self.d
        self.z[a] = (self.z[a] + self.z[b]) % self.d

    def conj_gates(self, gates: list[tuple[str, int, int]]) -> None:
        """Conjugate by a circuit: gates as (kind, a, b) applied first-to-last."""
        for kind, a, b in gates:
            if kind == "cx":
                self.conj_cx(a, b)
            elif kind == "cxdg":
                self.conj_cx_dagger(a, b)
            else:
                raise ValueError(f"unknown Clifford gate {kind!r}")
