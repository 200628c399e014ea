"""Mixed-dimension qudit registers and dense state vectors.

Indexing is mixed-radix with site 0 as the most significant digit.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from ..errors import TooLarge

DEFAULT_AMP_CAP = 1 << 26


def amplitude_cap() -> int:
    env = os.environ.get("QDOUBLE_AMP_CAP")
    return int(env) if env else DEFAULT_AMP_CAP


@dataclass
class QuditRegister:
    """Ordered collection of qudits with per-site dimensions and roles."""

    dims: list[int]
    roles: list[str] = field(default_factory=list)
    cap: int | None = None

    def __post_init__(self) -> None:
        if any(d < 2 for d in self.dims):
            raise TooLarge("all site dimensions must be >= 2")
        if not self.roles:
            self.roles = ["site"] * len(self.dims)
        self.check_cap(self.total_dim)

    @property
    def n_sites(self) -> int:
        return len(self.dims)

    @property
    def total_dim(self) -> int:
        return math.prod(self.dims)

    def check_cap(self, dim: int) -> None:
        cap = self.cap if self.cap is not None else amplitude_cap()
        if dim > cap:
            raise TooLarge(f"state of {dim} amplitudes exceeds cap {cap} "
                           "(override with QDOUBLE_AMP_CAP)")

    def strides(self) -> list[int]:
        out = [1] * self.n_sites
        for i in range(self.n_sites - 2, -1, -1):
            out[i] = out[i + 1] * self.dims[i + 1]
        return out

    def basis_index(self, digits: list[int] | tuple[int, ...]) -> int:
        idx = 0
        for d, dim in zip(digits, self.dims):
            idx = idx * dim + d
        return idx

    def digits_of(self, index: int) -> tuple[int, ...]:
        out = []
        for dim in reversed(self.dims):
            index, d = divmod(index, dim)
            out.append(d)
        return tuple(reversed(out))


@dataclass
class StateVector:
    """Dense amplitude vector over a register; usually mutated in place."""

    register: QuditRegister
    amplitudes: np.ndarray

    @classmethod
    def basis_state(cls, register: QuditRegister,
                    digits: list[int] | tuple[int, ...] | int = 0) -> "StateVector":
        amps = np.zeros(register.total_dim, dtype=np.complex128)
        idx = digits if isinstance(digits, int) else register.basis_index(digits)
        amps[idx] = 1.0
        return cls(register=register, amplitudes=amps)

    @classmethod
    def from_amplitudes(cls, register: QuditRegister, amps: np.ndarray,
                        normalize: bool = False) -> "StateVector":
        amps = np.asarray(amps, dtype=np.complex128).reshape(-1).copy()
        if amps.size != register.total_dim:
            raise TooLarge(f"amplitude count {amps.size} != register dim")
        if normalize:
            amps /= np.linalg.norm(amps)
        return cls(register=register, amplitudes=amps)

    def copy(self) -> "StateVector":
        return StateVector(register=QuditRegister(list(self.register.dims),
                                                  list(self.register.roles),
                                                  self.register.cap),
                           amplitudes=self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def fidelity(self, other: "StateVector") -> float:
        """|<self|other>|^2 for normalized states."""
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)) ** 2)

    def dump(self, threshold: float = 1e-12) -> str:
        """Debug dump: dims header plus nonzero amplitudes as 'index re im'."""
        lines = ["dims " + " ".join(str(d) for d in self.register.dims)]
        for idx in np.nonzero(np.abs(self.amplitudes) > threshold)[0]:
            a = self.amplitudes[idx]
            lines.append(f"{int(idx)} {a.real:.17g} {a.imag:.17g}")
        return "\n".join(lines) + "\n"
