"""Structured linear operators on qudit subsets.

Bodies are kept structured so application never materializes a full matrix:
``Monomial`` covers basis permutations, diagonals, and masked permutations
(one nonzero per column); ``DenseBody`` holds an explicit matrix for small
supports; ``Controlled`` compiles into one of the former at construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from ..errors import NonUnitary, TooLarge

DENSE_CAP = 4096


@dataclass(frozen=True)
class Monomial:
    """column j -> coeff[j] * |perm[j]>; coeff None means all-ones."""

    perm: np.ndarray
    coeff: np.ndarray | None = None

    @property
    def block_dim(self) -> int:
        return self.perm.size

    def is_permutation(self) -> bool:
        if self.coeff is not None and not np.allclose(np.abs(self.coeff), 1.0, atol=1e-12):
            return False
        return np.array_equal(np.sort(self.perm), np.arange(self.block_dim))

    def compose(self, other: "Monomial") -> "Monomial":
        """self applied after other."""
        perm = self.perm[other.perm]
        if self.coeff is None and other.coeff is None:
            coeff = None
        else:
            a = self.coeff[other.perm] if self.coeff is not None else 1.0
            b = other.coeff if other.coeff is not None else 1.0
            coeff = a * b
        return Monomial(perm=perm, coeff=coeff)

    def adjoint(self) -> "Monomial":
        if not np.array_equal(np.sort(self.perm), np.arange(self.block_dim)):
            raise NonUnitary("masked monomial has no monomial adjoint")
        inv = np.empty_like(self.perm)
        inv[self.perm] = np.arange(self.block_dim)
        coeff = None
        if self.coeff is not None:
            coeff = np.conj(self.coeff)[inv]
        return Monomial(perm=inv, coeff=coeff)


@dataclass(frozen=True)
class DenseBody:
    matrix: np.ndarray


@dataclass(frozen=True)
class OperatorHandle:
    """A linear operator on a subset of sites.

    ``support`` lists site ids most-significant first; the body acts on the
    mixed-radix block index over those sites' dimensions.
    """

    support: tuple[int, ...]
    dims: tuple[int, ...]
    body: Monomial | DenseBody
    name: str = ""

    @property
    def block_dim(self) -> int:
        return math.prod(self.dims)

    @property
    def kind(self) -> str:
        if isinstance(self.body, DenseBody):
            return "dense"
        if np.array_equal(self.body.perm, np.arange(self.block_dim)):
            return "diagonal"
        if self.body.coeff is None:
            return "permutation"
        return "monomial"

    def is_unitary(self, tol: float = 1e-9) -> bool:
        if isinstance(self.body, Monomial):
            return self.body.is_permutation()
        U = self.body.matrix
        return bool(np.allclose(U.conj().T @ U, np.eye(U.shape[0]), atol=tol))

    def require_unitary(self) -> "OperatorHandle":
        if not self.is_unitary():
            raise NonUnitary(f"operator {self.name or self.kind} is not unitary")
        return self

    def adjoint(self) -> "OperatorHandle":
        if isinstance(self.body, DenseBody):
            body: Monomial | DenseBody = DenseBody(self.body.matrix.conj().T)
        else:
            body = self.body.adjoint()
        return OperatorHandle(self.support, self.dims, body, name=f"{self.name}^")

    def to_matrix(self) -> np.ndarray:
        """Materialize the block matrix (small supports only)."""
        B = self.block_dim
        if B > DENSE_CAP:
            raise TooLarge(f"refusing to materialize {B}x{B} matrix")
        if isinstance(self.body, DenseBody):
            return self.body.matrix.copy()
        M = np.zeros((B, B), dtype=np.complex128)
        cols = np.arange(B)
        vals = self.body.coeff if self.body.coeff is not None else np.ones(B)
        M[self.body.perm, cols] = vals
        return M


def _digit_arrays(dims: Sequence[int]) -> list[np.ndarray]:
    """Per-site digit arrays over the block index space of ``dims``."""
    B = math.prod(dims)
    idx = np.arange(B)
    out = []
    for stride, d in zip(_strides(dims), dims):
        out.append((idx // stride) % d)
    return out


def _strides(dims: Sequence[int]) -> list[int]:
    out = [1] * len(dims)
    for i in range(len(dims) - 2, -1, -1):
        out[i] = out[i + 1] * dims[i + 1]
    return out


def pack_digits(digit_arrays: Sequence[np.ndarray], dims: Sequence[int]) -> np.ndarray:
    idx = np.zeros_like(digit_arrays[0])
    for arr, d in zip(digit_arrays, dims):
        idx = idx * d + arr
    return idx


def monomial_from_maps(dims: Sequence[int],
                       fn: Callable[[list[np.ndarray]], tuple[list[np.ndarray], np.ndarray | None]],
                       ) -> Monomial:
    """Build a Monomial by vectorized digit transformation.

    ``fn`` receives per-site digit arrays and returns (new digit arrays,
    coeff array or None).
    """
    digits = _digit_arrays(dims)
    new_digits, coeff = fn(digits)
    perm = pack_digits(new_digits, dims)
    return Monomial(perm=perm, coeff=coeff)


def basis_permutation(support: Sequence[int], dims: Sequence[int],
                      fn, name: str = "") -> OperatorHandle:
    """Permutation handle from a vectorized digit map (must be bijective)."""
    body = monomial_from_maps(dims, lambda d: (fn(d), None))
    handle = OperatorHandle(tuple(support), tuple(dims), body, name=name)
    if not body.is_permutation():
        raise NonUnitary(f"{name or 'basis_permutation'}: digit map is not a bijection")
    return handle


def diagonal(support: Sequence[int], dims: Sequence[int],
             coeff: np.ndarray, name: str = "") -> OperatorHandle:
    B = math.prod(dims)
    body = Monomial(perm=np.arange(B), coeff=np.asarray(coeff, dtype=np.complex128))
    return OperatorHandle(tuple(support), tuple(dims), body, name=name)


def dense(support: Sequence[int], dims: Sequence[int],
          matrix: np.ndarray, name: str = "") -> OperatorHandle:
    B = math.prod(dims)
    if B > DENSE_CAP:
        raise TooLarge(f"dense body on joint dimension {B} exceeds cap {DENSE_CAP}")
    M = np.asarray(matrix, dtype=np.complex128)
    if M.shape != (B, B):
        raise TooLarge(f"matrix shape {M.shape} does not match block dim {B}")
    return OperatorHandle(tuple(support), tuple(dims), DenseBody(M), name=name)


def controlled(control_sites: Sequence[int], control_dims: Sequence[int],
               branches: Mapping[tuple[int, ...] | int, OperatorHandle],
               default_identity: bool = True, name: str = "") -> OperatorHandle:
    """Compile a classically-structured controlled operator.

    All branch handles must share the same target support. Branches indexed
    by control digit tuples (or a bare int for a single control site).
    Missing control values act as identity when ``default_identity``.
    """
    branches = {(k,) if isinstance(k, int) else tuple(k): v for k, v in branches.items()}
    any_branch = next(iter(branches.values()))
    tgt_support, tgt_dims = any_branch.support, any_branch.dims
    for b in branches.values():
        if b.support != tgt_support or b.dims != tgt_dims:
            raise TooLarge("controlled branches must share one target support")
    dims = tuple(control_dims) + tgt_dims
    support = tuple(control_sites) + tgt_support
    ctrl_block = math.prod(control_dims)
    tgt_block = math.prod(tgt_dims)
    all_monomial = all(isinstance(b.body, Monomial) for b in branches.values())
    ctrl_digits_of = _digit_arrays(control_dims)
    if all_monomial:
        perm = np.empty(ctrl_block * tgt_block, dtype=np.int64)
        coeff = np.ones(ctrl_block * tgt_block, dtype=np.complex128)
        base = np.arange(tgt_block)
        for cv in range(ctrl_block):
            key = tuple(int(arr[cv]) for arr in ctrl_digits_of)
            lo = cv * tgt_block
            branch = branches.get(key)
            if branch is None:
                if not default_identity:
                    raise TooLarge(f"missing controlled branch for {key}")
                perm[lo:lo + tgt_block] = lo + base
            else:
                body = branch.body
                perm[lo:lo + tgt_block] = lo + body.perm
                if body.coeff is not None:
                    coeff[lo:lo + tgt_block] = body.coeff
        trivial = np.allclose(coeff, 1.0)
        return OperatorHandle(support, dims,
                              Monomial(perm=perm, coeff=None if trivial else coeff),
                              name=name)
    # dense fallback
    B = ctrl_block * tgt_block
    if B > DENSE_CAP:
        raise TooLarge(f"controlled-dense block {B} exceeds cap {DENSE_CAP}")
    M = np.zeros((B, B), dtype=np.complex128)
    for cv in range(ctrl_block):
        key = tuple(int(arr[cv]) for arr in ctrl_digits_of)
        lo = cv * tgt_block
        branch = branches.get(key)
        blk = branch.to_matrix() if branch is not None else np.eye(tgt_block)
        M[lo:lo + tgt_block, lo:lo + tgt_block] = blk
    return OperatorHandle(support, dims, DenseBody(M), name=name)


def identity_handle(support: Sequence[int], dims: Sequence[int]) -> OperatorHandle:
    B = math.prod(dims)
    return OperatorHandle(tuple(support), tuple(dims), Monomial(perm=np.arange(B)),
                          name="I")


@dataclass(frozen=True)
class OperatorSum:
    """Lazy complex-linear combination of handles on a shared support."""

    terms: tuple[tuple[complex, OperatorHandle], ...]
    name: str = ""

    @property
    def support(self) -> tuple[int, ...]:
        return self.terms[0][1].support

    @property
    def dims(self) -> tuple[int, ...]:
        return self.terms[0][1].dims

    def to_matrix(self) -> np.ndarray:
        out = None
        for c, h in self.terms:
            M = c * h.to_matrix()
            out = M if out is None else out + M
        return out

    def adjoint(self) -> "OperatorSum":
        return OperatorSum(tuple((np.conj(c), h.adjoint()) for c, h in self.terms),
                           name=f"{self.name}^")
