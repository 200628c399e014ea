"""Conjugacy classes, centralizers, transversals, and unitary irreps.

Irreps are input data (built-in tables for Z_d, S_3, D_4 and abelian
centralizers, or user files), validated numerically. No general
character-theoretic algorithms are implemented.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ElementNotInGroup, IncompleteIrrepSet, IrrepValidationFailure
from .groups import FiniteGroup, SubgroupView, subgroup_view

TOL = 1e-9


@dataclass(frozen=True)
class ConjugacyClassData:
    """One conjugacy class C with its centralizer and transversal.

    Attributes:
        class_elements: c_1..c_{|C|} sorted ascending; c_1 is the representative.
        centralizer: SubgroupView of E(C) = {g : g r_C = r_C g}.
        transversal: p_1..p_{|C|} with p_1 = identity and c_j = p_j r_C p_j^{-1}.
        position_j / position_k: for each g in G the unique (j, k) with
            g = p_j k and k in E(C); k stored as a centralizer child index.
    """

    parent: FiniteGroup
    index: int
    class_elements: tuple[int, ...]
    centralizer: SubgroupView
    transversal: tuple[int, ...]
    position_j: np.ndarray
    position_k: np.ndarray

    @property
    def representative(self) -> int:
        return self.class_elements[0]

    @property
    def size(self) -> int:
        return len(self.class_elements)

    def position(self, g: int) -> tuple[int, int]:
        """g = p_j * k decomposition; k returned as a parent element index."""
        j = int(self.position_j[g])
        k = int(self.centralizer.to_parent[self.position_k[g]])
        return j, k


def conjugacy_classes(G: FiniteGroup) -> list[ConjugacyClassData]:
    """All conjugacy classes, ordered by smallest member; partition of G."""
    seen = np.zeros(G.order, dtype=bool)
    out: list[ConjugacyClassData] = []
    for r in G.elements():
        if seen[r]:
            continue
        orbit = sorted({G.conj(g, r) for g in G.elements()})
        for c in orbit:
            seen[c] = True
        cent = [g for g in G.elements() if G.mul[g, r] == G.mul[r, g]]
        cview = subgroup_view(G, cent, name=f"E({G.labels[r]})")
        transversal = []
        for c in orbit:
            p = next(g for g in G.elements() if G.conj(g, r) == c)
            transversal.append(p)
        pos_j = np.full(G.order, -1, dtype=np.int64)
        pos_k = np.full(G.order, -1, dtype=np.int64)
        for j, p in enumerate(transversal):
            for kc, kp in enumerate(cview.to_parent):
                g = int(G.mul[p, kp])
                if pos_j[g] != -1:
                    raise IrrepValidationFailure("transversal decomposition is not unique")
                pos_j[g] = j
                pos_k[g] = kc
        out.append(ConjugacyClassData(
            parent=G, index=len(out), class_elements=tuple(orbit),
            centralizer=cview, transversal=tuple(transversal),
            position_j=pos_j, position_k=pos_k))
    return out


def class_of(classes: Sequence[ConjugacyClassData], y: int) -> tuple[int, int]:
    """The unique (class index, j) with y = p_j r_C p_j^{-1}, i.e. y = c_j."""
    for ci, cd in enumerate(classes):
        if y in cd.class_elements:
            return ci, cd.class_elements.index(y)
    raise ElementNotInGroup(f"element {y} not found in any class")


@dataclass(frozen=True)
class Irrep:
    """A unitary irrep given by explicit matrices, indexed by group element."""

    group: FiniteGroup
    dim: int
    matrices: np.ndarray  # shape (|G|, dim, dim), complex
    name: str

    def matrix(self, g: int) -> np.ndarray:
        if not (0 <= g < self.group.order):
            raise ElementNotInGroup(f"element {g} not in {self.group.name}")
        return self.matrices[g]


def character(pi: Irrep, g: int) -> complex:
    """Trace of the irrep matrix at g (a class function)."""
    return complex(np.trace(pi.matrix(g)))


@dataclass(frozen=True)
class AnyonLabel:
    """An anyon type (C, pi): a class of G plus an irrep of its centralizer."""

    class_data: ConjugacyClassData
    irrep: Irrep

    @property
    def name(self) -> str:
        rc = self.class_data.parent.labels[self.class_data.representative]
        return f"(C[{rc}],{self.irrep.name})"


@dataclass(frozen=True)
class IrrepReport:
    name: str
    hom_violation: float
    unitarity_violation: float
    schur_violation: float
    tol: float

    @property
    def passed(self) -> bool:
        return max(self.hom_violation, self.unitarity_violation,
                   self.schur_violation) < self.tol


def verify_irrep(pi: Irrep, tol: float = TOL) -> IrrepReport:
    """Numerically check homomorphism, unitarity, and self Schur orthogonality."""
    G, d, M = pi.group, pi.dim, pi.matrices
    hom = 0.0
    for g in G.elements():
        prods = M[g] @ M  # (n, d, d): Gamma(g) Gamma(h)
        target = M[G.mul[g]]
        hom = max(hom, float(np.abs(prods - target).max()))
    eye = np.eye(d)
    unit = max(float(np.abs(M[g].conj().T @ M[g] - eye).max()) for g in G.elements())
    # Schur row orthogonality within pi: sum_g M_kl conj(M_st) = (|G|/d) delta delta
    S = np.einsum("gkl,gst->klst", M, M.conj())
    expect = (G.order / d) * np.einsum("ks,lt->klst", eye, eye)
    schur = float(np.abs(S - expect).max())
    return IrrepReport(name=pi.name, hom_violation=hom,
                       unitarity_violation=unit, schur_violation=schur, tol=tol)


def verify_irrep_set(irreps: Sequence[Irrep], tol: float = TOL) -> None:
    """Validate a complete irrep set: each passes, dims square-sum, cross-Schur."""
    if not irreps:
        raise IncompleteIrrepSet("no irreps supplied")
    G = irreps[0].group
    total = sum(pi.dim ** 2 for pi in irreps)
    if total != G.order:
        raise IncompleteIrrepSet(
            f"sum of squared dims {total} != |G| = {G.order}")
    for pi in irreps:
        rep = verify_irrep(pi, tol)
        if not rep.passed:
            raise IrrepValidationFailure(
                f"irrep {pi.name}: hom={rep.hom_violation:.2e} "
                f"unit={rep.unitarity_violation:.2e} schur={rep.schur_violation:.2e}")
    for i, a in enumerate(irreps):
        for b in irreps[i + 1:]:
            cross = np.einsum("gkl,gst->klst", a.matrices, b.matrices.conj())
            if np.abs(cross).max() > tol:
                raise IrrepValidationFailure(
                    f"irreps {a.name} and {b.name} are not Schur-orthogonal")


# ---------------------------------------------------------------------------
# Built-in irreps
# ---------------------------------------------------------------------------

def _abelian_characters(G: FiniteGroup) -> list[np.ndarray]:
    """All |G| characters of an abelian group, values per element index."""
    if G.order == 1:
        return [np.ones(1, dtype=complex)]
    # split off one cyclic quotient and extend characters of the subgroup
    from .groups import solvable_chain  # local import avoids module cycle at import time

    stage = solvable_chain(G).stages[0]
    split = stage.split
    H = stage.sub_view.group
    d = stage.quotient_order
    a_pow_d = 0
    for _ in range(d):
        a_pow_d = int(G.mul[a_pow_d, stage.generator])
    a_pow_d_child = stage.sub_view.to_child[a_pow_d]
    sub_chars = _abelian_characters(H)
    out = []
    omega = cmath.exp(2j * math.pi / d)
    for psi in sub_chars:
        z0 = psi[a_pow_d_child] ** (1.0 / d)
        for t in range(d):
            z = z0 * omega ** t
            chi = np.empty(G.order, dtype=complex)
            for g in G.elements():
                j, hc = split.split_child(g)
                chi[g] = z ** j * psi[hc]
            out.append(chi)
    return out


def _char_irreps(G: FiniteGroup, chars: list[np.ndarray], prefix: str) -> list[Irrep]:
    return [
        Irrep(group=G, dim=1, matrices=chi.reshape(-1, 1, 1).astype(complex),
              name=f"{prefix}{i}")
        for i, chi in enumerate(chars)
    ]


def _s3_irreps(G: FiniteGroup) -> list[Irrep]:
    """Irreps of S_3 on 3 letters: trivial, sign, and the 2-dim standard rep.

    The 2-dim matrices come from the permutation action on C^3 restricted to
    the zero-sum plane, expressed in the orthonormal basis
    e1 = (sqrt(2/3), -1/sqrt 6, -1/sqrt 6), e2 = (0, 1/sqrt 2, -1/sqrt 2).
    """
    n = G.order
    if n != 6 or G.is_abelian():
        raise IncompleteIrrepSet("group is not S_3")
    # recover the permutation of 3 letters for each element from the labels
    # independent route: compute the permutation action on the 3 transpositions
    # by conjugation; instead we rebuild one-line forms from scratch.
    import itertools

    perms = [tuple(p) for p in itertools.permutations(range(3))]
    # match table: element g corresponds to perms[g] by construction of symmetric_group
    basis = np.array([
        [math.sqrt(2.0 / 3.0), 0.0],
        [-1.0 / math.sqrt(6.0), 1.0 / math.sqrt(2.0)],
        [-1.0 / math.sqrt(6.0), -1.0 / math.sqrt(2.0)],
    ])
    triv = np.ones((n, 1, 1), dtype=complex)
    sign = np.empty((n, 1, 1), dtype=complex)
    two = np.empty((n, 2, 2), dtype=complex)
    for g, p in enumerate(perms):
        P = np.zeros((3, 3))
        for i in range(3):
            P[p[i], i] = 1.0  # e_i -> e_{p(i)}: a homomorphism for (g.h)(x)=g(h(x))
        sgn = np.linalg.det(P)
        sign[g, 0, 0] = sgn
        two[g] = basis.T @ P @ basis
    return [
        Irrep(group=G, dim=1, matrices=triv, name="triv"),
        Irrep(group=G, dim=1, matrices=sign, name="sign"),
        Irrep(group=G, dim=2, matrices=two, name="2d"),
    ]


def _dihedral_irreps(G: FiniteGroup, n: int) -> list[Irrep]:
    """Irreps of D_n for n = 4: four 1-dim characters plus one 2-dim rep."""
    if n != 4:
        raise IncompleteIrrepSet("built-in dihedral irreps cover D_4 only")
    order = 2 * n
    out: list[Irrep] = []
    for eps_r, eps_s in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
        chi = np.empty(order, dtype=complex)
        for k in range(n):
            chi[k] = eps_r ** k
            chi[n + k] = eps_s * eps_r ** k
        out.append(Irrep(group=G, dim=1,
                         matrices=chi.reshape(-1, 1, 1),
                         name=f"chi{'+' if eps_r > 0 else '-'}{'+' if eps_s > 0 else '-'}"))
    two = np.empty((order, 2, 2), dtype=complex)
    for k in range(n):
        th = 2.0 * math.pi * k / n
        two[k] = np.array([[math.cos(th), -math.sin(th)],
                           [math.sin(th), math.cos(th)]])
        # reflection x -> k - x is the planar reflection across angle pi*k/n
        al = math.pi * k / n
        two[n + k] = np.array([[math.cos(2 * al), math.sin(2 * al)],
                               [math.sin(2 * al), -math.cos(2 * al)]])
    out.append(Irrep(group=G, dim=2, matrices=two, name="2d"))
    return out


def builtin_irreps(G: FiniteGroup) -> list[Irrep]:
    """Complete validated irrep set for Z_d, S_3, D_4, or any abelian group."""
    if G.is_abelian():
        irreps = _char_irreps(G, _abelian_characters(G), "chi")
    elif G.order == 6:
        irreps = _s3_irreps(G)
    elif G.order == 8 and G.name.startswith("D"):
        irreps = _dihedral_irreps(G, 4)
    else:
        raise IncompleteIrrepSet(
            f"no built-in irreps for {G.name}; supply an irrep file")
    verify_irrep_set(irreps)
    return irreps


def centralizer_irreps(cd: ConjugacyClassData,
                       group_irreps: Sequence[Irrep] | None = None) -> list[Irrep]:
    """Irreps of the centralizer E(C).

    Abelian centralizers get generated characters; E(C) = G reuses the group
    irreps. Other nonabelian centralizers need a user irrep file.
    """
    E = cd.centralizer.group
    if E.order == cd.parent.order:
        # full group: child indexing coincides with the parent's
        if group_irreps is not None:
            return [Irrep(group=E, dim=pi.dim, matrices=pi.matrices, name=pi.name)
                    for pi in group_irreps]
        return builtin_irreps(E) if E.is_abelian() else [
            Irrep(group=E, dim=pi.dim, matrices=pi.matrices, name=pi.name)
            for pi in builtin_irreps(cd.parent)]
    if E.is_abelian():
        irreps = _char_irreps(E, _abelian_characters(E), "chi")
        verify_irrep_set(irreps)
        return irreps
    raise IncompleteIrrepSet(
        f"centralizer {E.name} is nonabelian and not the full group; "
        "supply an irrep file")


def anyon_labels(G: FiniteGroup,
                 group_irreps: Sequence[Irrep] | None = None) -> list[AnyonLabel]:
    """The complete anyon label set {(C, pi)} of the quantum double of G."""
    if group_irreps is None and not G.is_abelian():
        group_irreps = builtin_irreps(G)
    out = []
    for cd in conjugacy_classes(G):
        for pi in centralizer_irreps(cd, group_irreps):
            out.append(AnyonLabel(class_data=cd, irrep=pi))
    return out


# ---------------------------------------------------------------------------
# Irrep file format
# ---------------------------------------------------------------------------

def load_irrep_file(path: str | Path, G: FiniteGroup) -> Irrep:
    """Parse an irrep file: header 'group=<s> dim=d name=<s>', then |G| blocks
    of d lines of d comma-separated 're,im' entries in element-index order."""
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    header = dict(tok.split("=", 1) for tok in lines[0].split())
    d = int(header["dim"])
    name = header.get("name", Path(path).stem)
    vals = []
    for ln in lines[1:]:
        row = []
        for tok in ln.split():
            re_s, im_s = tok.split(",")
            row.append(complex(float(re_s), float(im_s)))
        vals.append(row)
    if len(vals) != G.order * d:
        raise IrrepValidationFailure(
            f"expected {G.order * d} matrix rows, found {len(vals)}")
    M = np.asarray(vals, dtype=complex).reshape(G.order, d, d)
    pi = Irrep(group=G, dim=d, matrices=M, name=name)
    report = verify_irrep(pi)
    if not report.passed:
        raise IrrepValidationFailure(f"irrep file {path} fails validation: {report}")
    return pi


def save_irrep_file(path: str | Path, pi: Irrep, group_file: str = "-") -> None:
    out = [f"group={group_file} dim={pi.dim} name={pi.name}"]
    for g in pi.group.elements():
        for row in pi.matrices[g]:
            out.append(" ".join(f"{z.real:.17g},{z.imag:.17g}" for z in row))
    Path(path).write_text("\n".join(out) + "\n")
