"""Morphisms between persistence modules.

A morphism is stored as one exact matrix per grid index (a ladder of
commuting squares). Once both endpoints are in barcode bases, the whole
morphism compresses into a single matrix indexed by bars: entry (K, J) is the
coefficient with which the chain of the domain bar J hits the chain of the
codomain bar K, and it can only be nonzero when K starts no later than J and
the two bars overlap.
"""

from __future__ import annotations

from dataclasses import dataclass

from .fields import Matrix, mat_inverse, mat_mul
from .persistence import (
    BarcodeBasis,
    interval_lex_key,
    interval_overlap,
    shift,
)


@dataclass(frozen=True)
class LadderModule:
    """Componentwise morphism dom -> cod over the same grid."""

    dom: object
    cod: object
    comps: tuple

    def __post_init__(self):
        if self.dom.field != self.cod.field:
            raise ValueError("field mismatch")
        if self.dom.grid_len != self.cod.grid_len:
            raise ValueError("grid length mismatch")
        if len(self.comps) != self.dom.grid_len + 1:
            raise ValueError("expected %d components" % (self.dom.grid_len + 1))
        for t, c in enumerate(self.comps):
            if (c.rows, c.cols) != (self.cod.dims[t], self.dom.dims[t]):
                raise ValueError(
                    "component %d has shape %dx%d, expected %dx%d"
                    % (t, c.rows, c.cols, self.cod.dims[t], self.dom.dims[t])
                )

    @property
    def grid_len(self):
        return self.dom.grid_len

    @classmethod
    def from_int_comps(cls, dom, cod, int_comps):
        comps = tuple(
            Matrix.from_int_rows(dom.field, rows, cols=dom.dims[t])
            for t, rows in enumerate(int_comps)
        )
        return cls(dom, cod, comps)

    def is_zero(self):
        return all(c.is_zero() for c in self.comps)


def validate_ladder(lm):
    """Check every square commutes. Returns None, or a message naming the first
    failing index i (the square between levels i-1 and i)."""
    for i in range(1, lm.grid_len + 1):
        left = mat_mul(lm.comps[i], lm.dom.map_at(i))
        right = mat_mul(lm.cod.map_at(i), lm.comps[i - 1])
        if left != right:
            return "square %d does not commute" % i
    return None


def compose_ladder(outer, inner):
    if inner.cod != outer.dom:
        raise ValueError("composition endpoints do not match")
    return LadderModule(
        inner.dom,
        outer.cod,
        tuple(mat_mul(a, b) for a, b in zip(outer.comps, inner.comps)),
    )


def shift_morphism(lm, delta):
    """Reindex a morphism: component t of the result is component t+delta, and a
    zero map of the right shape once either side has left the grid."""
    dom, cod = shift(lm.dom, delta), shift(lm.cod, delta)
    l = lm.grid_len
    comps = []
    for t in range(l + 1):
        s = t + delta
        if 0 <= s <= l:
            comps.append(lm.comps[s])
        else:
            comps.append(Matrix.zero(lm.dom.field, cod.dims[t], dom.dims[t]))
    return LadderModule(dom, cod, tuple(comps))


def inner_ladder(m, delta):
    """The canonical morphism m -> m(delta) built from the structure maps."""
    if delta < 0:
        raise ValueError("delta must be >= 0")
    cod = shift(m, delta)
    l = m.grid_len
    comps = []
    for t in range(l + 1):
        if t + delta <= l:
            comps.append(m.inner_matrix(t, t + delta))
        else:
            comps.append(Matrix.zero(m.field, 0, m.dims[t]))
    return LadderModule(m, cod, tuple(comps))


def identity_ladder(m):
    comps = tuple(Matrix.identity(m.field, n) for n in m.dims)
    return LadderModule(m, m, comps)


@dataclass(frozen=True)
class MorphismMatrix:
    """Single-matrix presentation of a morphism in barcode bases.

    Rows are the codomain generators, columns the domain generators, both in
    lexicographic bar order. A nonzero entry requires the row bar to overlap
    the column bar from the left (row.a <= col.a <= row.b <= col.b).
    """

    row_gens: tuple
    col_gens: tuple
    entries: Matrix

    def __post_init__(self):
        rk = [interval_lex_key(g.bar) + (g.slot,) for g in self.row_gens]
        ck = [interval_lex_key(g.bar) + (g.slot,) for g in self.col_gens]
        if rk != sorted(rk) or ck != sorted(ck):
            raise ValueError("generators out of order")
        if (self.entries.rows, self.entries.cols) != (len(self.row_gens), len(self.col_gens)):
            raise ValueError("entry matrix shape mismatch")
        zero = self.entries.field.zero()
        for r, rg in enumerate(self.row_gens):
            for c, cg in enumerate(self.col_gens):
                if self.entries.get(r, c) != zero and not interval_overlap(rg.bar, cg.bar):
                    raise ValueError(
                        "entry (%s, %s) violates the support constraint" % (rg.bar, cg.bar)
                    )

    @property
    def field(self):
        return self.entries.field

    def entry(self, r, c):
        return self.entries.get(r, c)

    def support(self, c):
        """Codomain generators hit by domain generator number c."""
        zero = self.field.zero()
        return tuple(
            rg for r, rg in enumerate(self.row_gens) if self.entries.get(r, c) != zero
        )

    def __str__(self):
        lines = []
        for r, rg in enumerate(self.row_gens):
            cells = " ".join(self.field.fmt(self.entries.get(r, c))
                             for c in range(len(self.col_gens)))
            lines.append("%s | %s" % (rg.bar, cells))
        return "\n".join(lines)


def _check_basis(basis, module, which):
    if basis.change.apply(module) != basis.reduced:
        raise ValueError("%s basis does not reduce the %s module" % (which, which))


def to_single_matrix(lm, dom_basis, cod_basis):
    """Express a morphism as its single matrix over the given barcode bases."""
    _check_basis(dom_basis, lm.dom, "domain")
    _check_basis(cod_basis, lm.cod, "codomain")
    g_inv = [mat_inverse(g) for g in dom_basis.change.mats]
    P = [
        mat_mul(mat_mul(cod_basis.change.mats[t], lm.comps[t]), g_inv[t])
        for t in range(lm.grid_len + 1)
    ]
    field = lm.dom.field
    zero = field.zero()
    rows = []
    for rg in cod_basis.generators:
        row = []
        for cg in dom_basis.generators:
            lo = max(rg.bar.a, cg.bar.a)
            hi = min(rg.bar.b, cg.bar.b)
            if lo > hi:
                row.append(zero)
                continue
            vals = {P[t].get(rg.position_at(t), cg.position_at(t)) for t in range(lo, hi + 1)}
            if len(vals) != 1:
                raise ValueError(
                    "entry (%s, %s) is not constant along the overlap; "
                    "the components do not define a morphism in these bases"
                    % (rg.bar, cg.bar)
                )
            val = vals.pop()
            if val != zero and not interval_overlap(rg.bar, cg.bar):
                raise ValueError(
                    "nonzero coefficient at (%s, %s) breaks the support constraint"
                    % (rg.bar, cg.bar)
                )
            row.append(val)
        rows.append(row)
    entries = Matrix.from_rows(field, rows, cols=len(dom_basis.generators))
    return MorphismMatrix(tuple(cod_basis.generators), tuple(dom_basis.generators), entries)


def from_single_matrix(mm, dom, cod, dom_basis, cod_basis):
    """Rebuild componentwise maps from a single matrix, in the original
    coordinates of dom and cod."""
    _check_basis(dom_basis, dom, "domain")
    _check_basis(cod_basis, cod, "codomain")
    if tuple(g.bar for g in mm.col_gens) != tuple(g.bar for g in dom_basis.generators):
        raise ValueError("column generators do not match the domain basis")
    if tuple(g.bar for g in mm.row_gens) != tuple(g.bar for g in cod_basis.generators):
        raise ValueError("row generators do not match the codomain basis")
    field = dom.field
    zero = field.zero()
    l = dom.grid_len
    comps = []
    h_inv = [mat_inverse(h) for h in cod_basis.change.mats]
    for t in range(l + 1):
        data = [[zero] * dom.dims[t] for _ in range(cod.dims[t])]
        for r, rg in enumerate(cod_basis.generators):
            if not rg.bar.contains_index(t):
                continue
            for c, cg in enumerate(dom_basis.generators):
                if not cg.bar.contains_index(t):
                    continue
                v = mm.entry(r, c)
                if v != zero:
                    data[rg.position_at(t)][cg.position_at(t)] = v
        P = Matrix.from_rows(field, data, cols=dom.dims[t])
        comps.append(mat_mul(mat_mul(h_inv[t], P), dom_basis.change.mats[t]))
    lm = LadderModule(dom, cod, tuple(comps))
    issue = validate_ladder(lm)
    assert issue is None, issue
    return lm


def compose_single(outer, inner):
    """Single matrix of a composite: multiply, then drop entries whose bars no
    longer overlap (those coefficients have empty common support)."""
    ok = [g.bar for g in outer.col_gens] == [g.bar for g in inner.row_gens] and [
        g.slot for g in outer.col_gens
    ] == [g.slot for g in inner.row_gens]
    if not ok:
        raise ValueError("inner codomain generators do not match outer domain")
    prod = mat_mul(outer.entries, inner.entries)
    zero = prod.field.zero()
    data = list(prod.data)
    n = prod.cols
    for r, rg in enumerate(outer.row_gens):
        for c, cg in enumerate(inner.col_gens):
            if data[r * n + c] != zero and not interval_overlap(rg.bar, cg.bar):
                data[r * n + c] = zero
    entries = Matrix(prod.field, prod.rows, prod.cols, data)
    return MorphismMatrix(outer.row_gens, inner.col_gens, entries)


@dataclass(frozen=True)
class InterleavingCertificate:
    """Witness that (phi, psi) is a delta-invertible pair: both triangle
    families were checked, and the two composites are kept for inspection."""

    delta: int
    dom_composite: tuple  # components of psi . phi : V -> V(2 delta)
    cod_composite: tuple  # components of phi(2 delta) . psi : W -> W(2 delta)


@dataclass(frozen=True)
class TriangleFailure:
    side: str  # "domain", "codomain" or "shape"
    index: int
    detail: str

    def __str__(self):
        if self.side == "shape":
            return "shape mismatch: %s" % self.detail
        return "triangle %s t=%d: %s" % (self.side, self.index, self.detail)


def check_delta_invertible(phi, psi, delta):
    """Verify psi is a delta-inverse of phi: V -> W.

    Requires psi: W -> V(2 delta). Both composite families must equal the
    structure maps across 2 delta. Returns a certificate or the first failure.
    """
    if delta < 0:
        raise ValueError("delta must be >= 0")
    V, W = phi.dom, phi.cod
    if psi.dom != W:
        return TriangleFailure("shape", -1, "inverse domain is not the codomain module")
    if psi.cod != shift(V, 2 * delta):
        return TriangleFailure(
            "shape", -1, "inverse codomain is not the domain shifted by %d" % (2 * delta)
        )
    l = V.grid_len
    dom_comp = []
    cod_comp = []
    for t in range(l + 1):
        got = mat_mul(psi.comps[t], phi.comps[t])
        if t + 2 * delta <= l:
            want = V.inner_matrix(t, t + 2 * delta)
        else:
            want = Matrix.zero(V.field, 0, V.dims[t])
        if got != want:
            return TriangleFailure(
                "domain", t, "psi_t . phi_t differs from the structure map across 2*delta"
            )
        dom_comp.append(got)
    for t in range(l + 1):
        if t + 2 * delta <= l:
            got = mat_mul(phi.comps[t + 2 * delta], psi.comps[t])
            want = W.inner_matrix(t, t + 2 * delta)
        else:
            got = Matrix.zero(W.field, 0, W.dims[t])
            want = got
        if got != want:
            return TriangleFailure(
                "codomain", t, "phi_(t+2*delta) . psi_t differs from the structure map"
            )
        cod_comp.append(got)
    return InterleavingCertificate(delta, tuple(dom_comp), tuple(cod_comp))


def check_interleaving(phi, psi, delta):
    """Verify a delta-interleaving given phi: V -> W(delta) and psi: W -> V(delta).

    The pair is rewritten so that psi starts at W(delta), which reduces the
    triangle checks to a delta-invertibility check of phi.
    """
    if delta < 0:
        raise ValueError("delta must be >= 0")
    V, W = phi.dom, psi.dom
    if phi.cod != shift(W, delta):
        return TriangleFailure("shape", -1, "phi codomain is not psi domain shifted by %d" % delta)
    if psi.cod != shift(V, delta):
        return TriangleFailure("shape", -1, "psi codomain is not phi domain shifted by %d" % delta)
    psi_shifted = shift_morphism(psi, delta)
    return check_delta_invertible(phi, psi_shifted, delta)
