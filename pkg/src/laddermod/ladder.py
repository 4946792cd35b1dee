"""Matching-form reduction of a morphism's single matrix.

The allowed moves never change the isomorphism type of either endpoint:

* ops between rows of equal bars or columns of equal bars,
* adding a multiple of column K into column J when K overlap-precedes J,
* adding a multiple of row K into row J when J overlap-precedes K,
* scaling a row or column.

After a plain row or column addition, entries whose row bar does not
overlap-precede their column bar are dropped: such coefficients live over an
empty common support, and discarding them realizes the move as an honest
transformation of generators. Reaching a 0/1 matrix with at most one nonzero
entry per row and column splits the morphism into elementary summands: a pair
(K, J) per matched 1, a free domain bar per zero column, a free codomain bar
per zero row.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .fields import Matrix
from .morphism import MorphismMatrix, from_single_matrix, to_single_matrix
from .persistence import (
    BarcodeBasis,
    BasisChange,
    interval_lex_key,
    interval_overlap,
    nestedness,
    reduce_to_barcode_basis,
)


@dataclass(frozen=True)
class AdmissibleOp:
    kind: str  # AO1-col | AO1-row | AO2 | AO3 | scale-col | scale-row
    target: int
    source: int
    scalar: object

    def describe(self, mm):
        if self.kind == "scale-col":
            return "scale column %s by %s" % (
                mm.col_gens[self.target].bar, mm.field.fmt(self.scalar))
        if self.kind == "scale-row":
            return "scale row %s by %s" % (
                mm.row_gens[self.target].bar, mm.field.fmt(self.scalar))
        if self.kind in ("AO1-col", "AO2"):
            return "%s: column %s += %s * column %s" % (
                self.kind, mm.col_gens[self.target].bar,
                mm.field.fmt(self.scalar), mm.col_gens[self.source].bar)
        return "%s: row %s += %s * row %s" % (
            self.kind, mm.row_gens[self.target].bar,
            mm.field.fmt(self.scalar), mm.row_gens[self.source].bar)


def _masked(mm_rows, mm_cols, field, data):
    zero = field.zero()
    n = len(mm_cols)
    for r, rg in enumerate(mm_rows):
        for c, cg in enumerate(mm_cols):
            if data[r * n + c] != zero and not interval_overlap(rg.bar, cg.bar):
                data[r * n + c] = zero
    return data


def apply_op(mm, op):
    """Apply one admissible operation and drop unsupported coefficients."""
    field = mm.field
    zero = field.zero()
    nrows, ncols = len(mm.row_gens), len(mm.col_gens)
    data = list(mm.entries.data)
    k = op.kind
    if k in ("scale-col", "scale-row"):
        if op.scalar == zero:
            raise ValueError("scale by zero")
        if k == "scale-col":
            for r in range(nrows):
                data[r * ncols + op.target] = data[r * ncols + op.target] * op.scalar
        else:
            for c in range(ncols):
                data[op.target * ncols + c] = data[op.target * ncols + c] * op.scalar
    elif k in ("AO1-col", "AO2"):
        if op.target == op.source:
            raise ValueError("column op onto itself")
        tb = mm.col_gens[op.target].bar
        sb = mm.col_gens[op.source].bar
        if k == "AO1-col":
            if tb != sb:
                raise ValueError("AO1-col needs equal bars, got %s and %s" % (sb, tb))
        elif not interval_overlap(sb, tb):
            raise ValueError("AO2 needs %s to overlap-precede %s" % (sb, tb))
        for r in range(nrows):
            data[r * ncols + op.target] = (
                data[r * ncols + op.target] + op.scalar * data[r * ncols + op.source]
            )
        data = _masked(mm.row_gens, mm.col_gens, field, data)
    elif k in ("AO1-row", "AO3"):
        if op.target == op.source:
            raise ValueError("row op onto itself")
        tb = mm.row_gens[op.target].bar
        sb = mm.row_gens[op.source].bar
        if k == "AO1-row":
            if tb != sb:
                raise ValueError("AO1-row needs equal bars, got %s and %s" % (sb, tb))
        elif not interval_overlap(tb, sb):
            raise ValueError("AO3 needs %s to overlap-precede %s" % (tb, sb))
        for c in range(ncols):
            data[op.target * ncols + c] = (
                data[op.target * ncols + c] + op.scalar * data[op.source * ncols + c]
            )
        data = _masked(mm.row_gens, mm.col_gens, field, data)
    else:
        raise ValueError("unknown op kind %r" % k)
    return MorphismMatrix(mm.row_gens, mm.col_gens, Matrix(field, nrows, ncols, data))


def apply_ops(mm, ops):
    for op in ops:
        mm = apply_op(mm, op)
    return mm


def is_matching_form(mm):
    zero = mm.field.zero()
    one = mm.field.one()
    ncols = len(mm.col_gens)
    col_seen = [False] * ncols
    for r in range(len(mm.row_gens)):
        row_nz = [c for c in range(ncols) if mm.entry(r, c) != zero]
        if len(row_nz) > 1:
            return False
        for c in row_nz:
            if mm.entry(r, c) != one or col_seen[c]:
                return False
            col_seen[c] = True
    return True


@dataclass(frozen=True)
class ReductionFailure:
    """The scheduled reduction got stuck at one entry.

    certified is True when no single admissible row or column addition could
    clear the entry either (no usable source has a nonzero at the needed
    position), which is the blocking certificate. When certified is False the
    schedule failed but some one-step alternative existed; the exhaustive
    search is the arbiter in that case.
    """

    row: int
    col: int
    row_bar: object
    col_bar: object
    row_used: bool
    col_used: bool
    usable_rows: tuple
    usable_cols: tuple
    certified: bool
    ops: tuple
    stuck: object  # MorphismMatrix at the point of failure
    message: str

    def __str__(self):
        return self.message


def _blocking_failure(cur, ops, r, c, row_pivot, col_pivot):
    zero = cur.field.zero()
    rbar = cur.row_gens[r].bar
    cbar = cur.col_gens[c].bar
    usable_rows = tuple(
        k
        for k in range(len(cur.row_gens))
        if k != r
        and cur.entry(k, c) != zero
        and interval_overlap(rbar, cur.row_gens[k].bar)
    )
    usable_cols = tuple(
        k
        for k in range(len(cur.col_gens))
        if k != c
        and cur.entry(r, k) != zero
        and interval_overlap(cur.col_gens[k].bar, cbar)
    )
    certified = not usable_rows and not usable_cols
    msg = (
        "stuck at entry (row %s, column %s): %s; %s"
        % (
            rbar,
            cbar,
            "row and column already matched"
            if row_pivot[r] is not None and col_pivot[c] is not None
            else ("row already matched" if row_pivot[r] is not None else "column already matched"),
            "no admissible operation can clear it"
            if certified
            else "one-step alternatives exist outside the schedule",
        )
    )
    return ReductionFailure(
        r, c, rbar, cbar,
        row_pivot[r] is not None, col_pivot[c] is not None,
        usable_rows, usable_cols, certified, tuple(ops), cur, msg,
    )


def reduce_to_matching_form(mm, pivot_rule="first"):
    """Run the block schedule: column-bar blocks left to right, row-bar blocks
    bottom-up inside each. Returns (matching form, ops) or a ReductionFailure.

    pivot_rule picks which free entry of a block becomes the pivot ("first" or
    "last" in row-then-column order); every choice leads to the same matched
    pairs, the option exists to exercise that fact.
    """
    if pivot_rule not in ("first", "last"):
        raise ValueError("pivot_rule must be 'first' or 'last'")
    field = mm.field
    zero, one = field.zero(), field.one()
    cur = mm
    ops = []

    def do(op):
        nonlocal cur
        cur = apply_op(cur, op)
        ops.append(op)

    def blocks(gens):
        out = []
        for i, g in enumerate(gens):
            if out and out[-1][0] == g.bar:
                out[-1][1].append(i)
            else:
                out.append((g.bar, [i]))
        return out

    col_blocks = blocks(mm.col_gens)
    row_blocks = blocks(mm.row_gens)
    row_pivot = [None] * len(mm.row_gens)
    col_pivot = [None] * len(mm.col_gens)

    for cbar, cidx in col_blocks:
        for rbar, ridx in reversed(row_blocks):
            # first clear entries sitting in already matched rows or columns
            for r in ridx:
                for c in cidx:
                    v = cur.entry(r, c)
                    if v == zero:
                        continue
                    if row_pivot[r] is None and col_pivot[c] is None:
                        continue
                    done = False
                    if col_pivot[c] is not None:
                        src = col_pivot[c]
                        if interval_overlap(rbar, cur.row_gens[src].bar):
                            do(AdmissibleOp("AO3", r, src, -v / cur.entry(src, c)))
                            done = True
                    if not done and row_pivot[r] is not None:
                        src = row_pivot[r]
                        sbar = cur.col_gens[src].bar
                        if sbar == cbar:
                            do(AdmissibleOp("AO1-col", c, src, -v / cur.entry(r, src)))
                            done = True
                        elif interval_overlap(sbar, cbar):
                            do(AdmissibleOp("AO2", c, src, -v / cur.entry(r, src)))
                            done = True
                    if not done:
                        return _blocking_failure(cur, ops, r, c, row_pivot, col_pivot)
            # then match free rows against free columns inside the block
            while True:
                free = [
                    (r, c)
                    for r in ridx
                    for c in cidx
                    if row_pivot[r] is None
                    and col_pivot[c] is None
                    and cur.entry(r, c) != zero
                ]
                if not free:
                    break
                r, c = free[0] if pivot_rule == "first" else free[-1]
                v = cur.entry(r, c)
                if v != one:
                    do(AdmissibleOp("scale-col", c, c, one / v))
                for r2 in ridx:
                    if r2 != r and row_pivot[r2] is None and cur.entry(r2, c) != zero:
                        do(AdmissibleOp("AO1-row", r2, r, -cur.entry(r2, c)))
                for c2 in cidx:
                    if c2 != c and col_pivot[c2] is None and cur.entry(r, c2) != zero:
                        do(AdmissibleOp("AO1-col", c2, c, -cur.entry(r, c2)))
                row_pivot[r] = c
                col_pivot[c] = r

    assert is_matching_form(cur), "schedule finished but matrix is not in matching form"
    return cur, tuple(ops)


@dataclass(frozen=True)
class SearchResult:
    found: object  # MorphismMatrix in matching form, or None
    states: int
    exhausted: bool  # True when the whole reachable space was visited


def search_matching_form(mm, max_states=200000):
    """Exhaustive search over admissible single-entry clearings.

    Moves are forced-coefficient row/column additions (followed by the support
    mask) that strictly decrease a weighted count of nonzero entries; blocks
    early in the reduction schedule weigh exponentially more, so clearing an
    early entry always pays for any spill it causes further along. The search
    is sound: a returned matrix is a genuine matching form reached by
    admissible ops. It is not complete in principle, since a matching form
    reachable only through measure-increasing detours would be missed.
    """
    field = mm.field
    zero, one = field.zero(), field.one()
    nrows, ncols = len(mm.row_gens), len(mm.col_gens)

    def blocks(gens):
        out = []
        for i, g in enumerate(gens):
            if out and out[-1][0] == g.bar:
                out[-1][1].append(i)
            else:
                out.append((g.bar, [i]))
        return out

    col_blocks = blocks(mm.col_gens)
    row_blocks = blocks(mm.row_gens)
    order = {}
    k = 0
    for cbar, _ in col_blocks:
        for rbar, _ in reversed(row_blocks):
            order[(rbar, cbar)] = k
            k += 1
    nblocks = k
    base = max(nrows, ncols) + 2
    weight = {}
    for r in range(nrows):
        for c in range(ncols):
            blk = order[(mm.row_gens[r].bar, mm.col_gens[c].bar)]
            weight[(r, c)] = base ** (nblocks - blk)

    def measure(data):
        return sum(
            weight[(r, c)]
            for r in range(nrows)
            for c in range(ncols)
            if data[r * ncols + c] != zero
        )

    def is_pattern_matched(data):
        col_hit = [0] * ncols
        for r in range(nrows):
            nz = [c for c in range(ncols) if data[r * ncols + c] != zero]
            if len(nz) > 1:
                return False
            for c in nz:
                col_hit[c] += 1
                if col_hit[c] > 1:
                    return False
        return True

    col_ok = {}
    for s in range(ncols):
        for t in range(ncols):
            if s == t:
                continue
            sb, tb = mm.col_gens[s].bar, mm.col_gens[t].bar
            col_ok[(s, t)] = sb == tb or interval_overlap(sb, tb)
    row_ok = {}
    for s in range(nrows):
        for t in range(nrows):
            if s == t:
                continue
            sb, tb = mm.row_gens[s].bar, mm.row_gens[t].bar
            row_ok[(s, t)] = sb == tb or interval_overlap(tb, sb)

    def successors(data):
        m0 = measure(data)
        out = []
        for s in range(ncols):
            for t in range(ncols):
                if s == t or not col_ok[(s, t)]:
                    continue
                for r in range(nrows):
                    vs = data[r * ncols + s]
                    vt = data[r * ncols + t]
                    if vs == zero or vt == zero:
                        continue
                    alpha = -vt / vs
                    nd = list(data)
                    for rr in range(nrows):
                        nd[rr * ncols + t] = nd[rr * ncols + t] + alpha * nd[rr * ncols + s]
                    nd = _masked(mm.row_gens, mm.col_gens, field, nd)
                    if measure(nd) < m0:
                        out.append(tuple(nd))
        for s in range(nrows):
            for t in range(nrows):
                if s == t or not row_ok[(s, t)]:
                    continue
                for c in range(ncols):
                    vs = data[s * ncols + c]
                    vt = data[t * ncols + c]
                    if vs == zero or vt == zero:
                        continue
                    alpha = -vt / vs
                    nd = list(data)
                    for cc in range(ncols):
                        nd[t * ncols + cc] = nd[t * ncols + cc] + alpha * nd[s * ncols + cc]
                    nd = _masked(mm.row_gens, mm.col_gens, field, nd)
                    if measure(nd) < m0:
                        out.append(tuple(nd))
        return out

    seen = set()
    stack = [tuple(mm.entries.data)]
    states = 0
    truncated = False
    found = None
    while stack:
        data = stack.pop()
        if data in seen:
            continue
        seen.add(data)
        states += 1
        if is_pattern_matched(data):
            found = data
            break
        if states >= max_states:
            truncated = True
            break
        stack.extend(successors(data))

    if found is None:
        return SearchResult(None, states, not truncated and not stack)
    # normalize the matched pattern to honest 1s by column scalings
    nd = list(found)
    for c in range(ncols):
        col_entries = [(r, nd[r * ncols + c]) for r in range(nrows) if nd[r * ncols + c] != zero]
        if col_entries:
            r, v = col_entries[0]
            if v != one:
                for rr in range(nrows):
                    nd[rr * ncols + c] = nd[rr * ncols + c] / v
    out = MorphismMatrix(mm.row_gens, mm.col_gens, Matrix(field, nrows, ncols, nd))
    assert is_matching_form(out)
    return SearchResult(out, states, True)


def _op_basis_update(basis, op, mm, side):
    """Fold one admissible op into the recorded coordinate change of the
    corresponding endpoint: column ops rewrite the domain basis, row ops the
    codomain basis."""
    gens = mm.col_gens if side == "dom" else mm.row_gens
    mats = [g.to_lists() for g in basis.change.mats]
    k = op.kind
    if k == "scale-col" and side == "dom":
        gen = gens[op.target]
        inv = basis.reduced.field.one() / op.scalar
        for t in range(gen.bar.a, gen.bar.b + 1):
            p = gen.position_at(t)
            mats[t][p] = [inv * x for x in mats[t][p]]
    elif k == "scale-row" and side == "cod":
        gen = gens[op.target]
        for t in range(gen.bar.a, gen.bar.b + 1):
            p = gen.position_at(t)
            mats[t][p] = [op.scalar * x for x in mats[t][p]]
    elif k in ("AO1-col", "AO2") and side == "dom":
        tgt, src = gens[op.target], gens[op.source]
        lo = max(tgt.bar.a, src.bar.a)
        hi = min(tgt.bar.b, src.bar.b)
        for t in range(lo, hi + 1):
            ps, pt = src.position_at(t), tgt.position_at(t)
            mats[t][ps] = [x - op.scalar * y for x, y in zip(mats[t][ps], mats[t][pt])]
    elif k in ("AO1-row", "AO3") and side == "cod":
        tgt, src = gens[op.target], gens[op.source]
        lo = max(tgt.bar.a, src.bar.a)
        hi = min(tgt.bar.b, src.bar.b)
        for t in range(lo, hi + 1):
            ps, pt = src.position_at(t), tgt.position_at(t)
            mats[t][pt] = [x + op.scalar * y for x, y in zip(mats[t][pt], mats[t][ps])]
    else:
        return basis
    field = basis.reduced.field
    change = BasisChange(
        tuple(
            Matrix.from_rows(field, rows, cols=basis.reduced.dims[t])
            for t, rows in enumerate(mats)
        )
    )
    return BarcodeBasis(change, basis.barcode, basis.generators, basis.reduced)


@dataclass(frozen=True)
class LadderDecomposition:
    """Direct-sum decomposition of a morphism into elementary pieces."""

    dom_basis: object  # BarcodeBasis after folding in the column ops
    cod_basis: object  # BarcodeBasis after folding in the row ops
    matching: object  # MorphismMatrix in matching form
    ops: tuple
    pairs: tuple  # (codomain BarGenerator, domain BarGenerator) per matched 1
    plus_gens: tuple  # domain generators mapped to zero
    minus_gens: tuple  # codomain generators not hit

    def pair_intervals(self):
        """Matched (codomain bar, domain bar) pairs, on the grid."""
        return tuple(sorted(
            (interval_lex_key(cg.bar) + interval_lex_key(dg.bar) for cg, dg in self.pairs)
        ))

    def summands(self):
        """Human-readable summand list."""
        out = []
        for cg, dg in sorted(self.pairs, key=lambda p: p[1].sort_key()):
            out.append("R %s->%s" % (dg.bar, cg.bar))
        for g in self.plus_gens:
            out.append("I+ %s" % g.bar)
        for g in self.minus_gens:
            out.append("I- %s" % g.bar)
        return out


def decompose(lm, dom_basis=None, cod_basis=None, pivot_rule="first"):
    """Decompose a morphism of persistence modules into elementary summands.

    Reduction is attempted unconditionally; the nestedness precondition only
    guarantees success, it is not required for it. Returns a
    LadderDecomposition or the ReductionFailure from the matrix stage.
    """
    if dom_basis is None:
        dom_basis = reduce_to_barcode_basis(lm.dom)
    if cod_basis is None:
        cod_basis = reduce_to_barcode_basis(lm.cod)
    mm = to_single_matrix(lm, dom_basis, cod_basis)
    red = reduce_to_matching_form(mm, pivot_rule=pivot_rule)
    if isinstance(red, ReductionFailure):
        return red
    matched, ops = red
    for op in ops:
        dom_basis = _op_basis_update(dom_basis, op, matched, "dom")
        cod_basis = _op_basis_update(cod_basis, op, matched, "cod")
    zero = matched.field.zero()
    pairs = []
    used_rows = set()
    used_cols = set()
    for r, rg in enumerate(matched.row_gens):
        for c, cg in enumerate(matched.col_gens):
            if matched.entry(r, c) != zero:
                pairs.append((rg, cg))
                used_rows.add(r)
                used_cols.add(c)
    plus = tuple(g for c, g in enumerate(matched.col_gens) if c not in used_cols)
    minus = tuple(g for r, g in enumerate(matched.row_gens) if r not in used_rows)
    return LadderDecomposition(
        dom_basis, cod_basis, matched, ops, tuple(pairs), plus, minus
    )


@dataclass(frozen=True)
class NestednessReport:
    ok: bool
    delta: int
    xi_dom: object
    xi_cod: object

    def __str__(self):
        verdict = "ok" if self.ok else "warning: decomposition not guaranteed"
        return "2*delta=%s vs min nestedness=%s: %s" % (
            2 * self.delta, min(self.xi_dom, self.xi_cod), verdict)


def check_nestedness_precondition(lm, delta, dom_basis=None, cod_basis=None):
    """Sufficient condition for the reduction to succeed on a certified pair:
    twice delta must stay below the nestedness of both barcodes."""
    if dom_basis is None:
        dom_basis = reduce_to_barcode_basis(lm.dom)
    if cod_basis is None:
        cod_basis = reduce_to_barcode_basis(lm.cod)
    xi_d = nestedness(dom_basis.barcode)
    xi_c = nestedness(cod_basis.barcode)
    return NestednessReport(2 * delta < min(xi_d, xi_c), delta, xi_d, xi_c)


def verify_decomposition(lm, dec):
    """Rebuild the morphism from the matched matrix and the recorded bases and
    compare with the input, entrywise and exactly. Returns None or a message."""
    if not is_matching_form(dec.matching):
        return "stored matrix is not in matching form"
    for cg, dg in dec.pairs:
        if not interval_overlap(cg.bar, dg.bar):
            return "matched pair (%s, %s) breaks the support rule" % (cg.bar, dg.bar)
    dom_counts = dec.dom_basis.barcode.counts()
    cod_counts = dec.cod_basis.barcode.counts()
    for bar, mult in dom_counts.items():
        got = sum(1 for _, dg in dec.pairs if dg.bar == bar) + sum(
            1 for g in dec.plus_gens if g.bar == bar
        )
        if got != mult:
            return "domain bar %s occurs %d times, accounted %d" % (bar, mult, got)
    for bar, mult in cod_counts.items():
        got = sum(1 for cg, _ in dec.pairs if cg.bar == bar) + sum(
            1 for g in dec.minus_gens if g.bar == bar
        )
        if got != mult:
            return "codomain bar %s occurs %d times, accounted %d" % (bar, mult, got)
    try:
        rebuilt = from_single_matrix(
            dec.matching, lm.dom, lm.cod, dec.dom_basis, dec.cod_basis
        )
    except ValueError as e:
        return "reconstruction failed: %s" % e
    for t, (a, b) in enumerate(zip(rebuilt.comps, lm.comps)):
        if a != b:
            return "reconstructed component %d differs from the input" % t
    return None
