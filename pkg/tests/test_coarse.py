"""q-splittings, coarse interleavings, and grid refinement."""

import math

import pytest

from laddermod import (
    Barcode,
    InterleavingCertificate,
    Interval,
    LadderDecomposition,
    check_delta_invertible,
    coarse_decompose,
    coarse_interleaving,
    induce_coarse_morphism,
    induced_matching,
    nestedness,
    q_split,
    reduce_to_barcode_basis,
    refine_interval,
    refine_module,
    refine_morphism,
    validate_ladder,
)

I = Interval


def test_q_split_partitions_by_length(running):
    sp = q_split(running.V, 2)
    assert sp.q == 2
    assert sp.long_basis.barcode == Barcode([I(0, 4), I(1, 7)])
    assert sp.short_basis.barcode == Barcode([I(4, 4)])
    assert len(sp.long_basis.generators) + len(sp.short_basis.generators) == 3


def test_q_split_projections_and_inclusions(running):
    sp = q_split(running.V, 2)
    for lm in (sp.pr_long, sp.pr_short, sp.inc_long, sp.inc_short):
        assert validate_ladder(lm) is None
    assert sp.pr_long.dom == running.V and sp.pr_long.cod == sp.long
    assert sp.inc_short.dom == sp.short and sp.inc_short.cod == running.V
    # projection after inclusion is the identity on the long part
    for t in range(running.V.grid_len + 1):
        a = sp.pr_long.comps[t] * sp.inc_long.comps[t]
        assert a.rank() == sp.long.dims[t]
        z = sp.pr_short.comps[t] * sp.inc_long.comps[t]
        assert all(z.get(i, j) == 0 for i in range(z.rows) for j in range(z.cols))


def test_q_split_carries_origins(running):
    bb = running.bbV
    sp = q_split(running.V, 2, bb)
    assert {g.origin for g in sp.long_basis.generators} == {I(0, 4), I(1, 7)}
    assert {g.origin for g in sp.short_basis.generators} == {I(4, 4)}


def test_q_split_all_long_or_all_short(running):
    sp0 = q_split(running.V, 0)
    assert sp0.short_basis.barcode == Barcode([])
    sp99 = q_split(running.V, 99)
    assert sp99.long_basis.barcode == Barcode([])
    assert sp99.short_basis.barcode == running.bbV.barcode


def test_coarse_interleaving_even_q(running):
    sp = q_split(running.V, 2)
    ci = coarse_interleaving(sp)
    assert isinstance(ci.certificate, InterleavingCertificate)
    assert ci.certificate.delta == 1


def test_coarse_interleaving_rejects_odd_q(running):
    sp3 = q_split(running.V, 3)
    assert sp3.long_basis.barcode == Barcode([I(0, 4), I(1, 7)])
    with pytest.raises(ValueError) as exc:
        coarse_interleaving(sp3)
    assert "refine_module" in str(exc.value)


def test_induce_coarse_morphism_variants(running):
    for variant in ("target", "source", "both"):
        cm = induce_coarse_morphism(running.phi, running.psi_on, 1, 2, variant)
        assert cm.variant == variant
        assert cm.coarse_delta == 2
        assert isinstance(cm.certificate, InterleavingCertificate)
        assert check_delta_invertible(cm.phi, cm.psi, 2) == cm.certificate


def test_induce_coarse_morphism_rejects_uncertified(running):
    with pytest.raises(ValueError):
        induce_coarse_morphism(running.phi, running.psi_on, 2, 2, "both")


def test_coarse_decompose_running(running):
    for variant in ("target", "source", "both"):
        cd = coarse_decompose(
            running.phi,
            running.psi_on,
            1,
            2,
            variant,
            dom_split=q_split(running.V, 2, running.bbV),
            cod_split=q_split(running.W1, 2, running.bbW1),
        )
        assert isinstance(cd.result, LadderDecomposition)
        assert cd.bound() == 2
    cd_both = coarse_decompose(
        running.phi,
        running.psi_on,
        1,
        2,
        "both",
        dom_split=q_split(running.V, 2, running.bbV),
        cod_split=q_split(running.W1, 2, running.bbW1),
    )
    assert cd_both.inequality_ok
    assert cd_both.xi_dom == math.inf and cd_both.xi_cod == math.inf
    chi = induced_matching(
        cd_both.result,
        dom_barcode=running.bbV.barcode,
        cod_barcode=running.bbW.barcode,
    )
    assert chi.pairs == (((I(0, 4), I(1, 5)), 1), ((I(1, 7), I(1, 6)), 1))
    assert chi.unmatched_source == ((I(4, 4), 1),)
    assert chi.unmatched_target == ()


def test_coarse_inequality_is_sufficient_not_necessary(running):
    # with the full domain kept, Xi(V)=3 < 2*delta+q=4, yet the reduction
    # still happens to succeed
    cd = coarse_decompose(
        running.phi,
        running.psi_on,
        1,
        2,
        "target",
        dom_split=q_split(running.V, 2, running.bbV),
        cod_split=q_split(running.W1, 2, running.bbW1),
    )
    assert not cd.inequality_ok
    assert cd.xi_dom == 3
    assert isinstance(cd.result, LadderDecomposition)


def test_refine_module_doubles_grid(running):
    VR = refine_module(running.V)
    assert VR.grid_len == 2 * running.V.grid_len + 1
    bb = reduce_to_barcode_basis(VR)
    assert bb.barcode == Barcode([I(0, 9), I(2, 15), I(8, 9)])
    assert refine_interval(I(0, 4)) == I(0, 9)
    assert refine_interval(I(4, 4)) == I(8, 9)
    assert nestedness(bb.barcode) == 2 * nestedness(running.bbV.barcode)


def test_refine_morphism_doubles_certificates(running):
    phi_r = refine_morphism(running.phi)
    psi_r = refine_morphism(running.psi_on)
    assert validate_ladder(phi_r) is None
    assert validate_ladder(psi_r) is None
    assert isinstance(check_delta_invertible(phi_r, psi_r, 2), InterleavingCertificate)


def test_refined_odd_q_pipeline(running):
    # an odd q on the original grid becomes the even 2q after refinement
    phi_r = refine_morphism(running.phi)
    psi_r = refine_morphism(running.psi_on)
    cd = coarse_decompose(phi_r, psi_r, 2, 6, "both")
    assert isinstance(cd.result, LadderDecomposition)
    assert cd.coarse.coarse_delta == 5
