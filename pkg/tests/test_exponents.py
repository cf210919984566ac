import math

import numpy as np
import pytest

from matelab import exponents as ex
from matelab.context import GammaContext

G83 = GammaContext.from_gamma2("8/3")
CTXS = [GammaContext(g) for g in (0.4, 1.0, math.sqrt(2), math.sqrt(8 / 3), 1.9)]


@pytest.mark.parametrize("ctx", CTXS)
def test_context_identities(ctx):
    assert max(abs(v) for v in ctx.identity_residuals().values()) < 1e-12


def test_context_errors_and_constructors():
    with pytest.raises(ValueError):
        GammaContext(2.0)
    with pytest.raises(ValueError):
        GammaContext(0.0)
    assert GammaContext.from_kappa_prime(6).gamma2 == pytest.approx(8 / 3, abs=1e-15)
    assert G83.kappa_prime == pytest.approx(6)


@pytest.mark.parametrize("ctx", CTXS)
def test_wedge_spot_values(ctx):
    g = ctx.gamma
    assert ex.wedge_from("alpha", g, ctx).W == pytest.approx(2, abs=1e-12)
    assert ex.wedge_from("alpha", g - 2 / g, ctx).W == pytest.approx(4, abs=1e-12)


@pytest.mark.parametrize("ctx", CTXS)
def test_round_trips(ctx):
    for W in (0.2, 1.0, 3.0, 7.5):
        w, c = ex.wedge_from("W", W, ctx), ex.cone_from("W", W, ctx)
        for name in ex.PARAM_NAMES:
            assert ex.wedge_from(name, getattr(w, name), ctx).W == pytest.approx(W, abs=1e-12)
            assert ex.cone_from(name, getattr(c, name), ctx).W == pytest.approx(W, abs=1e-12)


@pytest.mark.parametrize("ctx", CTXS)
def test_thin_iff(ctx):
    for W in (0.1, 0.5 * ctx.gamma2 - 1e-9, 0.5 * ctx.gamma2 + 1e-9, 3.0):
        w = ex.wedge_from("W", W, ctx)
        assert w.thin == (W < ctx.gamma2 / 2) == (1 < w.delta < 2)
    with pytest.raises(ValueError):
        ex.wedge_from("W", 0.0, ctx)


def test_cone_spot_values():
    for ctx in CTXS:
        g = ctx.gamma
        assert ex.cone_from("alpha", g, ctx).W == pytest.approx(4 - ctx.gamma2, abs=1e-12)
        assert ex.cone_from("W", 2 * g * ctx.chi, ctx).theta == pytest.approx(2 * math.pi, abs=1e-12)


@pytest.mark.parametrize("ctx", CTXS)
def test_zip_and_cut(ctx):
    g = ctx.gamma
    c, rho = ex.zip_wedge_to_cone(ex.wedge_from("W", 4.0, ctx), ctx)
    assert c.alpha == pytest.approx(g / 2, abs=1e-12) and rho == pytest.approx(2, abs=1e-12)
    c, _ = ex.zip_wedge_to_cone(ex.wedge_from("W", 4 - ctx.gamma2, ctx), ctx)
    assert c.alpha == pytest.approx(g, abs=1e-12)
    for W in (0.5, 2.0, 5.0):
        w = ex.wedge_from("W", W, ctx)
        back = ex.cut_cone_to_wedge(ex.zip_wedge_to_cone(w, ctx)[0], ctx)
        assert np.allclose(list(back.as_dict().values()), list(w.as_dict().values()), atol=1e-12)


def test_weld():
    total, rhos, _ = ex.weld([2, 2], G83)
    assert total == 4 and rhos == [0, 0]
    g2 = G83.gamma2
    total, _, _ = ex.weld([2 - g2 / 2, 2, 2 - g2 / 2, 2], G83)
    assert total == pytest.approx(8 - g2, abs=1e-12)
    assert ex.weld([1.3], G83)[0] == 1.3
    with pytest.raises(ValueError):
        ex.weld([1.0, -0.5], G83)


def test_kpz():
    assert ex.kpz(0.25, G83) == pytest.approx(1 / 8, abs=1e-12)
    assert ex.kpz_inverse(2.0, G83) == pytest.approx(1.5, abs=1e-12)
    for ctx in CTXS:
        assert ex.kpz(1.0, ctx) == pytest.approx(1.0, abs=1e-12)
        for D in (0.1, 0.7, 2.0):
            assert ex.kpz_inverse(ex.kpz(D, ctx), ctx) == pytest.approx(D, abs=1e-12)
            assert ex.kpz_dual(ex.dual(D, ctx), ctx) == pytest.approx(ex.kpz(D, ctx), abs=1e-12)
    with pytest.raises(ValueError):
        ex.kpz_inverse(-0.1, G83)


def test_fk_dictionary():
    f = ex.fk_dictionary(1)
    assert (f.kappa_prime, f.p, f.var_ratio) == pytest.approx((6, 1 / 3, 1 / 3), abs=1e-9)
    f = ex.fk_dictionary(2)
    assert f.kappa_prime == pytest.approx(16 / 3, abs=1e-9)
    assert f.p == pytest.approx(math.sqrt(2) - 1, abs=1e-9)
    assert f.var_ratio == pytest.approx(3 - 2 * math.sqrt(2), abs=1e-9)
    f = ex.fk_dictionary(4 - 1e-12)
    assert f.p == pytest.approx(0.5, abs=1e-6) and f.var_ratio == pytest.approx(0, abs=1e-6)
    for q in (0.5, 1.5, 3.0):
        f = ex.fk_dictionary(q)
        assert 2 + 2 * math.cos(8 * math.pi / f.kappa_prime) == pytest.approx(q, abs=1e-12)
        assert f.var_ratio == pytest.approx(1 - 2 * f.p, abs=1e-12)
    for q in (0, 4, -1):
        with pytest.raises(ValueError):
            ex.fk_dictionary(q)


def test_catalog_spot_values():
    cat = ex.exponent_catalog(G83)
    cut = [e for e in cat if e.name == "cut_points"][0]
    assert cut.dim == pytest.approx(0.75, abs=1e-12)
    dp = [e for e in cat if e.name == "double_points"][0]
    assert dp.dim == pytest.approx(0.75, abs=1e-12) and dp.Delta == pytest.approx(0.75, abs=1e-12)
    bm1 = [e for e in cat if e.name == "disconnection" and e.n == 1][0]
    assert bm1.x == pytest.approx(1 / 8, abs=1e-12)


@pytest.mark.parametrize("kp", [4.5, 16 / 3, 6.0, 7.0, 7.5])
def test_catalog_invariants(kp):
    ctx = GammaContext.from_kappa_prime(kp)
    for e in ex.exponent_catalog(ctx):
        assert ex.check_entry(e, ctx) < 1e-12
    cut = [e for e in ex.exponent_catalog(ctx) if e.name == "cut_points"][0]
    assert cut.dim == pytest.approx(3 - 3 * kp / 8, abs=1e-12)


def test_boundary_intersection_duality():
    for kp in (4.5, 6.0, 7.5):
        k = 16 / kp
        assert ex.slekr_dual_dimension(k) == pytest.approx(2 - 8 / kp, abs=1e-12)
