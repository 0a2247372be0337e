import math

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from thetagrid import GridSpec, omega_analytic_infinite, r_finite_hybrid, r_oracle
from thetagrid.finite_grid import (SWAP_NOME, image_displacements_in_ellipse, isotropic_point,
                                   mirror_images, r_theta_closed, theta_context)


@st.composite
def grid_and_pair(draw, max_side=25):
    lx = draw(st.integers(2, max_side))
    ly = draw(st.integers(2, max_side))
    alpha = draw(st.sampled_from([0.05, 0.3, 1.0, 2.0, 7.5, 40.0]))
    grid = GridSpec.from_alpha(lx, ly, alpha)
    s = (draw(st.integers(0, lx - 1)), draw(st.integers(0, ly - 1)))
    d = (draw(st.integers(0, lx - 1)), draw(st.integers(0, ly - 1)))
    return grid, s, d


class TestGridSpec:
    def test_derived(self):
        g = GridSpec(5, 4, r_h=3.0, r_v=1.5)
        assert g.alpha == 2.0 and g.r0 == 1.5 and g.node_count == 20
        h = GridSpec.from_alpha(5, 4, 0.25, r0=2.0)
        assert (h.r_h, h.r_v) == (0.5, 2.0)

    @pytest.mark.parametrize("kwargs", [
        dict(lx=1, ly=1), dict(lx=0, ly=5), dict(lx=3, ly=3, r_h=0.0),
        dict(lx=3, ly=3, r_v=-1.0), dict(lx=3, ly=3, r_h=float("inf")), dict(lx=2.5, ly=3)])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            GridSpec(**kwargs)

    def test_single_row_allowed(self):
        assert GridSpec(2, 1).node_count == 2

    def test_nodes_row_major(self):
        assert GridSpec(3, 2).nodes()[:4] == [(0, 0), (1, 0), (2, 0), (0, 1)]

    def test_check_node(self):
        g = GridSpec(3, 3)
        with pytest.raises(ValueError):
            g.check_node((3, 0))
        with pytest.raises(ValueError):
            g.check_node((0, -1))

    def test_transposed(self):
        t = GridSpec(7, 3, r_h=2.0, r_v=5.0).transposed()
        assert (t.lx, t.ly, t.r_h, t.r_v) == (3, 7, 5.0, 2.0)


class TestMirror:
    @pytest.mark.parametrize("node,expected", [
        ((0, 0), [(0, 0), (-1, 0), (0, -1), (-1, -1)]),
        ((3, 2), [(3, 2), (-4, 2), (3, -3), (-4, -3)]),
        ((4, 4), [(4, 4), (-5, 4), (4, -5), (-5, -5)]),
    ])
    def test_examples(self, node, expected):
        assert list(mirror_images(node)) == expected

    @given(st.integers(-50, 50), st.integers(-50, 50))
    def test_closed_under_reflection(self, x, y):
        family = set(mirror_images((x, y)))
        assert {(-a - 1, b) for a, b in family} == family
        assert {(a, -b - 1) for a, b in family} == family
        assert mirror_images((x, y))[0] == (x, y)

    @given(st.tuples(st.integers(-20, 20), st.integers(-20, 20)),
           st.tuples(st.integers(-20, 20), st.integers(-20, 20)),
           st.floats(0.01, 100.0))
    def test_isotropic_distance(self, a, b, alpha):
        dz = isotropic_point(a, alpha) - isotropic_point(b, alpha)
        dx, dy = a[0] - b[0], a[1] - b[1]
        assert abs(dz) ** 2 == pytest.approx(dx * dx + dy * dy / alpha, rel=1e-13, abs=1e-13)


class TestThetaContext:
    def test_square(self):
        ctx = theta_context(GridSpec(50, 50))
        assert ctx.tau == pytest.approx(1j)
        assert ctx.nome.real == pytest.approx(0.04321, abs=1e-5)
        assert not ctx.swapped

    def test_swap(self):
        ctx = theta_context(GridSpec(100, 2))
        assert ctx.swapped
        assert ctx.tau == pytest.approx(50j)

    def test_anisotropy_enters_as_inverse_root(self):
        # tau = i ly / (sqrt(alpha) lx): strong horizontal resistance shortens the
        # effective horizontal extent
        ctx = theta_context(GridSpec.from_alpha(10, 10, 100.0))
        assert ctx.tau == pytest.approx(0.1j)
        assert abs(ctx.nome) == pytest.approx(math.exp(-0.1 * math.pi))
        assert not ctx.swapped

    @given(st.integers(2, 400), st.integers(2, 400), st.floats(0.01, 100.0))
    def test_nome_bounded_after_rule(self, lx, ly, alpha):
        ctx = theta_context(GridSpec.from_alpha(lx, ly, alpha))
        assert abs(ctx.nome) <= SWAP_NOME
        assert ctx.tau.imag > 0


class TestClosedForm:
    def test_self_pair(self):
        assert r_theta_closed((2, 2), (2, 2), GridSpec(5, 5)) == 0.0

    def test_square_diagonal_against_oracle(self):
        g = GridSpec(50, 50)
        ref = r_oracle((0, 0), (25, 25), g)
        assert r_theta_closed((0, 0), (25, 25), g) == pytest.approx(ref, rel=5e-3)
        assert r_finite_hybrid((0, 0), (25, 25), g).resistance_ohms == pytest.approx(ref, rel=2.5e-3)

    def test_two_by_two_near_field(self):
        # far-field kernel only: a few percent off the exact 0.75
        value = r_theta_closed((0, 0), (1, 0), GridSpec(2, 2))
        assert value == pytest.approx(0.75, rel=0.05)

    @pytest.mark.parametrize("lx,ly,alpha", [(30, 10, 4.0), (30, 10, 0.25), (10, 30, 4.0), (40, 7, 0.1)])
    def test_anisotropic_rectangles(self, lx, ly, alpha):
        g = GridSpec.from_alpha(lx, ly, alpha)
        for s, d in (((0, 0), (lx - 1, ly - 1)), ((2, 1), (lx - 3, ly - 2))):
            assert r_theta_closed(s, d, g) == pytest.approx(r_oracle(s, d, g), rel=1e-2)

    @given(grid_and_pair())
    def test_reciprocity_and_positivity(self, case):
        grid, s, d = case
        assume(s != d)
        a = r_theta_closed(s, d, grid)
        assert a > 0
        assert r_theta_closed(d, s, grid) == pytest.approx(a, rel=1e-12)

    @given(grid_and_pair())
    def test_transpose_invariance(self, case):
        grid, s, d = case
        assume(s != d)
        direct = r_theta_closed(s, d, grid)
        assert r_theta_closed((s[1], s[0]), (d[1], d[0]), grid.transposed()) == pytest.approx(
            direct, rel=1e-9)

    @given(st.data())
    def test_swap_invariance(self, data):
        # 100x4 at alpha = 2 sits above the swap threshold
        grid = GridSpec.from_alpha(100, 4, 2.0)
        assert theta_context(grid).swapped
        s = (data.draw(st.integers(0, 99)), data.draw(st.integers(0, 3)))
        d = (data.draw(st.integers(0, 99)), data.draw(st.integers(0, 3)))
        assume(s != d)
        swapped = r_theta_closed(s, d, grid)
        assert r_theta_closed(s, d, grid, swap_nome=1.0) == pytest.approx(swapped, rel=1e-9)
        assert r_theta_closed((s[1], s[0]), (d[1], d[0]), grid.transposed()) == pytest.approx(
            swapped, rel=1e-9)

    def test_scales_with_r0(self):
        a = r_theta_closed((1, 2), (7, 3), GridSpec.from_alpha(9, 6, 3.0, r0=1.0))
        b = r_theta_closed((1, 2), (7, 3), GridSpec.from_alpha(9, 6, 3.0, r0=4.5))
        assert b == pytest.approx(4.5 * a, rel=1e-13)

    @pytest.mark.parametrize("d", [(1, 0), (3, 2), (10, 0), (7, 7), (0, 12)])
    def test_bulk_limit(self, d):
        g = GridSpec(201, 201)
        value = r_theta_closed((100, 100), (100 + d[0], 100 + d[1]), g)
        assert value == pytest.approx(omega_analytic_infinite(d, 1.0), rel=5e-3)


def brute_force(a, b, grid, limit, span=10):
    out = []
    for m in range(-span, span + 1):
        for n in range(-span, span + 1):
            for family, (bx, by) in enumerate(mirror_images(b), start=1):
                dx = a[0] - (bx + 2 * m * grid.lx)
                dy = a[1] - (by + 2 * n * grid.ly)
                if grid.alpha * dx * dx + dy * dy <= limit:
                    out.append((dx, dy, m, n, family))
    return sorted(out, key=lambda t: (t[2], t[3], t[4]))


class TestEllipse:
    def test_origin_example(self):
        g = GridSpec(4, 4)
        found = image_displacements_in_ellipse((0, 0), (0, 0), g, 25.0)
        assert (0, 0, 0, 0, 1) in found
        assert (1, 0, 0, 0, 2) in found
        assert (0, 1, 0, 0, 3) in found
        assert all(t.dx ** 2 + t.dy ** 2 <= 25 for t in found)
        assert [tuple(t) for t in found] == brute_force((0, 0), (0, 0), g, 25.0, span=4)

    def test_empty_ellipse(self):
        assert image_displacements_in_ellipse((1, 1), (2, 2), GridSpec(5, 5), 0.0) == []
        assert image_displacements_in_ellipse((1, 1), (2, 2), GridSpec(5, 5), -1.0) == []

    def test_far_corner(self):
        g = GridSpec.from_alpha(50, 50, 10.0)
        found = image_displacements_in_ellipse((0, 0), (49, 49), g, 250.0)
        assert found == brute_force((0, 0), (49, 49), g, 250.0)
        assert len(found) <= 2

    def test_inclusive_boundary(self):
        g = GridSpec.from_alpha(20, 20, 10.0)
        found = image_displacements_in_ellipse((5, 0), (0, 0), g, 250.0)
        assert (5, 0) in {(t.dx, t.dy) for t in found}

    @given(grid_and_pair(max_side=20), st.floats(0.0, 1.0))
    def test_matches_brute_force(self, case, frac):
        grid, a, b = case
        # keep the ellipse inside the brute-force window |m|, |n| <= 10
        cap = min(400.0, grid.alpha * (18 * grid.lx) ** 2, (18 * grid.ly) ** 2)
        limit = frac * cap
        got = [tuple(t) for t in image_displacements_in_ellipse(a, b, grid, limit)]
        assert got == brute_force(a, b, grid, limit)
