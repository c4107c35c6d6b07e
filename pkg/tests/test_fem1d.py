import numpy as np
import pytest

from distorder.errors import (
    DomainError,
    MeshMismatchError,
    NotApplicableError,
    SingularMatrixError,
)
from distorder.fem1d import (
    FemSystem,
    InitialData,
    Mesh1D,
    data_l2_norm,
    error_norms,
    fe_h1_seminorm,
    fe_l2_norm,
    l2_project,
    project_initial,
    prolong,
    ritz_project,
    solve_helmholtz,
    solve_sym_tridiag,
)

from oracles import dense_helmholtz, dense_mass_stiffness, p1_function_error


class TestMeshAndMatrices:
    def test_mesh_basics(self):
        mesh = Mesh1D(8)
        assert mesh.h == 0.125
        assert mesh.dof == 7
        assert np.allclose(mesh.interior_nodes, np.arange(1, 8) / 8)

    def test_mesh_too_small(self):
        with pytest.raises(DomainError):
            Mesh1D(1)

    @pytest.mark.parametrize("M", [2, 3, 4])
    def test_matrices_match_assembled_oracle(self, M):
        sys_m = FemSystem.build(M)
        mass, stiff = dense_mass_stiffness(M)
        assert np.allclose(sys_m.mass.toarray(), mass, rtol=1e-15)
        assert np.allclose(sys_m.stiffness.toarray(), stiff, rtol=1e-15)

    def test_mass_positive_definite(self):
        sys_m = FemSystem.build(17)
        rng = np.random.default_rng(0)
        for _ in range(5):
            v = rng.standard_normal(16)
            assert v @ (sys_m.mass @ v) > 0.0

    def test_stiffness_interior_row_sums(self):
        sys_m = FemSystem.build(12)
        rows = sys_m.stiffness.toarray().sum(axis=1)
        assert np.allclose(rows[1:-1], 0.0, atol=1e-12)

    def test_stiffness_annihilates_identity_in_interior(self):
        # second difference of x_i vanishes away from the boundary rows;
        # the last row picks up the missing x_M = 1 contribution, 1/h
        sys_m = FemSystem.build(10)
        out = sys_m.stiffness @ sys_m.mesh.interior_nodes
        assert np.allclose(out[:-1], 0.0, atol=1e-12)
        assert out[-1] == pytest.approx(1.0 / sys_m.mesh.h, rel=1e-12)


class TestL2Projection:
    def test_hat_function_projects_to_unit_vector(self):
        sys_m = FemSystem.build(8)
        j = 3
        h = sys_m.mesh.h

        def hat(x):
            return np.clip(1.0 - np.abs(x / h - (j + 1)), 0.0, None)

        p = l2_project(sys_m, InitialData.custom(hat))
        e = np.zeros(7)
        e[j] = 1.0
        assert np.allclose(p, e, atol=1e-12)

    def test_smooth_sin_rate_two(self):
        v = InitialData.smooth_sin()
        errs = []
        for M in (10, 20):
            p = l2_project(FemSystem.build(M), v)
            errs.append(p1_function_error(None, p, v.fn))
        rate = np.log2(errs[0] / errs[1])
        assert rate == pytest.approx(2.0, abs=0.1)

    def test_indicator_symmetric_complement(self):
        sys_m = FemSystem.build(16)
        p = l2_project(sys_m, InitialData.indicator_half())
        p_one = l2_project(sys_m, InitialData.custom(lambda x: np.ones_like(x)))
        assert np.allclose(p + p[::-1], p_one, atol=1e-12)

    def test_galerkin_orthogonality(self):
        # (v - P_h v, phi_i) = 0, re-evaluated with a fine trapezoid rule
        sys_m = FemSystem.build(9)
        v = InitialData.smooth_sin()
        p = l2_project(sys_m, v)
        xs = np.linspace(0.0, 1.0, 20001)
        h = sys_m.mesh.h
        full = np.zeros(sys_m.mesh.M + 1)
        full[1:-1] = p
        ph = np.interp(xs, np.arange(sys_m.mesh.M + 1) * h, full)
        diff = v.fn(xs) - ph
        for i in (1, 4, 8):
            phi = np.clip(1.0 - np.abs(xs / h - i), 0.0, None)
            assert abs(np.trapezoid(diff * phi, xs)) < 1e-8

    def test_singular_data_projection_is_finite_and_converges(self):
        v = InitialData.singular_pow()
        errs = []
        for M in (20, 40):
            p = l2_project(FemSystem.build(M), v)
            assert np.all(np.isfinite(p))
            errs.append(p1_function_error(None, p, v.fn))
        # x**(-1/4) sits just below H^(1/4+1/2); L2 rate is reduced accordingly
        assert errs[1] < errs[0]


class TestRitzProjection:
    def test_quadratic_equals_interpolant(self):
        sys_m = FemSystem.build(7)
        v = InitialData.custom(lambda x: x * (1 - x), dfn=lambda x: 1 - 2 * x,
                               smooth=True)
        r = ritz_project(sys_m, v)
        nodes = sys_m.mesh.interior_nodes
        assert np.allclose(r, nodes * (1 - nodes), atol=1e-13)

    def test_sin_equals_interpolant_and_h1_rate(self):
        v = InitialData.smooth_sin()
        errs = []
        for M in (10, 20):
            sys_m = FemSystem.build(M)
            r = ritz_project(sys_m, v)
            assert np.allclose(r, v.fn(sys_m.mesh.interior_nodes), atol=1e-12)
            # H1-seminorm error of the interpolant
            xs = sys_m.mesh.h
            full = np.zeros(M + 1)
            full[1:-1] = r
            slopes = np.diff(full) / xs
            gx, gw = np.polynomial.legendre.leggauss(6)
            gx = 0.5 * (gx + 1.0)
            gw = 0.5 * gw
            total = 0.0
            for e in range(M):
                x = (e + gx) * xs
                total += xs * np.dot(gw, (v.dfn(x) - slopes[e]) ** 2)
            errs.append(np.sqrt(total))
        assert np.log2(errs[0] / errs[1]) == pytest.approx(1.0, abs=0.1)

    def test_hat_projects_to_unit_vector(self):
        sys_m = FemSystem.build(6)
        h = sys_m.mesh.h
        j = 2

        def hat(x):
            return np.clip(1.0 - np.abs(x / h - (j + 1)), 0.0, None)

        def dhat(x):
            out = np.zeros_like(x)
            out[(x > j * h) & (x < (j + 1) * h)] = 1.0 / h
            out[(x >= (j + 1) * h) & (x < (j + 2) * h)] = -1.0 / h
            return out

        r = ritz_project(sys_m, InitialData.custom(hat, dfn=dhat, smooth=True))
        e = np.zeros(5)
        e[j] = 1.0
        assert np.allclose(r, e, atol=1e-10)

    @pytest.mark.parametrize("v", [InitialData.indicator_half(),
                                   InitialData.singular_pow()])
    def test_not_applicable(self, v):
        with pytest.raises(NotApplicableError):
            ritz_project(FemSystem.build(8), v)

    def test_project_initial_dispatch(self):
        sys_m = FemSystem.build(8)
        v = InitialData.smooth_sin()
        assert np.allclose(project_initial(sys_m, v), ritz_project(sys_m, v))
        w = InitialData.indicator_half()
        assert np.allclose(project_initial(sys_m, w), l2_project(sys_m, w))


class TestHelmholtzSolve:
    def test_pure_poisson_recovery(self):
        sys_m = FemSystem.build(16)
        rng = np.random.default_rng(5)
        y = rng.standard_normal(15)
        # rhs = mass^{-1} stiffness y, so the s=0 solve returns y
        rhs = solve_sym_tridiag(sys_m.mass.diag, sys_m.mass.off,
                                sys_m.stiffness @ y)
        assert np.allclose(solve_helmholtz(sys_m, 0.0, rhs), y, rtol=1e-10)

    def test_matches_dense_oracle_small(self):
        sys_m = FemSystem.build(4)
        rhs = np.array([1.0, 0.0, 0.0])
        got = solve_helmholtz(sys_m, 1.0, rhs)
        ref = dense_helmholtz(4, 1.0, rhs)
        assert np.allclose(got, ref, rtol=1e-12)

    def test_residual_and_conjugate_symmetry(self):
        sys_m = FemSystem.build(64)
        rng = np.random.default_rng(9)
        rhs = rng.standard_normal(63) + 1j * rng.standard_normal(63)
        s = 10.0 + 10.0j
        phi = solve_helmholtz(sys_m, s, rhs)
        a_diag = s * sys_m.mass.diag + sys_m.stiffness.diag
        a_off = s * sys_m.mass.off + sys_m.stiffness.off
        b = sys_m.mass @ rhs
        res = b.copy()
        res -= a_diag * phi
        res[:-1] -= a_off * phi[1:]
        res[1:] -= a_off * phi[:-1]
        assert np.max(np.abs(res)) <= 1e-12 * np.max(np.abs(b))
        phi_conj = solve_helmholtz(sys_m, np.conj(s), np.conj(rhs))
        assert np.allclose(phi_conj, np.conj(phi), rtol=1e-13)

    def test_linearity(self):
        sys_m = FemSystem.build(32)
        rng = np.random.default_rng(13)
        r1 = rng.standard_normal(31)
        r2 = rng.standard_normal(31)
        s = 3.0 - 2.0j
        lhs = solve_helmholtz(sys_m, s, 2.0 * r1 - 0.5 * r2)
        rhs = 2.0 * solve_helmholtz(sys_m, s, r1) - 0.5 * solve_helmholtz(sys_m, s, r2)
        assert np.allclose(lhs, rhs, rtol=1e-12)

    def test_singular_shift_raises(self):
        sys_m = FemSystem.build(2)  # single unknown: diag = s*2h/3 + 2/h
        s = -float(sys_m.stiffness.diag[0] / sys_m.mass.diag[0])
        with pytest.raises(SingularMatrixError):
            solve_helmholtz(sys_m, s, np.array([1.0]))


class TestNorms:
    def test_identical_functions_zero_error(self):
        fine, coarse = Mesh1D(8), Mesh1D(4)
        u = np.array([0.3, -0.2, 0.4])
        up = prolong(coarse, u, fine)
        assert error_norms(fine, up, coarse, u) == (0.0, 0.0)

    def test_sin_interpolant_norms(self):
        mesh = Mesh1D(1024)
        vals = np.sin(2 * np.pi * mesh.interior_nodes)
        l2, h1 = error_norms(mesh, vals, Mesh1D(2), np.zeros(1))
        assert l2 == pytest.approx(1.0 / np.sqrt(2.0), abs=1e-4)
        assert h1 == pytest.approx(2.0 * np.pi / np.sqrt(2.0), abs=1e-4)

    def test_hand_computed_hat_difference(self):
        # coarse hat on M=2 against zero on M=4: L2 = 1/sqrt(3), H1 = 2
        l2, h1 = error_norms(Mesh1D(4), np.zeros(3), Mesh1D(2), np.array([1.0]))
        assert l2 == pytest.approx(1.0 / np.sqrt(3.0), rel=1e-14)
        assert h1 == pytest.approx(2.0, rel=1e-14)

    def test_mesh_mismatch(self):
        with pytest.raises(MeshMismatchError):
            error_norms(Mesh1D(6), np.zeros(5), Mesh1D(4), np.zeros(3))

    def test_fe_norms_match_error_norms(self):
        mesh = Mesh1D(10)
        rng = np.random.default_rng(1)
        u = rng.standard_normal(9)
        l2, h1 = error_norms(mesh, u, Mesh1D(5), np.zeros(4))
        assert fe_l2_norm(mesh, u) == pytest.approx(l2, rel=1e-14)
        assert fe_h1_seminorm(mesh, u) == pytest.approx(h1, rel=1e-14)

    def test_data_norms(self):
        assert data_l2_norm(InitialData.smooth_sin()) == pytest.approx(
            1.0 / np.sqrt(2.0), rel=1e-12)
        assert data_l2_norm(InitialData.indicator_half()) == pytest.approx(
            1.0 / np.sqrt(2.0), rel=1e-12)
        assert data_l2_norm(InitialData.singular_pow()) == pytest.approx(
            np.sqrt(2.0), rel=1e-7)
