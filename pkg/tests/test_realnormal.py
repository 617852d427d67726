import math
import random

import numpy as np
import pytest

from eigenbouquet.algebra import parse_polynomial
from eigenbouquet.family import MatrixFamily, check_structure
from eigenbouquet.oracle import spectral_sample
from eigenbouquet.realnormal import (
    arcp_extract,
    complexified_eigenvalues,
    plane_invariant_checks,
    split_and_double,
)


def rotation_family():
    # [[x, y], [-y, x]]: similitude family, eigenvalues x +- i y
    return check_structure(
        MatrixFamily.from_strings([["x", "y"], ["-y", "x"]], ["x", "y"], "normal")
    )


def constant_skew(b0=2):
    return check_structure(
        MatrixFamily.from_strings(
            [["0", str(b0)], [str(-b0), "0"]], ["x"], "normal"
        )
    )


class TestSplitAndDouble:
    def test_constant_example(self):
        fam = check_structure(
            MatrixFamily.from_strings([["1", "2"], ["-2", "1"]], ["x"], "normal")
        )
        split = split_and_double(fam)
        u = fam.universe
        assert split.sym.entries[0][0] == parse_polynomial("1", u)
        assert split.sym.entries[0][1].is_zero()
        assert split.skew.entries[0][1] == parse_polynomial("2", u)
        assert split.skew.entries[1][0] == parse_polynomial("-2", u)

    def test_symmetric_input_zero_skew(self):
        fam = check_structure(
            MatrixFamily.from_strings([["x", "y"], ["y", "x"]], ["x", "y"], "normal")
        )
        split = split_and_double(fam)
        assert all(p.is_zero() for row in split.skew.entries for p in row)
        assert all(p.is_zero() for row in split.doubled.entries for p in row)

    def test_pure_skew_doubling(self):
        fam = check_structure(
            MatrixFamily.from_strings(
                [["0", "x^2 - 1"], ["1 - x^2", "0"]], ["x"], "normal"
            )
        )
        split = split_and_double(fam)
        assert all(p.is_zero() for row in split.sym.entries for p in row)
        d = split.doubled
        assert d.n == 4
        u = d.universe
        assert d.entries[0][3] == parse_polynomial("-(x^2 - 1)", u)
        assert d.entries[2][1] == parse_polynomial("x^2 - 1", u)
        # doubled operator is exactly symmetric (checked at construction)
        assert d.verified

    def test_recomposition_identity(self):
        split = split_and_double(rotation_family())
        for r in range(2):
            for c in range(2):
                total = split.sym.entries[r][c] + split.skew.entries[r][c]
                assert total == split.original.entries[r][c]


class TestDoubledEigenstructure:
    def test_spectrum_symmetric_about_zero(self):
        split = split_and_double(rotation_family())
        rng = random.Random(3)
        for _ in range(20):
            pt = {"x": rng.uniform(-2, 2), "y": rng.uniform(-2, 2)}
            vals = np.sort(spectral_sample(split.doubled_matrix(pt)).eigenvalues)
            paired = vals + vals[::-1]
            assert np.max(np.abs(paired)) <= 1e-10 * (1 + np.abs(vals).max())

    def test_squares_match_bbt(self):
        split = split_and_double(rotation_family())
        pt = {"x": 0.4, "y": -1.2}
        b2_vals = spectral_sample(split.doubled_matrix(pt)).eigenvalues
        bbt_vals = spectral_sample(
            split.skew_matrix(pt) @ split.skew_matrix(pt).T
        ).eigenvalues
        doubled = np.sort(np.concatenate([bbt_vals, bbt_vals]))
        assert np.allclose(np.sort(b2_vals**2), doubled, atol=1e-8)


class TestArcpExtract:
    def test_constant_skew_single_plane(self):
        split = split_and_double(constant_skew(2))
        dec = arcp_extract(split, {"x": 0.3})
        assert len(dec.planes) == 1 and not dec.real_spaces
        plane = dec.planes[0]
        assert abs(plane.a - 0.0) < 1e-10
        assert abs(plane.b - 2.0) < 1e-10
        assert plane.similitude_residual <= 1e-10
        assert dec.gram_residual <= 1e-10

    def test_rotation_family_plane(self):
        split = split_and_double(rotation_family())
        dec = arcp_extract(split, {"x": 0.7, "y": 1.1})
        assert len(dec.planes) == 1
        plane = dec.planes[0]
        assert abs(plane.a - 0.7) < 1e-9
        assert abs(plane.b - 1.1) < 1e-9

    def test_symmetric_input_pure_eigenspaces(self):
        fam = check_structure(
            MatrixFamily.from_strings([["x", "y"], ["y", "x"]], ["x", "y"], "normal")
        )
        split = split_and_double(fam)
        dec = arcp_extract(split, {"x": 1.0, "y": 0.5})
        assert not dec.planes
        values = sorted(s.value for s in dec.real_spaces)
        assert np.allclose(values, [0.5, 1.5], atol=1e-10)

    def test_block_fourdim_two_planes(self):
        fam = check_structure(
            MatrixFamily.from_strings(
                [
                    ["x", "y", "0", "0"],
                    ["-y", "x", "0", "0"],
                    ["0", "0", "2*x", "x*y"],
                    ["0", "0", "-x*y", "2*x"],
                ],
                ["x", "y"],
                "normal",
            )
        )
        split = split_and_double(fam)
        dec = arcp_extract(split, {"x": 0.9, "y": 0.6})
        assert len(dec.planes) == 2
        got = sorted((round(p.a, 8), round(abs(p.b), 8)) for p in dec.planes)
        assert got == [(0.9, 0.6), (1.8, 0.54)]
        for p in dec.planes:
            assert p.similitude_residual <= 1e-9
            assert p.invariance_residual <= 1e-9

    def test_matches_complexified_oracle(self):
        split = split_and_double(rotation_family())
        rng = random.Random(17)
        for _ in range(10):
            pt = {"x": rng.uniform(0.3, 2), "y": rng.uniform(0.3, 2)}
            dec = arcp_extract(split, pt)
            oracle = complexified_eigenvalues(split, pt)
            got = sorted((round(a, 8), round(b, 8)) for a, b, _ in dec.eigenvalues)
            want = sorted((round(a, 8), round(b, 8)) for a, b, _ in oracle)
            assert got == want


class TestPlaneChecks:
    def test_constant_skew_eigenpair(self):
        split = split_and_double(constant_skew(2))
        # B e2 = 2 e1 and B e1 = -2 e2, so (e2 + e1-part) pairs as u = e2, v = e1
        f = np.array([0.0, 1.0, 1.0, 0.0]) / math.sqrt(2)
        b2 = split.doubled_matrix({"x": 0.0})
        assert np.allclose(b2 @ f, 2.0 * f)
        record = plane_invariant_checks(split, {"x": 0.0}, 2.0, f)
        assert record.passes(1e-12)

    def test_swapped_pair_negative_eigenvalue(self):
        split = split_and_double(constant_skew(2))
        f = np.array([1.0, 0.0, 0.0, 1.0]) / math.sqrt(2)  # u = e1, v = e2
        b2 = split.doubled_matrix({"x": 0.0})
        assert np.allclose(b2 @ f, -2.0 * f)
        record = plane_invariant_checks(split, {"x": 0.0}, -2.0, f)
        assert record.passes(1e-12)

    def test_zero_eigenvalue_rejected(self):
        split = split_and_double(constant_skew(2))
        with pytest.raises(ValueError):
            plane_invariant_checks(split, {"x": 0.0}, 0.0, np.ones(4) / 2.0)
