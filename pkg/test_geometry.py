#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
几何报告测试
U/W 轨迹、闭点的几何维数、维数等式与有限点粘合
"""

from fractions import Fraction
from pathlib import Path

import pytest

from geometry import (
    K_ADJOIN, K_PLUS_IDEAL, UNIQUE_MAXIMAL, UNKNOWN, SubalgebraPresentation, UnsupportedPresentationError,
    cone_faces, dimension_equalities, finite_point_gluing, geometric_dimension, geometry_report, lattice_rank,
    loci, minimal_covers, uniqueness_flag,
)
from tiling_core import MalformedInputError
from tiling_parser import parse_ring

DATA = Path(__file__).parent / "data"

CONIFOLD_S = ((1, 0, 1, 0), (0, 1, 1, 0), (1, 0, 0, 1), (0, 1, 0, 1))


def load_ring(name):
    return parse_ring((DATA / f"{name}.ring").read_text(encoding="utf-8"))


def test_pinched_line():
    """k + x·k[x, y]：直线 x = 0 压成一个点"""
    pres = load_ring("line_pinch")
    assert pres.s_line() == "S = k[x, y]"
    assert pres.r_line() == "R = k + (x)S"
    report = geometry_report(pres)
    assert report.loci.W_complement == "Z(x) = {x = 0}"
    assert report.loci.U_complement == report.loci.W_complement
    assert report.geometric_dimension == 1
    assert report.dimensions.common == 2
    assert report.uniqueness == UNIQUE_MAXIMAL
    assert report.birational


def test_pinched_origin_has_dimension_zero():
    pres = SubalgebraPresentation(("x", "y"), K_PLUS_IDEAL, ideal=((1, 0), (0, 1)))
    assert geometric_dimension(pres) == 0
    assert loci(pres).W_complement == "Z(x, y) = {x = y = 0}"


def test_minimal_covers():
    assert minimal_covers(3, [(1, 0, 0), (0, 1, 1)]) == [frozenset({0, 1}), frozenset({0, 2})]
    assert minimal_covers(2, [(0, 0)]) == []


def test_conifold_center_geometry():
    pres = load_ring("conifold_center")
    assert pres.s_line() == "S = x1*y1, x2*y1, x1*y2, x2*y2"
    assert pres.r_line() == "R = k + (x1*y1, x2*y1)S"
    report = geometry_report(pres)
    assert report.geometric_dimension == 2
    assert report.dimensions.common == 3
    assert report.uniqueness == UNKNOWN
    assert report.loci.W_complement == "Z(x1*y1, x2*y1) = {x1*y1 = x2*y1 = 0}"


def test_conifold_cone_faces():
    faces = cone_faces(CONIFOLD_S)
    assert lattice_rank(CONIFOLD_S) == 3
    assert max(f.dimension for f in faces) == 3
    facets = [f for f in faces if f.dimension == 2]
    assert len(facets) == 4
    assert all(len(f.generators) == 2 for f in facets)


def test_veronese_center_geometry():
    s = ((0, 0, 1), (2, 0, 0), (1, 1, 0), (0, 2, 0))
    pres = SubalgebraPresentation(("x", "y", "z"), K_PLUS_IDEAL, ideal=s[1:], s_generators=s)
    assert geometric_dimension(pres) == 1
    assert dimension_equalities(pres).common == 3
    assert uniqueness_flag(pres) == UNKNOWN


def test_two_glued_points():
    pres = load_ring("two_points")
    assert pres.r_line() == "R = k + (x)(x - 1)S"
    report = geometry_report(pres)
    assert report.loci.U_complement == "{0, 1}"
    assert report.geometric_dimension == 0
    assert report.dimensions.common == 1


def test_single_point_gives_S():
    pres = finite_point_gluing(["x"], [[0]])
    assert pres.r_line() == "R = S"
    assert loci(pres).U_complement == "∅"


def test_points_in_the_plane():
    pres = finite_point_gluing(["x", "y"], [[0, 0], [1, 1]])
    assert pres.r_line() == "R = k + (x, y)(x - 1, y - 1)S"
    assert geometric_dimension(pres) == 0


def test_rational_points_are_exact():
    pres = finite_point_gluing(["x"], [[Fraction(1, 2)], [2]])
    assert loci(pres).U_complement == "{1/2, 2}"


def test_duplicate_points_are_rejected():
    with pytest.raises(MalformedInputError):
        finite_point_gluing(["x"], [[1], [1]])
    with pytest.raises(MalformedInputError):
        finite_point_gluing(["x", "y"], [[1]])


def test_collapsed_lines():
    """k[x, (y)S]：只给出包含关系"""
    pres = load_ring("line_collapse")
    assert pres.form == K_ADJOIN
    assert pres.r_line() == "R = k[x, (y)S]"
    report = geometry_report(pres)
    assert not report.loci.exact
    assert report.loci.U_complement == "⊆ Z(y)"
    assert report.loci.collapsed == "{x = c1} ∩ Z(y)"
    assert report.geometric_dimension is None
    assert report.dimensions.common == 3


def test_unit_ideal():
    pres = SubalgebraPresentation(("x", "y"), K_PLUS_IDEAL, ideal=((0, 0),))
    assert pres.r_line() == "R = S"
    assert loci(pres).U_complement == "∅ (U = W = Max S)"
    with pytest.raises(UnsupportedPresentationError):
        geometric_dimension(pres)
    assert geometry_report(pres).geometric_dimension is None


def test_unsupported_presentations():
    with pytest.raises(UnsupportedPresentationError):
        SubalgebraPresentation(("x",), K_PLUS_IDEAL)
    with pytest.raises(UnsupportedPresentationError):
        SubalgebraPresentation(("x", "y"), K_PLUS_IDEAL, ideal=((1, 0),), s_generators=((1, 1),))
    with pytest.raises(UnsupportedPresentationError):
        SubalgebraPresentation(("x",), "monomial-sum", ideal=((1,),))
