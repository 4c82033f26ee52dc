#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
输入文件解析测试
错误位置、规范化输出的幂等性、环文件
"""

from pathlib import Path

import pytest

from geometry import FINITE_POINTS, K_PLUS_IDEAL
from tiling_parser import (
    DEFAULT_PERIOD, ParseError, TilingFile, format_tiling_file, is_ring_file, load, parse, parse_ring,
    resolve_path,
)

DATA = Path(__file__).parent / "data"
TILINGS = sorted(DATA.glob("*.tiling"))

HEADER = "tiling t\nvertex 1\nvertex 2\n"


def test_parse_conifold():
    tf = load(str(DATA / "conifold.tiling"))
    assert isinstance(tf, TilingFile)
    assert tf.name == "conifold"
    assert tf.quiver.vertices == ("1", "2")
    assert len(tf.quiver.arrows) == 4
    assert len(tf.quiver.faces) == 2
    assert tf.period == ((-1, 1), (-1, -1))
    assert tf.square
    assert tf.quiver.grid_map == {"1": (0, 0), "2": (1, 0)}
    assert not tf.has_contraction


def test_contract_lines_are_unioned():
    tf = load(str(DATA / "conifold_hexagons.tiling"))
    assert tf.contracted == ("D1b", "U2b")
    text = (DATA / "conifold_triangles.tiling").read_text(encoding="utf-8") + "\ncontract R1\n"
    assert parse(text).contracted == ("R1", "delta")


def test_unknown_arrow_in_face_reports_position():
    text = HEADER + "arrow a 1 2 0 0\narrow b 2 1 0 0\nface + a b9\n"
    with pytest.raises(ParseError) as info:
        parse(text)
    assert (info.value.line, info.value.column) == (6, 10)
    assert "b9" in str(info.value)


def test_unknown_vertex_in_arrow():
    with pytest.raises(ParseError) as info:
        parse(HEADER + "arrow a 1 7 0 0\n")
    assert (info.value.line, info.value.column) == (4, 11)


def test_unknown_keyword():
    with pytest.raises(ParseError) as info:
        parse(HEADER + "  edge a 1 2\n")
    assert (info.value.line, info.value.column) == (4, 3)


def test_duplicate_ids():
    with pytest.raises(ParseError) as info:
        parse(HEADER + "vertex 2\n")
    assert (info.value.line, info.value.column) == (4, 8)
    with pytest.raises(ParseError) as info:
        parse(HEADER + "arrow a 1 2 0 0\narrow a 2 1 0 0\n")
    assert (info.value.line, info.value.column) == (5, 7)


def test_arity_errors_point_at_keyword():
    with pytest.raises(ParseError) as info:
        parse(HEADER + "arrow a 1 2 0\n")
    assert (info.value.line, info.value.column) == (4, 1)
    with pytest.raises(ParseError):
        parse(HEADER + "face + \n")
    with pytest.raises(ParseError):
        parse(HEADER + "arrow a 1 2 x 0\n")


def test_partial_grid_is_rejected():
    """网格坐标要么全给，要么全省略"""
    with pytest.raises(ParseError) as info:
        parse("tiling t\nvertex 1 at 0 0\nvertex 2\n")
    assert (info.value.line, info.value.column) == (3, 8)


def test_missing_tiling_line():
    with pytest.raises(ParseError) as info:
        parse("vertex 1\n")
    assert (info.value.line, info.value.column) == (1, 1)
    with pytest.raises(ParseError):
        parse("tiling a\ntiling b\n")


def test_undeclared_label_variable():
    text = "tiling t\nvariables x y\nvertex v\narrow a v v 0 0 label z\n"
    with pytest.raises(ParseError) as info:
        parse(text)
    assert info.value.line == 4


def test_zero_label_is_rejected():
    with pytest.raises(ParseError) as info:
        parse("tiling t\nvertex v\narrow a v v 0 0 label 0\n")
    assert (info.value.line, info.value.column) == (3, 23)


def test_invalid_utf8():
    with pytest.raises(ParseError) as info:
        parse(b"tiling t\n\xff\xfe\n")
    assert (info.value.line, info.value.column) == (2, 1)


def test_invalid_utf8_position_counts_characters():
    with pytest.raises(ParseError) as info:
        parse("tiling t\nvertex év ".encode("utf-8") + b"\xff\n")
    assert (info.value.line, info.value.column) == (2, 11)


def test_bare_contract_line_is_rejected():
    with pytest.raises(ParseError) as info:
        parse("tiling t\nvertex v\narrow a v v 0 0\ncontract\n")
    assert (info.value.line, info.value.column) == (4, 1)
    assert "contract" in info.value.message


@pytest.mark.parametrize("path", TILINGS, ids=lambda p: p.stem)
def test_format_then_parse_is_idempotent(path):
    """parse(print(parse(f))) == parse(f)"""
    tf = parse(path.read_text(encoding="utf-8"))
    printed = format_tiling_file(tf)
    again = parse(printed)
    assert again == tf
    assert format_tiling_file(again) == printed


def test_default_period_is_not_printed():
    tf = parse(HEADER + "arrow a 1 2 0 0\n")
    assert tf.period == DEFAULT_PERIOD
    assert "period" not in format_tiling_file(tf)


def test_labels_follow_declared_variable_order():
    text = "tiling t\nvariables y x\nvertex v\narrow a v v 0 0 label x*y\n"
    lab = parse(text).labeling()
    assert lab.variables == ("y", "x")
    assert lab.label("a") == (1, 1)
    assert parse("tiling t\nvertex v\n").labeling() is None


def test_ring_files():
    pinch = parse_ring((DATA / "line_pinch.ring").read_text(encoding="utf-8"))
    assert pinch.form == K_PLUS_IDEAL
    assert pinch.ideal == ((1, 0),)
    points = load(str(DATA / "two_points.ring"))
    assert points.form == FINITE_POINTS
    assert len(points.points) == 2


def test_ring_file_errors():
    with pytest.raises(ParseError) as info:
        parse_ring("ring r\nvariables x\npoint 0\npoint 0\n")
    assert (info.value.line, info.value.column) == (4, 7)
    with pytest.raises(ParseError):
        parse_ring("ring r\nvariables x y\npoint 0\n")
    with pytest.raises(ParseError):
        parse_ring("ring r\nvariables x\nideal x\npoint 0\n")
    with pytest.raises(ParseError):
        parse_ring("ring r\nvariables x\nideal w\n")


def test_ring_detection():
    assert is_ring_file("a.ring", "")
    assert is_ring_file("a.txt", "# 注释\nring r\n")
    assert not is_ring_file("a.tiling", "tiling t\n")


def test_missing_file():
    with pytest.raises(FileNotFoundError):
        load(str(DATA / "no_such_file.tiling"))


def test_bare_name_resolves_into_data_dir(monkeypatch):
    """conifold -> data/conifold.tiling"""
    monkeypatch.chdir(DATA.parent)
    assert resolve_path("conifold") == str(Path("data") / "conifold.tiling")
    assert load("conifold").name == "conifold"
    assert load("two_points").form == FINITE_POINTS
