"""Cell taxonomy (pattern matching under the square's symmetries) and the
sampling certificates that rule out SOSPs cell by cell."""

from __future__ import annotations

from collections import Counter
from fractions import Fraction

import pytest

from sospgrid.box_certifier import (
    ALL_TRANSFORMS,
    ClassificationError,
    CornerData,
    boundary_prox_check,
    canonicalize,
    cell_corner_data,
    certify_cell,
    classify_all,
    classify_cell,
)
from sospgrid.color_field import Direction
from sospgrid.hard_instance import build
from sospgrid.iter_problems import IterInstance


def x_cells_of(inst):
    from sospgrid.color_field import ColorField
    field = ColorField(inst)
    return {(a, 6 * k + 2)
            for k in field.solutions
            for a in (6 * k - 3, 6 * k - 2, 6 * k - 1)}


def test_transform_group_structure():
    data = CornerData((Fraction(1), Fraction(7), Fraction(-2), Fraction(30)),
                      (Direction.UP, Direction.LEFT,
                       Direction.RIGHT, Direction.DOWN))
    for kind in (1, 2, 3, 4, 5):
        assert canonicalize(data, (kind, kind)) == data
    # quarter turn has order 4
    assert canonicalize(data, (6,)) != data
    assert canonicalize(data, (6, 6, 6, 6)) == data
    with pytest.raises(ValueError):
        canonicalize(data, (7,))


def test_corner_data_matches_field(inst_n1):
    data = cell_corner_data(inst_n1, 4, 7)
    assert len(data.values) == 4 and len(data.arrows) == 4
    assert all(isinstance(v, Fraction) for v in data.values)


def test_classify_rejects_out_of_range(inst_n1):
    with pytest.raises(ValueError):
        classify_cell(inst_n1, -1, 0)
    with pytest.raises(ValueError):
        classify_cell(inst_n1, 18, 0)


def test_classify_all_n1_census(inst_n1):
    labels = classify_all(inst_n1)
    N = 18
    assert len(labels) == N ** 2
    counts = Counter(lab.kind for lab in labels.values())
    assert counts["Boundary"] == 4 * (N - 1)
    assert counts["X"] == 3  # one solution, three cells around it
    assert {(a, b) for (a, b), lab in labels.items()
            if lab.kind == "X"} == x_cells_of(inst_n1)
    # every interior cell got a catalogued label (no ClassificationError)
    assert sum(counts.values()) == N ** 2


def test_classify_all_n2_census(inst_n2):
    labels = classify_all(inst_n2)
    N = 30
    counts = Counter(lab.kind for lab in labels.values())
    assert counts["Boundary"] == 4 * (N - 1)
    assert counts["X"] == 3 * 1  # solutions = {4}
    assert {(a, b) for (a, b), lab in labels.items()
            if lab.kind == "X"} == x_cells_of(inst_n2)


def test_boundary_has_precedence_over_patterns(inst_n1):
    assert classify_cell(inst_n1, 0, 9).kind == "Boundary"
    assert classify_cell(inst_n1, 9, 17).kind == "Boundary"


def test_transform_sequences_are_catalogued(inst_n1):
    labels = classify_all(inst_n1)
    for lab in labels.values():
        if lab.kind in ("X", "Boundary"):
            assert lab.transforms == ()
        else:
            assert lab.transforms in ALL_TRANSFORMS


def test_certify_interior_cell_passes(hard_n1):
    lab = classify_cell(hard_n1.instance, 9, 9)
    assert lab.kind not in ("X", "Boundary")
    rep = certify_cell(hard_n1, 9, 9, resolution=15)
    assert rep.passed
    assert rep.sample_count > 0
    assert rep.worst_margin > 0
    assert not rep.failing


def test_certify_x_cell_finds_sosp(hard_n1):
    # negative control: the cells encoding the solution contain an SOSP
    for (a, b) in x_cells_of(hard_n1.instance):
        rep = certify_cell(hard_n1, a, b, resolution=15)
        assert not rep.passed
        assert rep.failing


def test_boundary_prox_check(hard_n1):
    cells = [(0, 5), (17, 9), (9, 0), (9, 17)]
    reports = boundary_prox_check(hard_n1, cells=cells, resolution=7)
    assert len(reports) == len(cells)
    for rep in reports:
        assert rep.passed
