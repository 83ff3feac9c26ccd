import io
import math

import pytest
from hypothesis import given, strategies as st

import buildopt as bo
from buildopt.materials import CATALOG_HEADER


def test_default_catalog_counts(catalog):
    assert len(catalog.entries) == 12
    assert len(catalog.walls) == 8
    assert len(catalog.foundations) == 8
    assert len(catalog.roofs) == 2
    assert len(catalog.covers) == 2


def test_known_row_values(catalog):
    so2 = catalog.get(bo.ComponentClass.WALL, "So2")
    assert so2.density == 1330
    assert so2.unit_cost == 145
    assert so2.embodied_energy == 0.67
    assert so2.compressive_strength == 2.39
    assert so2.min_thickness == 0.30
    assert so2.grade == "G2"
    assert so2.family == "So"
    # bamboo has distinct records per class
    ba_roof = catalog.get(bo.ComponentClass.ROOF, "Ba")
    ba_cover = catalog.get(bo.ComponentClass.ROOF_COVER, "Ba")
    assert ba_roof.density == 1160 and ba_cover.density == 600


def test_empty_document_rejected():
    with pytest.raises(bo.CatalogError, match="empty"):
        bo.load_catalog(io.StringIO(""))


def test_negative_density_rejected():
    doc = CATALOG_HEADER + "\nBad,G1,wall,-1,10,1.0,2.0,0.3\n"
    with pytest.raises(bo.CatalogError, match="density"):
        bo.load_catalog(io.StringIO(doc))


def test_missing_field_rejected():
    doc = CATALOG_HEADER + "\nBad,G1,wall,1000,,1.0,2.0,0.3\n"
    with pytest.raises(bo.CatalogError, match="missing"):
        bo.load_catalog(io.StringIO(doc))


def test_strength_required_for_walls_only():
    doc = CATALOG_HEADER + (
        "\nW,G1,wall,1000,10,1.0,,0.3"
        "\nF,G1,foundation,1000,10,1.0,2.0,0.3"
        "\nR,n/a,roof,1000,10,1.0,,"
        "\nC,n/a,roof_cover,1000,10,1.0,,\n"
    )
    with pytest.raises(bo.CatalogError, match="compressive"):
        bo.load_catalog(io.StringIO(doc))


def test_roundtrip_identity(catalog):
    again = bo.load_catalog(io.StringIO(bo.serialize_catalog(catalog)))
    assert again == catalog


def test_filter_no_soil(catalog):
    filtered = bo.filter_available(catalog, {"So1", "So2"})
    assert len(filtered.walls) == 6
    assert len(filtered.foundations) == 6
    assert len(filtered.roofs) == 2


def test_filter_identity(catalog):
    assert bo.filter_available(catalog, []) == catalog


def test_filter_unknown_name(catalog):
    with pytest.raises(bo.CatalogError, match="unknown"):
        bo.filter_available(catalog, {"Granite"})


def test_filter_emptying_class_rejected(catalog):
    walls = {m.name for m in catalog.walls}
    with pytest.raises(bo.CatalogError, match="empty class set"):
        bo.filter_available(catalog, walls)


def test_filter_composition(catalog):
    # filtering by a union equals filtering in two steps
    both = bo.filter_available(catalog, {"So1", "Br1"})
    stepped = bo.filter_available(bo.filter_available(catalog, {"So1"}),
                                  {"Br1"})
    assert both == stepped


def test_masonry_density_examples():
    assert bo.masonry_density(1000, 1000) == pytest.approx(1000)
    # 0.875*2000 + 0.125*1200
    assert bo.masonry_density(2000, 1200) == pytest.approx(1900)
    with pytest.raises(ValueError):
        bo.masonry_density(0, 1200)


def test_masonry_strength_examples():
    assert bo.masonry_compressive_strength(1, 1) == pytest.approx(0.75)
    # 0.75 * 10**0.75 * 5**0.31
    assert bo.masonry_compressive_strength(10, 5) == pytest.approx(
        0.75 * 10**0.75 * 5**0.31)
    assert bo.masonry_compressive_strength(10, 5) == pytest.approx(6.95, abs=5e-3)
    # 0.75 * 16**0.75 = 0.75 * 8
    assert bo.masonry_compressive_strength(16, 1) == pytest.approx(6.0)
    with pytest.raises(ValueError):
        bo.masonry_compressive_strength(10, 0)


@given(st.floats(1, 5000), st.floats(1, 5000), st.floats(1, 5000))
def test_masonry_density_monotone(a, b, c):
    assert bo.masonry_density(a + c, b) >= bo.masonry_density(a, b)
    assert bo.masonry_density(a, b + c) >= bo.masonry_density(a, b)


@given(st.floats(0.01, 20), st.floats(0.01, 20), st.floats(0.01, 5))
def test_masonry_strength_monotone(fb, fm, d):
    base = bo.masonry_compressive_strength(fb, fm)
    assert bo.masonry_compressive_strength(min(fb + d, 25), fm) >= base
    assert bo.masonry_compressive_strength(fb, min(fm + d, 25)) >= base


def test_masonry_strength_grid_bound():
    # numerically derived supremum over (0, 20]^2 sits at the upper corner
    sup = 0.75 * 20**0.75 * 20**0.31
    worst = max(
        bo.masonry_compressive_strength(fb / 10, fm / 10)
        for fb in range(1, 201, 4)
        for fm in range(1, 201, 4)
    )
    assert 0 < worst <= sup + 1e-9
    assert sup == pytest.approx(17.96, abs=0.01)
