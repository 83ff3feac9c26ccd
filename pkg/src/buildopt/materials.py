"""Building-material catalog: loading, validation, filtering, masonry composites.

The catalog is a flat CSV with one row per material and component class.
Wall-class entries double as foundation candidates (masonry units are used
for both), while dedicated foundation rows are foundation-only.  A material
name may appear in more than one class with different properties (e.g.
bamboo as roof structure vs. roof covering), so lookups are always keyed by
(class, name).

Composite masonry properties (density and compressive strength of the
unit-plus-mortar assembly) can be estimated from raw constituent data with
:func:`masonry_density` and :func:`masonry_compressive_strength`.  The
bundled Nepal catalog already stores composite values, so these helpers are
only needed when building a catalog from scratch.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, TextIO


class CatalogError(ValueError):
    """Raised for malformed catalog documents or invalid filter requests."""


class ComponentClass(str, Enum):
    WALL = "wall"
    FOUNDATION = "foundation"
    ROOF = "roof"
    ROOF_COVER = "roof_cover"


#: classes whose materials carry strength and minimum-thickness data
STRUCTURAL_CLASSES = (ComponentClass.WALL, ComponentClass.FOUNDATION)

CATALOG_HEADER = (
    "name,grade,class,density_kg_m3,cost_usd_m3,ee_MJ_kg,"
    "sigma_allw_MPa,min_thickness_m"
)


@dataclass(frozen=True)
class MaterialSpec:
    """One catalog row.

    Units: density kg/m3, unit_cost USD/m3, embodied_energy MJ/kg,
    compressive_strength MPa (allowable), min_thickness m.
    """

    name: str
    grade: str  # "G1", "G2" or "n/a"
    component_class: ComponentClass
    density: float
    unit_cost: float
    embodied_energy: float
    compressive_strength: float | None = None
    min_thickness: float | None = None

    def __post_init__(self) -> None:
        if not self.name:
            raise CatalogError("material name must be nonempty")
        if self.density <= 0:
            raise CatalogError(f"{self.name}: density must be positive")
        if self.unit_cost < 0:
            raise CatalogError(f"{self.name}: unit cost must be nonnegative")
        if self.embodied_energy < 0:
            raise CatalogError(f"{self.name}: embodied energy must be nonnegative")
        structural = self.component_class in STRUCTURAL_CLASSES
        if structural:
            if self.compressive_strength is None or self.compressive_strength <= 0:
                raise CatalogError(
                    f"{self.name}: wall/foundation materials need a positive "
                    "allowable compressive strength"
                )
            if self.min_thickness is None or self.min_thickness <= 0:
                raise CatalogError(
                    f"{self.name}: wall/foundation materials need a positive "
                    "minimum thickness"
                )
        else:
            if self.compressive_strength is not None:
                raise CatalogError(
                    f"{self.name}: strength not applicable to {self.component_class.value}"
                )
            if self.min_thickness is not None:
                raise CatalogError(
                    f"{self.name}: min thickness not applicable to "
                    f"{self.component_class.value}"
                )

    @property
    def ee_per_m3(self) -> float:
        """Embodied energy per unit volume, MJ/m3."""
        return self.embodied_energy * self.density

    @property
    def family(self) -> str:
        """Material family ignoring the quality grade, e.g. 'Br' for 'Br2'."""
        return self.name.rstrip("0123456789")


@dataclass(frozen=True)
class MaterialCatalog:
    """Immutable set of material options, partitioned by component class."""

    entries: tuple[MaterialSpec, ...]

    def __post_init__(self) -> None:
        for cls, options in (
            ("wall", self.walls),
            ("foundation", self.foundations),
            ("roof", self.roofs),
            ("roof_cover", self.covers),
        ):
            if not options:
                raise CatalogError(f"empty class set: {cls}")
            names = [m.name for m in options]
            if len(names) != len(set(names)):
                raise CatalogError(f"duplicate material names in class {cls}")

    @property
    def walls(self) -> tuple[MaterialSpec, ...]:
        return tuple(
            m for m in self.entries if m.component_class is ComponentClass.WALL
        )

    @property
    def foundations(self) -> tuple[MaterialSpec, ...]:
        # wall materials are also foundation candidates; dedicated
        # foundation rows extend the set
        return tuple(
            m
            for m in self.entries
            if m.component_class in STRUCTURAL_CLASSES
        )

    @property
    def roofs(self) -> tuple[MaterialSpec, ...]:
        return tuple(
            m for m in self.entries if m.component_class is ComponentClass.ROOF
        )

    @property
    def covers(self) -> tuple[MaterialSpec, ...]:
        return tuple(
            m for m in self.entries if m.component_class is ComponentClass.ROOF_COVER
        )

    def options(self, cls: ComponentClass) -> tuple[MaterialSpec, ...]:
        return {
            ComponentClass.WALL: self.walls,
            ComponentClass.FOUNDATION: self.foundations,
            ComponentClass.ROOF: self.roofs,
            ComponentClass.ROOF_COVER: self.covers,
        }[cls]

    def get(self, cls: ComponentClass, name: str) -> MaterialSpec:
        for m in self.options(cls):
            if m.name == name:
                return m
        raise CatalogError(f"unknown {cls.value} material: {name}")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(sorted({m.name for m in self.entries}))


def _parse_float(row: int, field: str, raw: str, optional: bool = False) -> float | None:
    raw = raw.strip()
    if not raw:
        if optional:
            return None
        raise CatalogError(f"row {row}: missing field {field}")
    try:
        return float(raw)
    except ValueError as exc:
        raise CatalogError(f"row {row}: bad {field} value {raw!r}") from exc


def load_catalog(source: str | Path | TextIO) -> MaterialCatalog:
    """Parse and validate a catalog CSV (path, text content, or open file)."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        path = Path(source)
        if path.exists():
            text = path.read_text(encoding="utf-8")
        elif "\n" in str(source) or "," in str(source):
            text = str(source)
        else:
            raise CatalogError(f"catalog file not found: {source}")

    reader = csv.reader(io.StringIO(text))
    rows = [r for r in reader if r and any(cell.strip() for cell in r)]
    if not rows:
        raise CatalogError("empty class set: catalog document has no rows")
    header = ",".join(cell.strip() for cell in rows[0])
    if header != CATALOG_HEADER:
        raise CatalogError(f"unexpected catalog header: {header!r}")

    entries: list[MaterialSpec] = []
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != 8:
            raise CatalogError(f"row {i}: expected 8 fields, got {len(row)}")
        name, grade, cls_raw = (row[0].strip(), row[1].strip(), row[2].strip())
        try:
            cls = ComponentClass(cls_raw)
        except ValueError as exc:
            raise CatalogError(f"row {i}: unknown component class {cls_raw!r}") from exc
        entries.append(
            MaterialSpec(
                name=name,
                grade=grade or "n/a",
                component_class=cls,
                density=_parse_float(i, "density_kg_m3", row[3]),
                unit_cost=_parse_float(i, "cost_usd_m3", row[4]),
                embodied_energy=_parse_float(i, "ee_MJ_kg", row[5]),
                compressive_strength=_parse_float(i, "sigma_allw_MPa", row[6], optional=True),
                min_thickness=_parse_float(i, "min_thickness_m", row[7], optional=True),
            )
        )
    return MaterialCatalog(entries=tuple(entries))


def serialize_catalog(catalog: MaterialCatalog) -> str:
    """Render a catalog back to CSV; load_catalog(serialize_catalog(c)) == c."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CATALOG_HEADER.split(","))
    for m in catalog.entries:
        writer.writerow(
            [
                m.name,
                m.grade,
                m.component_class.value,
                repr(m.density),
                repr(m.unit_cost),
                repr(m.embodied_energy),
                "" if m.compressive_strength is None else repr(m.compressive_strength),
                "" if m.min_thickness is None else repr(m.min_thickness),
            ]
        )
    return out.getvalue()


def default_catalog() -> MaterialCatalog:
    """The bundled Nepal reconstruction catalog (12 materials)."""
    data = resources.files("buildopt.data").joinpath("nepal_catalog.csv").read_text()
    return load_catalog(io.StringIO(data))


def filter_available(
    catalog: MaterialCatalog, exclude: Iterable[str]
) -> MaterialCatalog:
    """Drop excluded material names (all classes they appear in).

    Unknown names are an error rather than silently ignored; so is a filter
    that leaves any component class without options.
    """
    excluded = set(exclude)
    unknown = excluded - set(m.name for m in catalog.entries)
    if unknown:
        raise CatalogError(f"unknown material names: {sorted(unknown)}")
    remaining = tuple(m for m in catalog.entries if m.name not in excluded)
    if not remaining:
        raise CatalogError("empty class set: all materials excluded")
    return MaterialCatalog(entries=remaining)


def masonry_density(rho_unit: float, rho_mortar: float) -> float:
    """Composite masonry density from unit and mortar densities (kg/m3).

    The units occupy the dominant share of the assembly volume, the mortar
    paste the remainder.
    """
    if rho_unit <= 0 or rho_mortar <= 0:
        raise ValueError("densities must be positive")
    return 0.875 * rho_unit + 0.125 * rho_mortar


def masonry_compressive_strength(f_b: float, f_m: float) -> float:
    """Composite masonry compressive strength (MPa).

    Empirical power law in the unit strength f_b and the dried mortar
    strength f_m; accounts for constituent quality and workmanship.
    """
    if f_b <= 0 or f_m <= 0:
        raise ValueError("strengths must be positive")
    return 0.75 * f_b**0.75 * f_m**0.31
