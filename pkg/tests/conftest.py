import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from spinrect import (
    DriveSpec,
    FieldKind,
    LatticeSpec,
    ModelParams,
    assign_field,
    six_site_triangle,
)


def two_site_chain() -> LatticeSpec:
    return LatticeSpec(
        n_sites=2,
        sites=((1, 1), (2, 1)),
        bonds=frozenset({(1, 2)}),
        left_reservoir=((1, 1.0),),
        right_reservoir=((2, 1.0),),
    )


def vee3() -> LatticeSpec:
    """Three sites: a left tip fanning out to a two-site right column."""
    return LatticeSpec(
        n_sites=3,
        sites=((1, 1), (2, 1), (2, 2)),
        bonds=frozenset({(1, 2), (1, 3), (2, 3)}),
        left_reservoir=((1, 1.0),),
        right_reservoir=((2, 0.5), (3, 0.5)),
    )


def square4() -> LatticeSpec:
    """2x2 plaquette, mirror symmetric."""
    return LatticeSpec(
        n_sites=4,
        sites=((1, 1), (1, 2), (2, 1), (2, 2)),
        bonds=frozenset({(1, 2), (3, 4), (1, 3), (2, 4)}),
        left_reservoir=((1, 1.0), (2, 1.0)),
        right_reservoir=((3, 1.0), (4, 1.0)),
    )


def wedge5() -> LatticeSpec:
    """Columns (1, 2, 2): asymmetric five-site wedge."""
    return LatticeSpec(
        n_sites=5,
        sites=((1, 1), (2, 1), (2, 2), (3, 1), (3, 2)),
        bonds=frozenset({(1, 2), (1, 3), (2, 3), (2, 4), (2, 5), (3, 5), (4, 5)}),
        left_reservoir=((1, 1.0),),
        right_reservoir=((4, 0.5), (5, 0.5)),
    )


def small_geometry_family() -> list[tuple[str, LatticeSpec]]:
    return [
        ("two_site_chain", two_site_chain()),
        ("vee3", vee3()),
        ("square4", square4()),
        ("wedge5", wedge5()),
        ("six_site_triangle", six_site_triangle()),
    ]


def model(spec: LatticeSpec, delta: float, kind: FieldKind = FieldKind.ASCENDING_LR,
          h0: float = 1.0, step: float = 1.0, f: float = 1.0) -> ModelParams:
    return ModelParams(delta=delta, field=assign_field(spec, kind, h0, step), f=f)


@pytest.fixture
def chain2():
    return two_site_chain()


@pytest.fixture
def plaquette():
    return square4()


@pytest.fixture
def triangle6():
    return six_site_triangle()
