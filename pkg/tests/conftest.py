import pytest

import buildopt as bo


@pytest.fixture(scope="session")
def catalog():
    return bo.default_catalog()


@pytest.fixture(scope="session")
def params():
    return bo.BuildingParams()


def make_assignment(catalog, wall="Br2", foundation="Br2", roof="Wo",
                    cover="Pl", n_slc=7, n_re=2, x_e=0, x_wa=0):
    return bo.DiscreteAssignment(
        wall=catalog.get(bo.ComponentClass.WALL, wall),
        foundation=catalog.get(bo.ComponentClass.FOUNDATION, foundation),
        roof=catalog.get(bo.ComponentClass.ROOF, roof),
        cover=catalog.get(bo.ComponentClass.ROOF_COVER, cover),
        n_slc=n_slc, n_re=n_re, x_e=x_e, x_wa=x_wa,
    )


# a point verified to satisfy every constraint exactly (it rides the
# eccentricity, height and foundation-thickness bounds)
FEASIBLE_FIXTURE = dict(
    assignment=dict(wall="So2", foundation="Br2", roof="Wo", cover="Pl",
                    n_slc=8, x_e=0, x_wa=1),
    point=bo.ContinuousPoint(t_wa=0.34, h_wa=2.7, l_x_fl=3.13, l_y_fl=3.2,
                             t_fo=0.23, w_do=1.5, l_wi=1.2),
)


@pytest.fixture()
def feasible_case(catalog):
    assign = make_assignment(catalog, **FEASIBLE_FIXTURE["assignment"])
    return assign, FEASIBLE_FIXTURE["point"]
