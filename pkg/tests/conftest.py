import numpy as np
import pytest

from podrbf import (Box, ControlParam, IntegralFunctional, ProblemDef,
                    TimeGrid, make_problem)


@pytest.fixture(scope="session")
def sp():
    return make_problem("science-policy")


@pytest.fixture(scope="session")
def pd_prob():
    return make_problem("population-dynamics")


@pytest.fixture(scope="session")
def sp_grid(sp):
    return TimeGrid(sp.t_span[0], sp.t_span[1], 100)


@pytest.fixture(scope="session")
def pd_grid(pd_prob):
    return TimeGrid(pd_prob.t_span[0], pd_prob.t_span[1], 100)


def make_zero_dynamics(n_y=2, y0=(3.0, -1.0), t_span=(0.0, 15.0),
                       box=None, integrand=None, sense="minimize"):
    """Toy problem with rhs = 0; trajectories are constant at y0."""
    if box is None:
        box = Box(np.zeros(2), np.ones(2))
    if integrand is None:
        integrand = lambda t, y, u: np.ones_like(t)
    return ProblemDef(
        name="zero-dynamics",
        n_y=n_y,
        n_u=1,
        rhs=lambda t, y, u: np.zeros_like(y),
        y0=np.asarray(y0, float),
        t_span=t_span,
        control=ControlParam("piecewise-linear", (box.dim,), t_span),
        criterion=IntegralFunctional("unit", integrand),
        eq_constraints=(),
        box=box,
        sense=sense,
    )


@pytest.fixture
def zero_dynamics():
    return make_zero_dynamics()
