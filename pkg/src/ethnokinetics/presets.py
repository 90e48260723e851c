"""Bundled scenarios reproducing the published figures."""

from __future__ import annotations

from .config import Scenario
from .errors import UnknownPreset
from .integrate import RealScale, TimeGrid
from .models import InteractionSpec, NoiseSpec, ThreeVarParams, TwoVarParams

_BASE = dict(
    alpha1=0.03,
    alpha2=0.11,
    y0=0.075,
    z0=0.22,
    beta12=-6.0,
    beta13=0.6,
    beta21=0.2,
    beta23=0.1,
    beta31=0.5,
    beta32=0.0,
    gamma1=1.0,
    gamma2=0.7,
    gamma3=0.2,
)

FIG2 = TwoVarParams(alpha=0.02, y0=0.05, beta1=-1 / 3, beta2=2.5, gamma=0.1)
FIG3 = TwoVarParams(alpha=0.02, y0=1.0, beta1=1 / 3, beta2=-2.5, gamma=0.1)
FIG4 = ThreeVarParams(**_BASE)
FIG5 = FIG4.replace(z0=0.0)
FIG6 = ThreeVarParams(
    alpha1=0.03,
    alpha2=0.1,
    y0=0.075,
    z0=0.6,
    beta12=-0.06,
    beta13=0.6,
    beta21=1.25,
    beta23=-0.075,
    beta31=-0.5,
    beta32=0.0,
    gamma1=2.0,
    gamma2=20.0,
    gamma3=0.6,
)

HORIZON = 200.0
FIG8_INTERACTION = InteractionSpec(c1=0.22, c2=0.22, T1=20.0, T2=15.0)


def _grid(tf=HORIZON, knots=()):
    return TimeGrid(0.0, tf, 1e-3, knots)


def _build() -> dict:
    fig7 = (0.07, 0.053, 0.05)
    fig8_grid = _grid(knots=(FIG8_INTERACTION.T1, FIG8_INTERACTION.contact_time))
    return {
        "fig2": Scenario("two_var", FIG2, (0.1, 0.05), _grid(), scale=RealScale(), name="fig2"),
        "fig3": Scenario("two_var", FIG3, (0.1, 1.0), _grid(), scale=RealScale(), name="fig3"),
        "fig4": Scenario("three_var", FIG4, (0.07, 0.053, 0.05), _grid(), name="fig4"),
        "fig5": Scenario("three_var", FIG5, (0.07, 0.075, 0.05), _grid(), name="fig5"),
        "fig6": Scenario("three_var", FIG6, (0.1, 0.075, 0.6), _grid(), name="fig6"),
        "fig7a": Scenario("sde", FIG4, fig7, _grid(), noise=NoiseSpec.uniform(0.05), name="fig7a"),
        "fig7b": Scenario("sde", FIG4, fig7, _grid(), noise=NoiseSpec.uniform(0.1), name="fig7b"),
        "fig8": Scenario(
            "interaction",
            FIG4,
            fig7,
            fig8_grid,
            noise=NoiseSpec.uniform(0.05),
            interaction=FIG8_INTERACTION,
            name="fig8",
        ),
    }


PRESETS = _build()


def preset_names() -> list:
    return list(PRESETS)


def get_preset(name: str) -> Scenario:
    try:
        return PRESETS[name]
    except KeyError:
        raise UnknownPreset(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None
