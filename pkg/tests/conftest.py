import pytest

from ethnokinetics.models import ThreeVarParams, TwoVarParams

# transcribed by hand from the figure captions; kept separate from the package presets
CAPTION_TABLE = {
    "fig2": dict(alpha=0.02, y0=0.05, beta1=-1 / 3, beta2=2.5, gamma=0.1),
    "fig3": dict(alpha=0.02, y0=1.0, beta1=1 / 3, beta2=-2.5, gamma=0.1),
    "fig4": dict(
        alpha1=0.03, alpha2=0.11, y0=0.075, z0=0.22, beta12=-6, beta13=0.6, beta21=0.2,
        beta23=0.1, beta31=0.5, beta32=0, gamma1=1, gamma2=0.7, gamma3=0.2,
    ),
    "fig5": dict(
        alpha1=0.03, alpha2=0.11, y0=0.075, z0=0.0, beta12=-6, beta13=0.6, beta21=0.2,
        beta23=0.1, beta31=0.5, beta32=0, gamma1=1, gamma2=0.7, gamma3=0.2,
    ),
    "fig6": dict(
        alpha1=0.03, alpha2=0.1, y0=0.075, z0=0.6, beta12=-0.06, beta13=0.6, beta21=1.25,
        beta23=-0.075, beta31=-0.5, beta32=0, gamma1=2, gamma2=20, gamma3=0.6,
    ),
}
CAPTION_TABLE["fig7a"] = CAPTION_TABLE["fig7b"] = CAPTION_TABLE["fig8"] = CAPTION_TABLE["fig4"]

CAPTION_INITIAL = {
    "fig2": (0.1, 0.05),
    "fig3": (0.1, 1.0),
    "fig4": (0.07, 0.053, 0.05),
    "fig5": (0.07, 0.075, 0.05),
    "fig6": (0.1, 0.075, 0.6),
    "fig7a": (0.07, 0.053, 0.05),
    "fig7b": (0.07, 0.053, 0.05),
    "fig8": (0.07, 0.053, 0.05),
}

ACCEPTANCE_LINES = []


@pytest.fixture
def fig2():
    return TwoVarParams(**CAPTION_TABLE["fig2"])


@pytest.fixture
def fig4():
    return ThreeVarParams(**CAPTION_TABLE["fig4"])


@pytest.fixture
def fig5():
    return ThreeVarParams(**CAPTION_TABLE["fig5"])


@pytest.fixture
def fig6():
    return ThreeVarParams(**CAPTION_TABLE["fig6"])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
