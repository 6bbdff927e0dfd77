import numpy as np
from hypothesis import strategies as st

from nisqstab.histogram import Histogram, Support


# d_4 and d_20 of each row against N(mu, sigma) on [0, 1], computed with
# adaptive scipy.integrate.quad term by term (independent of the midpoint
# rule used by mbd_analytic).
QUAD_ORACLE = {
    "N(mu, sigma)": (0.0, 0.0),
    "N(mu+delta, sigma)": (3.2747907557, 3.2756373561),
    "N(mu, 2sigma)": (0.9664918202, 0.9665835074),
    "N(mu, 4sigma)": (1.7480275453, 1.7483206841),
    "N(2mu, sigma)": (3.7170111027, 3.7203378341),
    "N(mu, 1.5sigma)": (0.5791396151, 0.5791884034),
    "N(1.01mu, sigma)": (0.1194009821, 0.1194100230),
    "N(mu+2delta, 2sigma)": (3.7021139687, 3.7056283274),
    "SkewNormal(mu, 2sigma)": (1.4849128973, 1.4850899226),
    "Gumbel(mu, 2sigma)": (1.1621265106, 1.1623723366),
}


def hist_on(edges, mass):
    edges = np.asarray(edges, dtype=float)
    return Histogram(edges, mass, Support(edges[0], edges[-1]))


def random_masses(rng, k, bins):
    """k random mass vectors on ``bins`` bins, some with empty bins."""
    raw = rng.random((k, bins)) ** 3
    raw[rng.random((k, bins)) < 0.2] = 0.0
    raw[:, 0] += 1e-9
    return raw / raw.sum(axis=1, keepdims=True)


@st.composite
def histograms(draw, min_bins=1, max_bins=12):
    bins = draw(st.integers(min_bins, max_bins))
    a = draw(st.floats(-5, 5))
    width = draw(st.floats(0.1, 10))
    raw = np.array(draw(st.lists(st.floats(0, 1), min_size=bins, max_size=bins))) + 1e-3
    return hist_on(np.linspace(a, a + width, bins + 1), raw / raw.sum())


@st.composite
def aligned(draw, k=2, max_bins=20):
    """``k`` histograms sharing one random grid."""
    bins = draw(st.integers(1, max_bins))
    a = draw(st.floats(-10, 10))
    width = draw(st.floats(0.01, 20))
    edges = np.linspace(a, a + width, bins + 1)
    out = []
    for _ in range(k):
        raw = np.array(draw(st.lists(st.floats(0, 1), min_size=bins, max_size=bins)))
        if raw.sum() == 0:
            raw[0] = 1.0
        out.append(hist_on(edges, raw / raw.sum()))
    return out
