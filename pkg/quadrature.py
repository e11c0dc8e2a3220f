"""Composite Gauss-Legendre quadrature of exp(log_fun) in log space.

The integrands met here (squared Airy solutions, exp(2/h phi)) range over
hundreds of orders of magnitude, so every routine takes the logarithm of a
nonnegative integrand and returns the logarithm of the integral.
"""

import numpy as np
from scipy import special

from errors import NoConvergence

PANEL_NODES = 16
PANEL_PHASE = 8.0
MAX_PANELS = 200_000


def panel_nodes(edges, order=PANEL_NODES):
    """Nodes and weights of shape (n_panels, order) on consecutive edges"""
    edges = np.asarray(edges, dtype=float)
    t, w = np.polynomial.legendre.leggauss(order)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = 0.5 * (hi - lo)
    return lo + half * (t + 1.0), half * w


def gauss_legendre(edges, order=PANEL_NODES):
    nodes, weights = panel_nodes(edges, order)
    return nodes.ravel(), weights.ravel()


def graded_edges(start, stop, rate, phase=PANEL_PHASE):
    """Panel edges on [start, stop] with width phase / rate(x).

    rate bounds the logarithmic derivative (growth plus oscillation) of the
    integrand; each panel then spans a variation of about e^phase.
    """
    edges = [start]
    x = start
    while x < stop:
        width = phase / rate(x)
        width = phase / max(rate(x), rate(min(stop, x + width)))
        x = min(stop, x + width)
        edges.append(x)
        if len(edges) > MAX_PANELS:
            raise NoConvergence(
                f"graded_edges: more than {MAX_PANELS} panels on [{start}, {stop}]"
            )
    return np.array(edges)


def log_integral(log_fun, edges, order=PANEL_NODES):
    nodes, weights = gauss_legendre(edges, order)
    return special.logsumexp(log_fun(nodes) + np.log(weights))


def log_panel_integrals(log_fun, edges, order=PANEL_NODES):
    nodes, weights = panel_nodes(edges, order)
    return special.logsumexp(log_fun(nodes) + np.log(weights), axis=1)


def log_cumulative(log_inner, edges, order=PANEL_NODES):
    """Nodes, weights and log of int_{edges[0]}^{y} exp(log_inner) at every node y"""
    t, w = np.polynomial.legendre.leggauss(order)
    nodes, weights = panel_nodes(edges, order)
    lo = np.asarray(edges, dtype=float)[:-1, None]

    full = special.logsumexp(log_inner(nodes) + np.log(weights), axis=1)
    before = np.concatenate([[-np.inf], np.logaddexp.accumulate(full)[:-1]])

    # partial panel [lo, y] for every node y
    span = 0.5 * (nodes - lo)
    inner = lo[..., None] + span[..., None] * (t + 1.0)
    partial = special.logsumexp(
        log_inner(inner) + np.log(span[..., None] * w), axis=-1
    )
    return nodes, weights, np.logaddexp(before[:, None], partial)


def log_triangle_integral(log_outer, log_inner, edges, order=PANEL_NODES):
    """log of int_a^b exp(log_outer(y)) int_a^y exp(log_inner(x)) dx dy"""
    nodes, weights, cumulative = log_cumulative(log_inner, edges, order)
    return special.logsumexp(log_outer(nodes) + cumulative + np.log(weights))


def mapped_tail_nodes(start, scale, order):
    """Nodes and weights for [start, inf) through x = start + scale (s^-2 - 1)"""
    t, w = np.polynomial.legendre.leggauss(order)
    s = 0.5 * (t + 1.0)
    return start + scale * (s**-2 - 1.0), 0.5 * w * 2.0 * scale / s**3


def log_window_integrals(log_fun, lo, hi, panels, order=PANEL_NODES):
    """log of int_{lo_i}^{hi_i} exp(log_fun) for arrays of intervals"""
    t, w = np.polynomial.legendre.leggauss(order)
    lo, hi = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
    fractions = np.linspace(0.0, 1.0, panels + 1)
    edges = lo[..., None] + (hi - lo)[..., None] * fractions
    half = 0.5 * (edges[..., 1:] - edges[..., :-1])
    nodes = edges[..., :-1, None] + half[..., None] * (t + 1.0)
    weights = half[..., None] * w
    return special.logsumexp(log_fun(nodes) + np.log(weights), axis=(-2, -1))
