"""Python interface to the acquaintance-time simulator."""

import json

from ._core import (
    AcquaintError,
    Graph,
    clique_star,
    complete,
    cycle,
    kappa,
    linked_cliques,
    random_regular,
    s_star,
    spectral_gap,
    star,
    t_star_general,
    t_star_regular,
    torus,
    two_cliques,
)
from . import _core

__all__ = [
    "AcquaintError",
    "Graph",
    "clique_star",
    "complete",
    "cycle",
    "fit",
    "kappa",
    "linked_cliques",
    "random_regular",
    "run_sweep",
    "run_trial",
    "s_star",
    "spectral_gap",
    "spectral_summary",
    "star",
    "summarize",
    "t_star_general",
    "t_star_regular",
    "torus",
    "two_cliques",
]


def run_trial(graph, seed, init="poisson", density=1.0, count=0, continuous=False, holding=0.5, tau2=False):
    """Run one seeded trial and return its result as a dict."""
    return json.loads(_core.run_trial_json(graph, seed, init, density, count, continuous, holding, tau2))


def spectral_summary(graph, holding=0.5, origin=0):
    return json.loads(_core.spectral_summary_json(graph, holding, origin))


def run_sweep(spec):
    """Run an experiment spec (dict) and return the result CSV text."""
    return _core.run_sweep_csv(json.dumps(spec))


def summarize(csv):
    return json.loads(_core.summarize_csv(csv))


def fit(csv, model):
    return json.loads(_core.fit_csv(csv, model))
