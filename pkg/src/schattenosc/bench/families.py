"""Named, seeded test-function generators.

Every generator maps an ``(n, D)`` array of points to ``n`` values.  In more
than one dimension the one-dimensional profiles are applied to a fixed
oblique coordinate ``u = (x_1 + 0.6 x_2 + ...) / norm`` or, for the
``*_prod`` members, to a product of axis profiles.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

GridFn = Callable[[np.ndarray], np.ndarray]

TWO_PI = 2 * np.pi


def _coord(P: np.ndarray) -> np.ndarray:
    P = np.atleast_2d(P)
    if P.shape[1] == 1:
        return P[:, 0]
    v = 0.6 ** np.arange(P.shape[1])
    return P @ v / v.sum()


def _profile(fn):
    return lambda P: fn(_coord(P))


def _bumps(centres, width, amps):
    def f(u):
        return sum(a * np.exp(-((u - c) ** 2) / (2 * width ** 2)) for c, a in zip(centres, amps))
    return f


def _smooth_step(a, width):
    return lambda u: 0.5 * (1 + np.tanh((u - a) / width))


def _trig_sum(rng, terms=4):
    a = rng.normal(size=terms)
    b = rng.normal(size=terms)
    k = np.arange(1, terms + 1)

    def f(u):
        u = np.asarray(u)[..., None]
        return np.sum((a * np.sin(TWO_PI * k * u) + b * np.cos(TWO_PI * k * u)) / k ** 2, axis=-1)
    return f


def _product(fx, fy):
    def f(P):
        P = np.atleast_2d(P)
        out = fx(P[:, 0])
        for k in range(1, P.shape[1]):
            out = out * fy(P[:, k])
        return out
    return f


# deterministic members, in family order
_FIXED: dict[str, Callable[[], GridFn]] = {
    "linear": lambda: _profile(lambda u: u),
    "quadratic": lambda: _profile(lambda u: u ** 2),
    "cubic": lambda: _profile(lambda u: u ** 3 - 0.5 * u),
    "sin1": lambda: _profile(lambda u: np.sin(TWO_PI * u)),
    "cos1": lambda: _profile(lambda u: np.cos(TWO_PI * u)),
    "sin2": lambda: _profile(lambda u: np.sin(2 * TWO_PI * u + 0.3)),
    "bump": lambda: _profile(_bumps([0.5], 0.12, [1.0])),
    "bumps2": lambda: _profile(_bumps([0.3, 0.7], 0.08, [1.0, -0.6])),
    "step_smooth": lambda: _profile(_smooth_step(0.45, 0.06)),
    "step_smooth_wide": lambda: _profile(_smooth_step(0.6, 0.15)),
    "quartic": lambda: _profile(lambda u: (u - 0.3) * (u - 0.7) * (u + 0.2) * u),
    "exp": lambda: _profile(lambda u: np.exp(1.5 * u)),
    "sin3": lambda: _profile(lambda u: np.sin(3 * TWO_PI * u) * np.exp(-u)),
    "sin_prod": lambda: _product(lambda x: np.sin(np.pi * x), lambda y: np.cos(np.pi * y / 2)),
    "bumps3": lambda: _profile(_bumps([0.2, 0.5, 0.8], 0.07, [0.8, -1.0, 0.5])),
    "log_shift": lambda: _profile(lambda u: np.log(u + 0.5)),
}

SMOOTH_NAMES = ["linear", "quadratic", "cubic", "sin1", "cos1", "sin2", "bump",
                "bumps2", "step_smooth_wide", "exp"]


def constant(value: float = 1.0) -> GridFn:
    return lambda P: np.full(np.atleast_2d(P).shape[0], float(value))


def named(name: str, seed: int = 0) -> GridFn:
    """Look up a generator; ``trig<k>`` is the k-th seeded random trigonometric sum."""
    if name in _FIXED:
        return _FIXED[name]()
    if name == "constant":
        return constant()
    if name.startswith("trig"):
        k = int(name[4:] or 0)
        return _profile(_trig_sum(np.random.default_rng([seed, k])))
    raise KeyError(f"unknown test function {name!r}")


def standard_family(count: int = 20, seed: int = 0) -> list[tuple[str, GridFn]]:
    """The first ``count`` fixed members followed by seeded trigonometric sums."""
    names = list(_FIXED)[:count]
    names += [f"trig{k}" for k in range(count - len(names))]
    return [(n, named(n, seed)) for n in names]


def smooth_family(count: int = 10, seed: int = 0) -> list[tuple[str, GridFn]]:
    names = SMOOTH_NAMES[:count]
    names += [f"trig{k}" for k in range(count - len(names))]
    return [(n, named(n, seed)) for n in names]


def family_from_config(spec: dict | list | None, seed: int = 0) -> list[tuple[str, GridFn]]:
    if spec is None:
        return []
    if isinstance(spec, list):
        return [(n, named(n, seed)) for n in spec]
    seed = int(spec.get("seed", seed))
    if "names" in spec:
        return [(n, named(n, seed)) for n in spec["names"]]
    kind = spec.get("family", "standard")
    count = int(spec.get("count", 20))
    if kind == "standard":
        return standard_family(count, seed)
    if kind == "smooth":
        return smooth_family(count, seed)
    if kind == "constant":
        return [(f"constant{k}", constant(1.0 + k)) for k in range(count)]
    raise KeyError(f"unknown function family {kind!r}")
