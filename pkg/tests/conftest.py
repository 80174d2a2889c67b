"""Shared test helpers: random AST generation and dense PDE oracles."""

import math

import numpy as np
import pytest

from yauyau.expr import BinOp, Call, Const, Neg, Var

SMOOTH_FUNCS = ("sin", "cos", "tanh", "exp")


def random_smooth_ast(rng: np.random.Generator, dim: int, depth: int):
    """Random AST over smooth primitives, suitable for derivative checks.

    Divisions get denominators bounded away from zero (c + sin(...) with
    c >= 2) so random point sets stay well inside the domain.
    """
    if depth <= 0 or rng.random() < 0.25:
        if rng.random() < 0.6:
            return Var(int(rng.integers(1, dim + 1)))
        return Const(round(float(rng.uniform(0.0, 3.0)), 3))
    r = rng.random()
    if r < 0.40:
        op = str(rng.choice(["+", "-", "*"]))
        return BinOp(
            op,
            random_smooth_ast(rng, dim, depth - 1),
            random_smooth_ast(rng, dim, depth - 1),
        )
    if r < 0.50:
        denom = BinOp(
            "+",
            Const(round(float(rng.uniform(2.0, 4.0)), 3)),
            Call("sin", random_smooth_ast(rng, dim, depth - 2)),
        )
        return BinOp("/", random_smooth_ast(rng, dim, depth - 1), denom)
    if r < 0.62:
        return BinOp(
            "^",
            random_smooth_ast(rng, dim, depth - 1),
            Const(float(rng.integers(2, 4))),
        )
    if r < 0.70:
        return Neg(random_smooth_ast(rng, dim, depth - 1))
    fn = str(rng.choice(SMOOTH_FUNCS))
    return Call(fn, random_smooth_ast(rng, dim, depth - 1))


def naive_dst(v):
    """Independent O(N^2) DST-I reference, written with math.sin directly."""
    v = list(v)
    n = len(v)
    out = []
    for k in range(1, n + 1):
        out.append(sum(v[j - 1] * math.sin(j * k * math.pi / (n + 1)) for j in range(1, n + 1)))
    return np.array(out)


def dense_laplacian(ns: int, ds: float) -> np.ndarray:
    """(1/ds^2) tridiag(1, -2, 1) with Dirichlet ends (1-D, dense)."""
    L = np.zeros((ns, ns))
    for i in range(ns):
        L[i, i] = -2.0
        if i > 0:
            L[i, i - 1] = 1.0
        if i < ns - 1:
            L[i, i + 1] = 1.0
    return L / ds ** 2


def dense_central_difference(ns: int, ds: float) -> np.ndarray:
    """Central difference matrix with zero (Dirichlet) values outside."""
    D = np.zeros((ns, ns))
    for i in range(ns):
        if i > 0:
            D[i, i - 1] = -1.0
        if i < ns - 1:
            D[i, i + 1] = 1.0
    return D / (2.0 * ds)


def dense_step_matrixless(u, f_vals, r_vals, ns, ds, dt):
    """Reference step: u' = (I - dt/2 L)^-1 (I + dt C) u with dense algebra."""
    L = dense_laplacian(ns, ds)
    C = -(np.diag(f_vals) @ dense_central_difference(ns, ds)) - np.diag(r_vals)
    w = u + dt * (C @ u)
    return np.linalg.solve(np.eye(ns) - 0.5 * dt * L, w)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
