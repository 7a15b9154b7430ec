"""Samplers for graph-dependent random vectors.

Three model families are provided: m-dependent moving averages, block
independent vectors, and a generic moving average driven by an arbitrary
generator graph.  Every model declares a dependency graph consistent with
its sampler (subcollections indexed by non-adjacent vertex sets are
independent), has mean-zero unit-variance entries, and knows its
population covariance in closed form.

Sampling is reproducible and order-independent: column k of any sample is
drawn from a counter-based sub-stream derived from (seed, k), so chunked
or parallel evaluation cannot change the output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .graph import DependencyGraph, block_graph, m_dependent_graph

INNOVATIONS = ("gaussian", "rademacher", "student-t")

_CHUNK_BUDGET = 4_000_000  # floats per sampling chunk


class UnsupportedMomentError(ValueError):
    """The requested moment does not exist for the innovation law."""


@dataclass(frozen=True)
class ModelSpec:
    """Immutable description of a graph-dependent model."""

    kind: str
    p: int
    innovation: str
    df: float | None
    seed: int
    scale: float = 1.0
    m: int | None = None
    coeffs: tuple[float, ...] | None = None
    block_sizes: tuple[int, ...] | None = None
    within_block: str | None = None
    theta: float | None = None
    generator: DependencyGraph | None = None


@dataclass(frozen=True)
class PopulationCovariance:
    """Closed-form covariance with the two scalar summaries used downstream."""

    matrix: np.ndarray
    trace_over_p: float
    hs_norm_sq_over_p2: float


class LindebergEstimate(NamedTuple):
    estimate: float
    std_error: float


def _validate_innovation(innovation: str, df: float | None) -> None:
    if innovation not in INNOVATIONS:
        raise ValueError(
            f"innovation must be one of {INNOVATIONS}, got {innovation!r}"
        )
    if innovation == "student-t":
        if df is None:
            raise ValueError("student-t innovations require df")
        if not df > 2:
            raise ValueError(f"student-t requires df > 2 for unit variance, got {df}")
    elif df is not None:
        raise ValueError(f"df is only meaningful for student-t, got df={df!r}")


def _validate_seed(seed: int) -> None:
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ValueError(f"seed must be a nonnegative integer, got {seed!r}")


def make_m_dependent(
    p: int,
    m: int,
    coeffs: Sequence[float],
    innovation: str = "gaussian",
    df: float | None = None,
    seed: int = 0,
) -> ModelSpec:
    """Moving average X_i = sum_k c_k xi_{i+k} / ||c||, entries m apart dependent."""
    if not isinstance(p, int) or p < 1:
        raise ValueError(f"dimension must be a positive integer, got {p!r}")
    if not isinstance(m, int) or m < 0:
        raise ValueError(f"m must be a nonnegative integer, got {m!r}")
    if m > p - 1:
        raise ValueError(f"m must be at most p-1, got m={m}, p={p}")
    c = tuple(float(x) for x in coeffs)
    if len(c) != m + 1:
        raise ValueError(f"coeffs must have length m+1={m + 1}, got {len(c)}")
    if not any(c):
        raise ValueError("coefficient vector must not be all zero")
    _validate_innovation(innovation, df)
    _validate_seed(seed)
    return ModelSpec(
        kind="m-dependent", p=p, innovation=innovation, df=df, seed=seed,
        m=m, coeffs=c,
    )


def make_block_independent(
    block_sizes: Sequence[int],
    within_block: str = "iid",
    theta: float | None = None,
    innovation: str = "gaussian",
    df: float | None = None,
    seed: int = 0,
) -> ModelSpec:
    """Independent blocks; within a block either i.i.d. or common-factor entries."""
    sizes = tuple(int(s) for s in block_sizes)
    if not sizes or any(s < 1 for s in sizes):
        raise ValueError(f"block sizes must be positive integers, got {block_sizes!r}")
    if within_block == "iid":
        if theta is not None:
            raise ValueError("theta is only meaningful for common-factor blocks")
    elif within_block == "common-factor":
        if theta is None:
            raise ValueError("common-factor blocks require theta")
        theta = float(theta)
        if not 0 <= theta < 1:
            raise ValueError(f"theta must lie in [0, 1), got {theta}")
    else:
        raise ValueError(
            f"within_block must be 'iid' or 'common-factor', got {within_block!r}"
        )
    _validate_innovation(innovation, df)
    _validate_seed(seed)
    return ModelSpec(
        kind="block-independent", p=sum(sizes), innovation=innovation, df=df,
        seed=seed, block_sizes=sizes, within_block=within_block, theta=theta,
    )


def make_graph_ma(
    generator: DependencyGraph,
    innovation: str = "gaussian",
    df: float | None = None,
    seed: int = 0,
) -> ModelSpec:
    """Moving average over a generator graph: X_v averages innovations on B_1(v).

    The declared dependency graph is the square of the generator, since X_u
    and X_v share innovations exactly when their radius-1 balls intersect.
    """
    _validate_innovation(innovation, df)
    _validate_seed(seed)
    return ModelSpec(
        kind="graph-MA", p=generator.p, innovation=innovation, df=df,
        seed=seed, generator=generator,
    )


def with_scale(model: ModelSpec, c: float) -> ModelSpec:
    """Rescale the model so entries have variance c (samples scale by sqrt(c))."""
    c = float(c)
    if not c > 0:
        raise ValueError(f"scale must be positive, got {c}")
    return replace(model, scale=model.scale * c)


def declared_graph(model: ModelSpec) -> DependencyGraph:
    """The dependency graph the sampler guarantees."""
    if model.kind == "m-dependent":
        return m_dependent_graph(model.p, model.m)
    if model.kind == "block-independent":
        return block_graph(model.block_sizes)
    if model.kind == "graph-MA":
        gen = model.generator
        edges = [
            (v, u)
            for v in gen.vertices
            for u in gen.ball(v, 2)
            if u > v
        ]
        return DependencyGraph(gen.p, edges)
    raise ValueError(f"unknown model kind {model.kind!r}")


def _ma_weights(generator: DependencyGraph) -> np.ndarray:
    w = np.zeros((generator.p, generator.p))
    for v in generator.vertices:
        ball = sorted(generator.ball(v, 1))
        w[v - 1, [u - 1 for u in ball]] = 1.0 / math.sqrt(len(ball))
    return w


def population_covariance(model: ModelSpec) -> PopulationCovariance:
    """Closed-form Sigma_p together with tr(Sigma)/p and tr(Sigma^2)/p^2."""
    p = model.p
    if model.kind == "m-dependent":
        c = np.asarray(model.coeffs)
        acf = np.correlate(c, c, mode="full")[model.m:] / float(c @ c)
        first = np.zeros(p)
        first[: model.m + 1] = acf
        sigma = np.empty((p, p))
        idx = np.abs(np.arange(p)[:, None] - np.arange(p)[None, :])
        sigma[:] = first[idx]
    elif model.kind == "block-independent":
        sigma = np.zeros((p, p))
        start = 0
        off = 0.0 if model.within_block == "iid" else model.theta
        for s in model.block_sizes:
            sigma[start : start + s, start : start + s] = off
            start += s
    elif model.kind == "graph-MA":
        w = _ma_weights(model.generator)
        sigma = w @ w.T
        sigma = (sigma + sigma.T) / 2.0
    else:
        raise ValueError(f"unknown model kind {model.kind!r}")
    np.fill_diagonal(sigma, 1.0)
    if model.scale != 1.0:
        sigma = sigma * model.scale
    trace_over_p = float(np.trace(sigma) / p)
    hs = float(np.sum(sigma * sigma) / (p * p))
    return PopulationCovariance(
        matrix=sigma, trace_over_p=trace_over_p, hs_norm_sq_over_p2=hs
    )


def _column_rng(seed: int, column: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(column,))
    return np.random.Generator(np.random.Philox(ss))


def _draw(rng: np.random.Generator, innovation: str, df: float | None, size: int) -> np.ndarray:
    if innovation == "gaussian":
        return rng.standard_normal(size)
    if innovation == "rademacher":
        return rng.integers(0, 2, size).astype(np.float64) * 2.0 - 1.0
    return rng.standard_t(df, size) / math.sqrt(df / (df - 2.0))


def _sample_columns(model: ModelSpec, start: int, stop: int) -> np.ndarray:
    p = model.p
    out = np.empty((p, stop - start))
    if model.kind == "m-dependent":
        c = np.asarray(model.coeffs)
        norm = math.sqrt(float(c @ c))
        for k in range(start, stop):
            rng = _column_rng(model.seed, k)
            xi = _draw(rng, model.innovation, model.df, p + model.m)
            out[:, k - start] = np.correlate(xi, c, mode="valid") / norm
    elif model.kind == "block-independent":
        sizes = model.block_sizes
        if model.within_block == "iid":
            for k in range(start, stop):
                rng = _column_rng(model.seed, k)
                out[:, k - start] = _draw(rng, model.innovation, model.df, p)
        else:
            theta = model.theta
            a = math.sqrt(theta)
            b = math.sqrt(1.0 - theta)
            reps = np.repeat(np.arange(len(sizes)), sizes)
            for k in range(start, stop):
                rng = _column_rng(model.seed, k)
                eps = _draw(rng, model.innovation, model.df, p)
                z = _draw(rng, model.innovation, model.df, len(sizes))
                out[:, k - start] = a * z[reps] + b * eps
    elif model.kind == "graph-MA":
        w = _ma_weights(model.generator)
        for k in range(start, stop):
            rng = _column_rng(model.seed, k)
            out[:, k - start] = w @ _draw(rng, model.innovation, model.df, p)
    else:
        raise ValueError(f"unknown model kind {model.kind!r}")
    if model.scale != 1.0:
        out *= math.sqrt(model.scale)
    return out


def sample(model: ModelSpec, n: int) -> np.ndarray:
    """Draw n independent columns; deterministic given (model, n)."""
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"sample count must be a positive integer, got {n!r}")
    return _sample_columns(model, 0, n)


def _chunks(total: int, p: int) -> Iterable[tuple[int, int]]:
    step = max(1, _CHUNK_BUDGET // max(p, 1))
    for lo in range(0, total, step):
        yield lo, min(lo + step, total)


def _innovation_kurtosis(model: ModelSpec) -> float:
    if model.innovation == "gaussian":
        return 3.0
    if model.innovation == "rademacher":
        return 1.0
    if model.df <= 4:
        raise UnsupportedMomentError(
            f"student-t fourth moment requires df > 4, got df={model.df}"
        )
    return 3.0 * (model.df - 2.0) / (model.df - 4.0)


def _sum_fourth_weights(model: ModelSpec) -> np.ndarray:
    """sum_u a_u^4 for each entry X_i = sum_u a_u xi_u (unit-variance weights)."""
    if model.kind == "m-dependent":
        c = np.asarray(model.coeffs)
        s4 = float(np.sum(c**4) / (c @ c) ** 2)
        return np.full(model.p, s4)
    if model.kind == "block-independent":
        if model.within_block == "iid":
            return np.ones(model.p)
        th = model.theta
        return np.full(model.p, th * th + (1.0 - th) * (1.0 - th))
    gen = model.generator
    return np.array([1.0 / len(gen.ball(v, 1)) for v in gen.vertices])


def fourth_moments(
    model: ModelSpec, mc_reps: int = 200_000, return_std_error: bool = False
):
    """Per-entry E X_k^4.

    Gaussian and rademacher innovations admit closed forms; other laws are
    estimated by Monte Carlo with mc_reps replicates (requiring a finite
    innovation fourth moment, i.e. df > 4 for student-t).
    """
    kurt = _innovation_kurtosis(model)
    if model.innovation in ("gaussian", "rademacher"):
        values = (3.0 + (kurt - 3.0) * _sum_fourth_weights(model)) * model.scale**2
        return (values, None) if return_std_error else values
    if not isinstance(mc_reps, int) or mc_reps < 2:
        raise ValueError(f"mc_reps must be an integer >= 2, got {mc_reps!r}")
    total = np.zeros(model.p)
    total_sq = np.zeros(model.p)
    for lo, hi in _chunks(mc_reps, model.p):
        x4 = _sample_columns(model, lo, hi) ** 4
        total += x4.sum(axis=1)
        total_sq += (x4 * x4).sum(axis=1)
    values = total / mc_reps
    var = np.maximum(total_sq / mc_reps - values**2, 0.0)
    std_errors = np.sqrt(var / mc_reps)
    return (values, std_errors) if return_std_error else values


def lindeberg_statistic(
    model: ModelSpec,
    blocks: Sequence[Sequence[int]],
    epsilon: float,
    mc_reps: int = 100_000,
) -> LindebergEstimate:
    """Monte Carlo estimate of sum_k E[Z_k 1(Z_k > eps)], Z_k = block sum of X_i^2 / p.

    Returns the point estimate together with its standard error.
    """
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if not isinstance(mc_reps, int) or mc_reps < 2:
        raise ValueError(f"mc_reps must be an integer >= 2, got {mc_reps!r}")
    index_sets = [np.asarray(sorted(b), dtype=np.intp) for b in blocks]
    flat = sorted(i for b in blocks for i in b)
    if flat != list(range(1, model.p + 1)):
        raise ValueError("blocks must partition 1..p")
    total = 0.0
    total_sq = 0.0
    for lo, hi in _chunks(mc_reps, model.p):
        sq = _sample_columns(model, lo, hi) ** 2
        t = np.zeros(hi - lo)
        for idx in index_sets:
            z = sq[idx - 1].sum(axis=0) / model.p
            t += np.where(z > epsilon, z, 0.0)
        total += float(t.sum())
        total_sq += float(t @ t)
    est = total / mc_reps
    var = max(total_sq / mc_reps - est * est, 0.0)
    return LindebergEstimate(est, math.sqrt(var / mc_reps))


_JSON_KEYS = {"kind", "p", "m", "coeffs", "blocks", "theta", "innovation", "df", "seed"}


def model_from_json(obj: dict) -> ModelSpec:
    """Build a model from its JSON configuration; unknown fields are rejected.

    The JSON surface covers the m-dependent and block-independent kinds;
    graph moving averages carry a generator graph and are library-only.
    """
    if not isinstance(obj, dict):
        raise ValueError(f"model configuration must be an object, got {type(obj).__name__}")
    unknown = set(obj) - _JSON_KEYS
    if unknown:
        raise ValueError(f"unknown model configuration fields: {sorted(unknown)}")
    for key in ("kind", "innovation", "seed"):
        if key not in obj:
            raise ValueError(f"model configuration is missing {key!r}")
    kind = obj["kind"]
    innovation = obj["innovation"]
    df = obj.get("df")
    if df is not None:
        df = float(df)
    seed = obj["seed"]
    if kind == "m-dependent":
        for key in ("p", "m", "coeffs"):
            if key not in obj:
                raise ValueError(f"m-dependent configuration is missing {key!r}")
        for key in ("blocks", "theta"):
            if key in obj:
                raise ValueError(f"{key!r} is not valid for m-dependent models")
        return make_m_dependent(
            obj["p"], obj["m"], obj["coeffs"], innovation=innovation, df=df, seed=seed
        )
    if kind == "block-independent":
        if "blocks" not in obj:
            raise ValueError("block-independent configuration is missing 'blocks'")
        for key in ("m", "coeffs"):
            if key in obj:
                raise ValueError(f"{key!r} is not valid for block-independent models")
        blocks = obj["blocks"]
        if not isinstance(blocks, list):
            raise ValueError(f"'blocks' must be a list of sizes, got {blocks!r}")
        if "p" in obj and obj["p"] != sum(blocks):
            raise ValueError(
                f"declared p={obj['p']} does not match sum of blocks {sum(blocks)}"
            )
        theta = obj.get("theta")
        within = "iid" if theta is None else "common-factor"
        return make_block_independent(
            blocks, within_block=within, theta=theta,
            innovation=innovation, df=df, seed=seed,
        )
    raise ValueError(f"unknown model kind {kind!r}")
