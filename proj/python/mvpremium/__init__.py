"""Continuous-time mean-variance portfolio selection: frontier, simulation, verification."""

from ._core import (
    Market,
    MvpError,
    black_scholes_market,
    constant_market,
    constant_mix_point,
    efficient_allocation,
    frontier_points,
    frontier_slope,
    gamma,
    lemma_margin,
    load_market,
    min_variance,
    parse_market,
    premium,
    risk_free_payoff,
    run_cli,
    simulate_constant_mix,
    simulate_efficient,
    stock_stats_bs,
)

__all__ = [
    "Market",
    "MvpError",
    "black_scholes_market",
    "constant_market",
    "constant_mix_point",
    "efficient_allocation",
    "frontier_points",
    "frontier_slope",
    "gamma",
    "lemma_margin",
    "load_market",
    "min_variance",
    "parse_market",
    "premium",
    "risk_free_payoff",
    "run_cli",
    "simulate_constant_mix",
    "simulate_efficient",
    "stock_stats_bs",
]
