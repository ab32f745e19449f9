#!/usr/bin/env python3
"""
trunc-dist Terminal CLI
Bounds, exact distances, Monte Carlo estimates and q_1/2 for the truncated
random permutation vs. random function problem.

Exit codes: 0 success, 2 bad parameters (one line on stderr), 1 internal error.
"""

import functools
import logging
import sys
from contextlib import contextmanager

import click
from tqdm import tqdm

from src.bus.events import bus, EVENT_BLOCK_COMPLETE, EVENT_SIMULATION_STARTED
from src.cli.serializers import (
    FORMATS, render, serialize_bound_report, serialize_estimate, serialize_qhalf,
    serialize_sweep_row, summarize_checks, to_record,
)
from src.config import config
from src.engine.bounds import QHALF_METHODS, bound_report, combined_bound, q_grid, q_half, stam_bound
from src.engine.core import ParamsError, validate_params
from src.logging_config import configure_logging, log_call
from src.models import DistinguisherKind, DistinguisherSpec

DISTINGUISHER_CHOICES = [k.value for k in DistinguisherKind]


def _cli_errors(func):
    """ValueError (domain errors included) -> exit 2; anything else -> logged, exit 1."""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except click.ClickException:
            raise
        except ValueError as e:
            click.echo(f"Error: {e}", err=True)
            sys.exit(2)
        except Exception as e:
            logging.getLogger("src").error(f"{func.__name__} failed: {e}", exc_info=True)
            click.echo(f"Error: {e}", err=True)
            sys.exit(1)
    return wrapper


@contextmanager
def _progress():
    """tqdm bar on stderr fed by simulation events; silent when stderr is not a terminal."""
    bar = tqdm(total=0, desc="blocks", unit="block", file=sys.stderr, disable=None, leave=False)

    def on_started(event):
        bar.total += event['blocks']
        bar.refresh()

    def on_block(event):
        bar.update(1)

    bus.on(EVENT_SIMULATION_STARTED, on_started)
    bus.on(EVENT_BLOCK_COMPLETE, on_block)
    try:
        yield bar
    finally:
        bus.off(EVENT_SIMULATION_STARTED, on_started)
        bus.off(EVENT_BLOCK_COMPLETE, on_block)
        bar.close()


def _emit(command: str, rows, fmt: str):
    click.echo(render(command, rows, fmt), nl=False)


def _resolve_q_list(q, q_min, q_max, points, log_scale) -> list[int]:
    if q is not None:
        return [q]
    if q_min is None or q_max is None:
        raise ParamsError("give --q, or both --q-min and --q-max")
    return q_grid(q_min, q_max, points, log_scale)


def _parse_q_list(raw: str) -> list[int]:
    try:
        return [int(part) for part in raw.split(',') if part.strip()]
    except ValueError:
        raise ParamsError(f"--q-list must be comma-separated integers, got {raw!r}")


def _distinguisher_spec(name: str, threshold) -> DistinguisherSpec:
    return DistinguisherSpec(kind=DistinguisherKind(name), threshold=threshold)


format_option = click.option('--format', 'fmt', type=click.Choice(FORMATS), default='table',
                             show_default=True, help='Output format')


@click.group()
def cli():
    """trunc-dist - truncated permutation vs. random function toolkit"""
    configure_logging()


# =============================================================================
# BOUNDS
# =============================================================================

@cli.command('bounds')
@click.option('--n', type=int, required=True, help='Block size in bits')
@click.option('--m', type=int, required=True, help='Truncated bits')
@click.option('--q', type=int, help='Number of queries')
@click.option('--q-min', type=int, help='Grid start (instead of --q)')
@click.option('--q-max', type=int, help='Grid end (instead of --q)')
@click.option('--points', type=int, default=10, show_default=True, help='Grid points')
@click.option('--log-scale', is_flag=True, help='Geometric grid')
@click.option('--bi-constant', type=float, default=None, help='Constant standing in for O(n) in the BI bound')
@format_option
@_cli_errors
@log_call
def bounds_cmd(n, m, q, q_min, q_max, points, log_scale, bi_constant, fmt):
    """Every closed-form bound at one q or over a grid of q"""
    validate_params(n, m, 0)
    rows = [serialize_bound_report(bound_report(n, m, qq, bi_constant))
            for qq in _resolve_q_list(q, q_min, q_max, points, log_scale)]
    _emit('bounds', rows, fmt)


# =============================================================================
# EXACT
# =============================================================================

@cli.command('exact')
@click.option('--n', type=int, required=True, help='Block size in bits')
@click.option('--m', type=int, required=True, help='Truncated bits')
@click.option('--q', type=int, required=True, help='Number of queries (<= 30)')
@format_option
@_cli_errors
@log_call
def exact_cmd(n, m, q, fmt):
    """Exact total variation, KL and Pinsker; balance-test values when m = n-1 and q is even"""
    from src.engine import exact

    p = validate_params(n, m, q)
    values = {
        'n': n, 'm': m, 'q': q,
        'tv': exact.total_variation(p),
        'kl': exact.kl_perm_func(p),
        'pinsker_rhs': exact.pinsker_bound(p),
        'stam': stam_bound(n, m, q),
        'combined': combined_bound(n, m, q),
    }
    if p.is_one_bit and q % 2 == 0 and 2 <= q <= p.domain_size // 2:
        values['alg1'] = exact.alg1_exact_advantage(p)
        values['alg1_lower_bound'] = exact.alg1_lower_bound(p)
        values['alg1_checks'] = summarize_checks(exact.alg1_sharpness_checks(p))
        values['sharpness_ratio'] = exact.alg1_sharpness_ratio(p)
    _emit('exact', [to_record(values)], fmt)


# =============================================================================
# MONTE CARLO
# =============================================================================

def _mc_options(func):
    options = [
        click.option('--distinguisher', type=click.Choice(DISTINGUISHER_CHOICES), default='collision',
                     show_default=True, help='Guessing strategy'),
        click.option('--threshold', type=float, default=None, help='col_2 threshold (collision only)'),
        click.option('--trials', type=int, default=None, help='Trials per world [default: TRUNC_DIST_TRIALS]'),
        click.option('--seed', type=int, default=None, help='Master seed [default: TRUNC_DIST_SEED]'),
        click.option('--workers', type=int, default=None, help='Worker processes [default: TRUNC_DIST_WORKERS]'),
    ]
    for option in reversed(options):
        func = option(func)
    return func


@cli.command('simulate')
@click.option('--n', type=int, required=True, help='Block size in bits')
@click.option('--m', type=int, required=True, help='Truncated bits')
@click.option('--q', type=int, required=True, help='Number of queries')
@_mc_options
@format_option
@_cli_errors
@log_call
def simulate_cmd(n, m, q, distinguisher, threshold, trials, seed, workers, fmt):
    """Monte Carlo advantage of one distinguisher"""
    from src.engine.mc import estimate_advantage

    p = validate_params(n, m, q)
    spec = _distinguisher_spec(distinguisher, threshold)
    with _progress():
        estimate = estimate_advantage(p, spec, trials, seed, workers)
    row = serialize_estimate(estimate, stam=stam_bound(n, m, q), combined=combined_bound(n, m, q))
    _emit('simulate', [row], fmt)


@cli.command('sweep')
@click.option('--n', type=int, required=True, help='Block size in bits')
@click.option('--m', type=int, required=True, help='Truncated bits')
@click.option('--q-list', type=str, default=None, help='Comma-separated q values')
@click.option('--q-min', type=int, help='Grid start (instead of --q-list)')
@click.option('--q-max', type=int, help='Grid end (instead of --q-list)')
@click.option('--points', type=int, default=7, show_default=True, help='Grid points')
@click.option('--log-scale', is_flag=True, help='Geometric grid')
@_mc_options
@format_option
@_cli_errors
@log_call
def sweep_cmd(n, m, q_list, q_min, q_max, points, log_scale, distinguisher, threshold,
              trials, seed, workers, fmt):
    """Advantage-vs-q table with the Stam and combined bounds alongside"""
    from src.engine.mc import sweep

    validate_params(n, m, 0)
    if q_list is not None:
        qs = _parse_q_list(q_list)
    else:
        qs = _resolve_q_list(None, q_min, q_max, points, log_scale)
    spec = _distinguisher_spec(distinguisher, threshold)
    with _progress():
        rows = sweep(n, m, qs, spec, trials, seed, workers)
    _emit('sweep', [serialize_sweep_row(r) for r in rows], fmt)


# =============================================================================
# q_1/2
# =============================================================================

@cli.command('qhalf')
@click.option('--n', type=int, required=True, help='Block size in bits')
@click.option('--m', type=int, required=True, help='Truncated bits')
@click.option('--method', type=click.Choice(QHALF_METHODS), default='stam', show_default=True,
              help='Bound, exact enumeration or Monte Carlo')
@click.option('--bi-constant', type=float, default=None, help='Constant for --method bi')
@click.option('--trials', type=int, default=None, help='Trials per world (montecarlo)')
@click.option('--seed', type=int, default=None, help='Master seed (montecarlo)')
@click.option('--workers', type=int, default=None, help='Worker processes (montecarlo)')
@format_option
@_cli_errors
@log_call
def qhalf_cmd(n, m, method, bi_constant, trials, seed, workers, fmt):
    """Smallest q at which the chosen advantage measure reaches 1/2"""
    with _progress():
        result = q_half(n, m, method, bi_constant=bi_constant, trials=trials,
                        seed=config.SEED if seed is None else seed, workers=workers)
    _emit('qhalf', [serialize_qhalf(result)], fmt)


# =============================================================================
# MAIN
# =============================================================================

if __name__ == '__main__':
    cli()
