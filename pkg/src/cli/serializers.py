"""
Serializers for command output.
Turn engine results into flat OutputRecords and render them as csv, json or
a fixed-width table.

Record layout: n, m, q first, then metric names in alphabetical order.
Floats carry 10 significant digits; a Fraction metric is written twice,
as a decimal under its name and as "num/den" under <name>_rational.
"""

import csv
import io
import json
import math
from dataclasses import asdict
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Iterable, List

from src.models import AdvantageEstimate, BoundReport, QHalfResult, SharpnessReport, SweepRow

OutputRecord = Dict[str, Any]

LEADING_KEYS = ('n', 'm', 'q')
NOT_REACHED = 'not reached'
FORMATS = ('table', 'csv', 'json')


def _clean_value(v):
    """JSON-safe scalar: enums by value, non-finite floats as strings."""
    if isinstance(v, Enum):
        return v.value
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


def to_record(values: Dict[str, Any]) -> OutputRecord:
    flat: Dict[str, Any] = {}
    for key, value in values.items():
        if isinstance(value, Fraction):
            flat[key] = float(value)
            flat[f"{key}_rational"] = f"{value.numerator}/{value.denominator}"
        else:
            flat[key] = _clean_value(value)

    record: OutputRecord = {k: flat.pop(k) for k in LEADING_KEYS if k in flat}
    for key in sorted(flat):
        record[key] = flat[key]
    return record


# =============================================================================
# ENGINE RESULTS -> RECORDS
# =============================================================================

def serialize_bound_report(report: BoundReport) -> OutputRecord:
    return to_record(asdict(report))


def serialize_estimate(estimate: AdvantageEstimate, **extra) -> OutputRecord:
    p = estimate.params
    values = {
        'n': p.n, 'm': p.m, 'q': p.q,
        'distinguisher': estimate.distinguisher,
        'trials_per_world': estimate.trials_per_world,
        'p_perm_guess_given_perm': estimate.p_perm_guess_given_perm,
        'p_perm_guess_given_func': estimate.p_perm_guess_given_func,
        'adv_hat': estimate.adv_hat,
        'ci_halfwidth_95': estimate.ci_halfwidth_95,
        'seed': estimate.seed,
    }
    values.update(extra)
    return to_record(values)


def serialize_sweep_row(row: SweepRow) -> OutputRecord:
    return serialize_estimate(row.estimate, stam=row.stam, combined=row.combined)


def serialize_qhalf(result: QHalfResult) -> OutputRecord:
    return to_record({
        'n': result.n, 'm': result.m, 'method': result.method,
        'q_half': result.q_half if result.reached else NOT_REACHED,
    })


def summarize_checks(report: SharpnessReport) -> str:
    """'pass', or 'fail: ' followed by every failed check as name@k=K."""
    failed = [f"{name}@k={k}" for name, k, holds in report.checks if not holds]
    return 'pass' if not failed else 'fail: ' + '; '.join(failed)


# =============================================================================
# RENDERING
# =============================================================================

def _text(v) -> str:
    if v is None:
        return ''
    if isinstance(v, bool):
        return 'true' if v else 'false'
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def _json_value(v):
    if isinstance(v, float):
        return float(f"{v:.10g}")
    return v


def _fieldnames(rows: List[OutputRecord]) -> List[str]:
    names: Dict[str, None] = {}
    for row in rows:
        for key in row:
            names.setdefault(key, None)
    return list(names)


def render_csv(rows: List[OutputRecord]) -> str:
    if not rows:
        return ''
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=_fieldnames(rows), restval='', lineterminator='\n')
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _text(v) for k, v in row.items()})
    return buf.getvalue()


def render_json(command: str, rows: List[OutputRecord]) -> str:
    payload = {
        'command': command,
        'rows': [{k: _json_value(v) for k, v in row.items()} for row in rows],
    }
    return json.dumps(payload, indent=2)


def render_table(rows: List[OutputRecord]) -> str:
    if not rows:
        return '(no rows)\n'
    names = _fieldnames(rows)
    if len(rows) == 1:
        width = max(len(k) for k in names)
        return ''.join(f"{k:<{width}}  {_text(rows[0].get(k))}\n" for k in names)

    cells = [[_text(row.get(k)) for k in names] for row in rows]
    widths = [max(len(k), *(len(c[i]) for c in cells)) for i, k in enumerate(names)]
    lines = ['  '.join(k.rjust(w) for k, w in zip(names, widths)),
             '  '.join('-' * w for w in widths)]
    lines += ['  '.join(c.rjust(w) for c, w in zip(cell_row, widths)) for cell_row in cells]
    return '\n'.join(lines) + '\n'


def render(command: str, rows: Iterable[OutputRecord], fmt: str) -> str:
    rows = list(rows)
    if fmt == 'csv':
        return render_csv(rows)
    if fmt == 'json':
        return render_json(command, rows) + '\n'
    return render_table(rows)
