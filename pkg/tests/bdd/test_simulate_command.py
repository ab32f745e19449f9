from pytest_bdd import scenarios, when, then, parsers

from src.cli.main import cli
from tests.bdd.conftest import first_row

scenarios("features/simulate.feature")


def _args(kind, n, m, q, trials, seed):
    return ["simulate", "--n", str(n), "--m", str(m), "--q", str(q), "--distinguisher", kind,
            "--trials", str(trials), "--seed", str(seed), "--format", "json"]


@when(parsers.parse(
    "the experimenter simulates {kind} at n={n:d}, m={m:d}, q={q:d} with {trials:d} trials and seed {seed:d}"
))
def simulate(runner, context, kind, n, m, q, trials, seed):
    context["result"] = runner.invoke(cli, _args(kind, n, m, q, trials, seed))


@when(parsers.parse(
    "the experimenter simulates {kind} at n={n:d}, m={m:d}, q={q:d} with {trials:d} trials "
    "and seed {seed:d} on {a:d} and {b:d} workers"
))
def simulate_twice(runner, context, kind, n, m, q, trials, seed, a, b):
    args = _args(kind, n, m, q, trials, seed)
    context["outputs"] = [runner.invoke(cli, args + ["--workers", str(w)]).stdout for w in (a, b)]


@then(parsers.parse("the estimate is within {k:d} half-widths of {value:g}"))
def estimate_close(context, k, value):
    row = first_row(context)
    assert abs(row["adv_hat"] - value) <= k * row["ci_halfwidth_95"]


@then("both outputs are identical")
def outputs_identical(context):
    first, second = context["outputs"]
    assert first and first == second
