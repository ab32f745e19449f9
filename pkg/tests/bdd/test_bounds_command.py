import pytest
from pytest_bdd import scenarios, when, then, parsers

from src.cli.main import cli
from tests.bdd.conftest import first_row

scenarios("features/bounds.feature")


@when(parsers.parse("the analyst asks for bounds at n={n:d}, m={m:d}, q={q:d}"))
def bounds_at(runner, context, n, m, q):
    context["result"] = runner.invoke(cli, ["bounds", "--n", str(n), "--m", str(m), "--q", str(q),
                                            "--format", "json"])


@when(parsers.parse("the analyst asks for bounds at n={n:d}, m={m:d} from q={q_min:d} to q={q_max:d}"))
def bounds_over_range(runner, context, n, m, q_min, q_max):
    context["result"] = runner.invoke(cli, ["bounds", "--n", str(n), "--m", str(m),
                                            "--q-min", str(q_min), "--q-max", str(q_max), "--format", "csv"])


@then(parsers.parse("the {name} bound is about {value:g}"))
def bound_is_about(context, name, value):
    assert first_row(context)[name] == pytest.approx(value, abs=1e-5)


@then(parsers.parse("the combined bound is at most {value:g}"))
def combined_at_most(context, value):
    assert first_row(context)["combined"] <= value


@then(parsers.parse("there is {count:d} row"))
def row_count(context, count):
    lines = context["result"].stdout.strip().splitlines()
    assert len(lines) - 1 == count
