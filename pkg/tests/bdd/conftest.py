"""
Shared fixtures and step definitions for BDD tests.

- runner, context: available to all scenario files in this directory
- no_logging: autouse, prevents log file creation during tests
- 'the output contains', 'the command succeeds', 'the command fails with exit
  code N' and 'the error says' steps: shared across all feature files
"""

import json

import pytest
from unittest.mock import patch
from click.testing import CliRunner
from pytest_bdd import then, parsers


@pytest.fixture
def runner():
    try:
        return CliRunner(mix_stderr=False)
    except TypeError:
        return CliRunner()


@pytest.fixture
def context():
    """Mutable dict shared between Given/When/Then steps within a scenario."""
    return {}


@pytest.fixture(autouse=True)
def no_logging():
    with patch("src.cli.main.configure_logging"):
        yield


def first_row(context) -> dict:
    """First record of a --format json run."""
    return json.loads(context["result"].stdout)["rows"][0]


@then(parsers.parse('the output contains "{text}"'))
def output_contains(context, text):
    assert text in context["result"].stdout, (
        f"Expected {text!r} in output:\n{context['result'].stdout}"
    )


@then("the command succeeds")
def command_succeeds(context):
    result = context["result"]
    assert result.exit_code == 0, f"exit {result.exit_code}: {result.stderr}"


@then(parsers.parse("the command fails with exit code {code:d}"))
def command_fails(context, code):
    assert context["result"].exit_code == code


@then(parsers.parse('the error says "{text}"'))
def error_says(context, text):
    assert text in context["result"].stderr
