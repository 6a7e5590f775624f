import pytest

from maternfield.acceptance import CHECKS


@pytest.mark.parametrize("check", CHECKS, ids=[f"{c.number:02d}-{c.check_name.replace(' ', '-')}" for c in CHECKS])
def test_criterion(check, acceptance_log):
    result = check()
    line = result.line()
    print(line)
    acceptance_log.append(line)
    assert result.passed, line
