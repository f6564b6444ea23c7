import numpy as np
import pytest
from hypothesis import settings

from innermccoy.dsl import build_ring_spec

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def ring():
    """Ring factory keyed by DSL text (construction is cached)."""
    return build_ring_spec


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def validate():
    """validate(kind, data): check a report against its shipped schema."""
    from jsonschema import Draft202012Validator
    from referencing import Registry, Resource

    from innermccoy.cli import SCHEMA_DIR, load_schema

    registry = Registry().with_resources(
        (p.name, Resource.from_contents(load_schema(p.stem))) for p in SCHEMA_DIR.glob("*.json")
    )

    def check(kind: str, data: dict) -> None:
        schema = load_schema(kind)
        Draft202012Validator.check_schema(schema)
        Draft202012Validator(schema, registry=registry).validate(data)

    return check


@pytest.fixture(scope="session")
def corpus_summary():
    from innermccoy.certificates import run_corpus

    return run_corpus()


_ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def criterion(request, capsys):
    """criterion(n, title, checks): print one PASS/FAIL line and assert every check.

    ``checks`` is a list of (label, bool) pairs.
    """

    def report(n: int, title: str, checks: list[tuple[str, bool]]) -> None:
        failed = [label for label, ok in checks if not ok]
        status = "PASS" if not failed else "FAIL"
        line = f"criterion {n:2d}: {status}  {title}"
        if failed:
            line += "  [failed: " + "; ".join(failed) + "]"
        _ACCEPTANCE[n] = line
        with capsys.disabled():
            print("\n" + line)
        assert not failed, line

    return report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[n])
