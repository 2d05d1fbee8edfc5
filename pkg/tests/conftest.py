import random

import pytest

from sandwich_tn import SandwichContext, Transformation, parse_transformation
from sandwich_tn.transform import idempotent_sandwiches


def ctx_of(text: str) -> SandwichContext:
    return SandwichContext(parse_transformation(text))


def T(text: str) -> Transformation:
    return parse_transformation(text)


def all_contexts(max_n: int) -> list[SandwichContext]:
    return [SandwichContext(a) for n in range(1, max_n + 1) for a in idempotent_sandwiches(n)]


def random_transformation(rng: random.Random, n: int) -> Transformation:
    return Transformation(tuple(rng.randint(1, n) for _ in range(n)))


def random_context(rng: random.Random, n: int, min_l: int = 1) -> SandwichContext:
    """Random idempotent sandwich element of rank at least ``min_l``."""
    l = rng.randint(min_l, n)
    labels = list(range(l)) + [rng.randrange(l) for _ in range(n - l)]
    rng.shuffle(labels)
    blocks = [[x + 1 for x in range(n) if labels[x] == j] for j in range(l)]
    images = [0] * n
    for b in blocks:
        rep = rng.choice(b)
        for x in b:
            images[x - 1] = rep
    return SandwichContext(Transformation(tuple(images)))


@pytest.fixture
def ctx3():
    return ctx_of("[1,1,3]")


@pytest.fixture
def ctx4():
    return ctx_of("[1,1,3,4]")


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def record(criterion: int, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
