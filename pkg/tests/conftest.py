import sys
from datetime import datetime, timezone
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from chatcorpus.model import Corpus, Group, Message, Provenance, parse_phone, parse_time

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

DATA = Path(__file__).parent / "data"

CO_USER = "+573001234567"
VE_USER = "+584141234567"


def t(s: str) -> datetime:
    return parse_time(s)


def msg(id, group="g1", sender=CO_USER, sent="2020-03-01T12:00Z", kind="text", text="hola",
        server="A", read="2020-03-02T00:00:00Z", **kw) -> Message:
    if kind != "text" and text == "hola":
        text = None
    return Message(id=id, group_uid=group, sender=parse_phone(sender), sent_time=t(sent), kind=kind,
                   provenance=Provenance(server, t(read)), text=text, **kw)


def corpus_of(messages, extra_groups=()) -> Corpus:
    uids = sorted({m.group_uid for m in messages} | set(extra_groups))
    return Corpus({u: Group(u) for u in uids}, list(messages))


@pytest.fixture
def make_msg():
    return msg


@pytest.fixture
def make_corpus():
    return corpus_of


# One pass/fail line per acceptance criterion, printed after the run.
CRITERIA: dict[int, tuple[str, str, float]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when not in ("setup", "call"):
        return
    if rep.when == "call" or rep.failed:
        n, title = mark.args
        CRITERIA[n] = ("PASS" if rep.passed else "FAIL", title, rep.duration)


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for n in sorted(CRITERIA):
        status, title, secs = CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:>2}: {status}  {title} ({secs:.2f} s)")
