import pytest

from crown import Family, GroupSpec, build_group

_CACHE = {}


def context(label):
    if label not in _CACHE:
        family, n = label.split(":")
        _CACHE[label] = build_group(GroupSpec(Family(family), int(n)))
    return _CACHE[label]


@pytest.fixture(params=["sl:2", "sl:3", "sp:2"])
def ctx(request):
    return context(request.param)


@pytest.fixture
def sl2():
    return context("sl:2")


@pytest.fixture
def sl3():
    return context("sl:3")


@pytest.fixture
def sp2():
    return context("sp:2")
