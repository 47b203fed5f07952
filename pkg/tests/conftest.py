import itertools

import pytest

SMALL_MN = [(m, n) for m, n in itertools.product(range(3, 9), range(0, 4)) if (m - 1) * m**n < 5000]


@pytest.fixture(params=SMALL_MN, ids=lambda p: f"m{p[0]}n{p[1]}")
def small_mn(request):
    return request.param
