from solution import double, half, inverse


def test_double():
    assert double(3) == 6


def test_half():
    assert half(3) == 1.5


def test_inverse():
    assert inverse(0) == 0
