from fractions import Fraction


def as_fraction(x) -> Fraction:
    """Exact fraction; floats are read through their shortest repr, so 0.9 -> 9/10."""
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)
