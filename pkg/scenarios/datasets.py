import random

from commitments.groups import make_point


def synthetic_points(count, seed, low=-50, high=50):
    """Two integer features, two classes: label 1 when x0 > x1, else 0

    The two features are never equal, so the classes are linearly
    separable by the x0 = x1 line."""

    if high - low < 1:
        raise ValueError(f"Feature range [{low}, {high}] is too small")
    rng = random.Random(seed)
    points = []
    while len(points) < count:
        x0, x1 = rng.randint(low, high), rng.randint(low, high)
        if x0 == x1:
            continue
        points.append(make_point((x0, x1), 1 if x0 > x1 else 0))
    return points
